#pragma once

#include "treestrat/trees.hpp"

namespace testsupport {

/// Exact edit distance by exhaustive enumeration of every mapping: all pairs
/// of kept-edge subsets, contracted to weighted shapes, matched over all
/// root-preserving isomorphisms. Independent of the production search.
/// Trees must have at most 5 leaves.
double oracle_edit_distance(const treestrat::MergeTree& a, const treestrat::MergeTree& b);

} // namespace testsupport
