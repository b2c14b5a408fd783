#pragma once

#include "treestrat/hclust.hpp"
#include "treestrat/rng.hpp"
#include "treestrat/trees.hpp"

namespace testsupport {

using treestrat::CounterRng;
using treestrat::MergeTree;
using treestrat::PointCloud;

struct TreeGenOptions {
    int min_leaves = 1;
    int max_leaves = 8;
    // weights are multiples of unit, so sums and differences are exact
    double unit = 1.0 / 256.0;
    int max_increment = 256;
    double ternary_prob = 0.25;
    double root_chain_prob = 0.15; // wrap the root so it has a single child
    bool heterochronous = false;   // lift some leaves off height 0
};

/// Seeded random canonical merge tree (no order-2 non-root vertices).
MergeTree random_canonical_tree(CounterRng& rng, const TreeGenOptions& opts = {});

/// Split a random edge at its height midpoint, creating one order-2 vertex.
MergeTree insert_order2(const MergeTree& t, CounterRng& rng);

PointCloud random_cloud(CounterRng& rng, int min_n, int max_n, int dim, double sigma = 1.0);

} // namespace testsupport
