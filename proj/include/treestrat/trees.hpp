#pragma once

#include <string>
#include <utility>
#include <vector>

#include "treestrat/errors.hpp"

namespace treestrat {

using VertexId = int;

/// Wire-level tree as it appears in the JSON format: arbitrary integer ids,
/// explicit (child, father) edge list. Validated before becoming a MergeTree.
struct TreeData {
    struct Vertex {
        long long id = 0;
        double height = 0.0;
        std::string label; // optional annotation, never used in comparisons
    };
    std::vector<Vertex> vertices;
    std::vector<std::pair<long long, long long>> edges;
    long long root = 0;
};

struct Violation {
    enum class Kind {
        duplicate_vertex,
        unknown_vertex,
        multiple_fathers,
        root_has_father,
        disconnected,
        cycle,
        nonpositive_weight,
        empty,
    };
    Kind kind;
    std::string message;
};

struct ValidationReport {
    std::vector<Violation> violations;
    bool ok() const { return violations.empty(); }
    std::string to_string() const;
};

/// Rooted tree with a height per vertex, monotone increasing toward the root.
/// Vertex ids are dense [0, n). Immutable once built; operations return new
/// trees. Edge weights are derived: weight(v) = height(father(v)) - height(v).
class MergeTree {
public:
    MergeTree() = default;

    /// Build from a father array (-1 marks the root) and per-vertex heights.
    /// Throws ValidationError if any invariant fails.
    static MergeTree from_parents(std::vector<VertexId> father, std::vector<double> height,
                                  std::vector<std::string> label = {});

    static MergeTree from_data(const TreeData& data);

    /// A root-only tree at the given height.
    static MergeTree single_vertex(double height = 0.0);

    int n() const { return static_cast<int>(father_.size()); }
    VertexId root() const { return root_; }
    VertexId father(VertexId v) const { return father_[v]; }
    double height(VertexId v) const { return height_[v]; }
    const std::vector<VertexId>& children(VertexId v) const { return children_[v]; }
    bool is_leaf(VertexId v) const { return children_[v].empty(); }
    const std::string& label(VertexId v) const { return label_[v]; }

    /// Weight of the edge from v up to its father. v must not be the root.
    double weight(VertexId v) const { return height_[father_[v]] - height_[v]; }

    int leaf_count() const;
    std::vector<VertexId> leaves() const;

    /// True when every leaf sits at height exactly 0 (isochronous sampling).
    bool is_dendrogram() const;

    const std::vector<VertexId>& fathers() const { return father_; }
    const std::vector<double>& heights() const { return height_; }
    const std::vector<std::string>& labels() const { return label_; }

private:
    std::vector<VertexId> father_;
    std::vector<double> height_;
    std::vector<std::string> label_;
    std::vector<std::vector<VertexId>> children_;
    VertexId root_ = 0;
};

/// Reports every violated invariant instead of stopping at the first.
ValidationReport validate(const TreeData& data);
ValidationReport validate(const std::vector<VertexId>& father, const std::vector<double>& height);

/// Remove every non-root vertex of order 2 (exactly one child), splicing its
/// two edges into one. Heights of surviving vertices are untouched, so the
/// merged edge weight is the sum of the removed chain's weights and the total
/// edge weight is preserved. The root is exempt and may keep order 1.
MergeTree canonicalize(const MergeTree& t);

bool is_canonical(const MergeTree& t);

/// Sum of all edge weights.
double total_weight(const MergeTree& t);

/// Canonical encoding of the weighted tree shape: equal strings iff the trees
/// are isomorphic as weighted tree shapes (heights ignored, weights exact).
std::string shape_signature(const MergeTree& t);

/// Canonical encoding including vertex heights: equal strings iff there is a
/// structure-and-heights isomorphism.
std::string height_signature(const MergeTree& t);

bool isomorphic_shapes(const MergeTree& a, const MergeTree& b);
bool isomorphic_with_heights(const MergeTree& a, const MergeTree& b);

TreeData to_data(const MergeTree& t);
std::string serialize(const MergeTree& t);

/// Parse the JSON tree format. Malformed input raises ValidationError with
/// line/column diagnostics from the JSON layer or the validation report.
MergeTree parse(const std::string& text);

/// Newick with branch lengths, for third-party dendrogram viewers.
/// Unlabelled vertices are named v<id>.
std::string to_newick(const MergeTree& t);

} // namespace treestrat
