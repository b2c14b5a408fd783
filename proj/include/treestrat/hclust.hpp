#pragma once

#include <Eigen/Dense>
#include <string>
#include <vector>

#include "treestrat/distance_matrix.hpp"
#include "treestrat/trees.hpp"

namespace treestrat {

/// Finite point cloud in R^p. One cloud per patient; rows are lesions.
struct PointCloud {
    Eigen::MatrixXd points; // n x p
    std::vector<std::string> ids;
    std::string cloud_id;

    int size() const { return static_cast<int>(points.rows()); }
    int dim() const { return static_cast<int>(points.cols()); }
};

enum class Linkage { single, complete, average, ward };

Linkage linkage_from_string(const std::string& s);
std::string to_string(Linkage linkage);

/// Euclidean distances between all point pairs.
DistanceMatrix pairwise_metric(const PointCloud& cloud);

/// Distance between two disjoint index sets under a linkage. Ward uses the
/// closed form equivalent to the Lance-Williams recurrence on squared
/// dissimilarities (see agglomerate).
double linkage_distance(const std::vector<int>& k1, const std::vector<int>& k2,
                        const DistanceMatrix& base, Linkage linkage);

struct MergeStep {
    int left, right; // cluster indices; leaves are 0..n-1, merge t creates n+t
    double height;
    int size;
};

/// Sequential agglomeration over a precomputed dissimilarity matrix.
/// Ties broken by the lowest (left, right) cluster index pair. Ward runs the
/// Lance-Williams recurrence on squared values and reports sqrt heights.
/// sizes, when given, weight the leaves (used for coincident-point groups).
std::vector<MergeStep> agglomerate(const DistanceMatrix& d, Linkage linkage,
                                   const std::vector<int>& sizes = {});

/// Dendrogram of a point cloud: leaves at height 0, one internal vertex per
/// merge at the linkage distance. Points at pairwise distance exactly 0 are
/// merged into one leaf up front so every edge weight stays positive; merges
/// at exactly equal heights contract into one multi-way vertex.
MergeTree build_dendrogram(const PointCloud& cloud, Linkage linkage = Linkage::average);

/// max over both directions of the largest nearest-neighbour distance.
double hausdorff(const PointCloud& a, const PointCloud& b);

} // namespace treestrat
