#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "treestrat/distance_matrix.hpp"
#include "treestrat/editdist.hpp"
#include "treestrat/hclust.hpp"
#include "treestrat/reduce.hpp"

namespace treestrat {

struct ClusterAssignment {
    std::vector<std::string> ids;
    std::vector<int> labels; // -1 reserved for noise / removed items

    std::string to_csv() const;
    static ClusterAssignment from_csv(const std::string& text);
    static ClusterAssignment read_file(const std::string& path);
    void write_file(const std::string& path) const;
};

struct TreeMetric {
    enum class Kind { edit, pruned };
    Kind kind = Kind::pruned;
    PruningMeasure mu = beta_measure(2.5, 15.0);
    EditOptions edit;
};

/// Pairwise tree distances; entry (i,j) applies the metric to the
/// canonicalized trees. Pairs are evaluated independently, so the result is
/// identical for any worker count. Budget errors name the offending pair.
DistanceMatrix tree_distance_matrix(const std::vector<MergeTree>& trees, const TreeMetric& metric,
                                    int jobs = 1, std::vector<std::string> ids = {});

/// Agglomerative clustering of a precomputed matrix, cut into exactly k
/// clusters. Labels are contiguous from 0, ordered by smallest member index.
ClusterAssignment hcluster_matrix(const DistanceMatrix& m, Linkage linkage, int k);

/// Mean silhouette of a labelling over a precomputed matrix; singleton
/// clusters and degenerate items score 0. Items labelled -1 are ignored.
double mean_silhouette(const DistanceMatrix& m, const std::vector<int>& labels);

struct SilhouetteSelection {
    int k = 0;
    double score = 0.0;
    ClusterAssignment assignment;
    std::vector<std::pair<int, double>> scores_by_k;
};

/// Pick k in [k_lo, k_hi] maximizing the mean silhouette; ties take the
/// smallest k. Requires at least k_hi + 1 items and a non-degenerate matrix.
SilhouetteSelection silhouette_select(const DistanceMatrix& m, Linkage linkage, int k_lo = 2,
                                      int k_hi = 5);

/// Density clustering on precomputed distances: a point is core when its
/// closed eps-neighbourhood holds at least min_pts items; noise is -1.
ClusterAssignment dbscan_matrix(const DistanceMatrix& m, double eps, int min_pts);

/// Pair-counting agreement in [0,1]; items are aligned by id.
double rand_index(const ClusterAssignment& a, const ClusterAssignment& b);

struct HeightCurve {
    std::vector<double> grid;
    std::vector<std::vector<int>> counts; // per tree, per threshold
    std::vector<int> groups;              // distinct labels, ascending
    std::vector<std::vector<double>> group_mean;
    std::vector<std::vector<double>> group_sd;

    std::string to_csv() const;
};

std::vector<double> default_height_grid(const std::vector<MergeTree>& trees, int points = 256);

/// Per-tree counts of vertices with height strictly greater than each grid
/// threshold, with group-wise pointwise mean and standard deviation.
HeightCurve height_curves(const std::vector<MergeTree>& trees, const std::vector<int>& labels,
                          const std::vector<double>& grid);

struct MuSuggestion {
    double alpha = 2.5;
    double beta = 15.0;
    bool antimode_found = false;
    double antimode = 0.0;
    std::vector<double> grid;
    std::vector<double> density;
    std::vector<std::string> warnings;
};

/// Estimate the internal-vertex height density of the population (heights
/// rescaled by the population maximum), locate the first interior local
/// minimum, and return Beta parameters whose mean sits there at the given
/// concentration alpha + beta. Falls back to (2.5, 15) with a warning when no
/// interior minimum exists.
MuSuggestion suggest_mu(const std::vector<MergeTree>& trees, double concentration = 17.5);

struct SimulatedClouds {
    std::vector<PointCloud> clouds;
    std::vector<int> group; // 1 or 2
};

/// Two-process benchmark population: 50 clouds with cardinality U[2,20] and
/// N(0,1) coordinates in R^2, then 50 clouds with cardinality U[2,10] and
/// N(0,2). Deterministic per seed.
SimulatedClouds simulate_clouds(std::uint64_t seed);

struct SimulationReport {
    std::uint64_t seed = 0;
    double scale = 1.0;
    double silhouette_edit_2cut = 0.0;
    double silhouette_pruned_2cut = 0.0;
    // trimmed cut: singleton clusters peeled before the final 2-cut
    std::vector<std::string> removed_outliers_pruned;
    std::vector<std::string> removed_outliers_edit;
    double purity_compact_pruned = 0.0;  // group-1 share of the compact cluster
    double recall_group1_compact = 0.0;  // share of group-1 clouds inside it
    double best_purity_edit = 0.0;
    double sd_compact = 0.0; // pooled coordinate sd of the compact cluster
    double sd_other = 0.0;
    std::vector<std::string> artifacts; // relative paths written under outdir
};

/// Full benchmark: simulate clouds, build average-linkage dendrograms,
/// rescale, compute both distance matrices, cluster both, and write every
/// artifact (clouds, trees, matrices, assignments, report manifest) under
/// outdir. An empty outdir skips writing.
SimulationReport run_simulation_study(std::uint64_t seed, const PruningMeasure& mu,
                                      const std::string& outdir, int jobs = 1);

enum class BaselineMode { single_lesion, mean_vector };

/// State-of-the-art baselines over a reduced feature table: one vector per
/// cloud (its mean profile, or one selected lesion), compared with Euclidean
/// distances. selector_column, when set, picks the row maximizing that
/// column; otherwise the first row of the cloud is used.
DistanceMatrix baseline_distance_matrix(const FeatureTable& reduced, BaselineMode mode,
                                        const std::string& selector_column = "");

} // namespace treestrat
