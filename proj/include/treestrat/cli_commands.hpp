#pragma once

#include <cstdint>
#include <string>

namespace treestrat {

/// Everything a command needs, assembled from the config file and flags
/// (flags win). Serializes to the same key=value format it is parsed from.
struct RunConfig {
    std::string input;
    std::string views;
    std::string trees_dir;
    std::string matrix;
    std::string reference;
    std::string out = "out";

    std::string linkage = "average";         // tree building
    std::string cluster_linkage = "ward";    // stratification
    std::string metric = "pruned";           // edit | pruned
    std::string mu_family = "beta";          // beta | uniform-grid | point-mass
    double mu_alpha = 2.5;
    double mu_beta = 15.0;
    int mu_grid_points = 64;
    std::string mu_points;                   // "pos:mass;pos:mass" for point-mass
    std::string rescale = "population";      // population | per-tree | none
    int budget_leaves = 25;
    int components_per_view = 2;
    int k_lo = 2;
    int k_hi = 5;
    std::uint64_t seed = 0;
    bool seed_set = false;
    int jobs = 1;
    double dbscan_eps = 0.0;                 // > 0 enables the DBSCAN cross-check
    int dbscan_min_pts = 3;
    std::string representation = "trees";    // trees | single-lesion | mean-vector
    std::string selector;                    // column picking the single lesion

    bool operator==(const RunConfig&) const = default;
};

std::string serialize_run_config(const RunConfig& cfg);
RunConfig parse_run_config(const std::string& text);
RunConfig read_run_config(const std::string& path);
/// Apply key=value lines ('#' comments allowed) over existing values.
void apply_run_config(RunConfig& cfg, const std::string& text);
void apply_config_entry(RunConfig& cfg, const std::string& key, const std::string& value);

int cmd_reduce(const RunConfig& cfg);
int cmd_trees(const RunConfig& cfg);
int cmd_distances(const RunConfig& cfg);
int cmd_stratify(const RunConfig& cfg);
int cmd_simulate(const RunConfig& cfg);

} // namespace treestrat
