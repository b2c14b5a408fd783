#include <cstdio>
#include <fstream>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "treestrat/cli_commands.hpp"
#include "treestrat/errors.hpp"

namespace {

std::string format_double(double v) {
    char buf[40];
    std::snprintf(buf, sizeof(buf), "%.17g", v);
    return buf;
}

// Flag storage plus the config key each flag maps onto. After parsing, the
// config assembles as: defaults -> config file -> explicitly set flags.
struct Binding {
    std::string flag;
    std::string key;
    enum { str, dbl, integer } type;
    std::string* s = nullptr;
    double* d = nullptr;
    int* i = nullptr;
};

struct Cli {
    std::vector<Binding> bindings;
    std::string config_path;
    std::string seed_value;

    void add_str(CLI::App* cmd, const std::string& flag, const std::string& key, std::string* ptr,
                 const std::string& help) {
        cmd->add_option(flag, *ptr, help);
        bindings.push_back({flag, key, Binding::str, ptr, nullptr, nullptr});
    }
    void add_dbl(CLI::App* cmd, const std::string& flag, const std::string& key, double* ptr,
                 const std::string& help) {
        cmd->add_option(flag, *ptr, help);
        bindings.push_back({flag, key, Binding::dbl, nullptr, ptr, nullptr});
    }
    void add_int(CLI::App* cmd, const std::string& flag, const std::string& key, int* ptr,
                 const std::string& help) {
        cmd->add_option(flag, *ptr, help);
        bindings.push_back({flag, key, Binding::integer, nullptr, nullptr, ptr});
    }

    void merge_into(treestrat::RunConfig& cfg, const CLI::App* cmd) const {
        for (const auto& b : bindings) {
            if (!cmd->count(b.flag)) continue;
            switch (b.type) {
                case Binding::str: treestrat::apply_config_entry(cfg, b.key, *b.s); break;
                case Binding::dbl:
                    treestrat::apply_config_entry(cfg, b.key, format_double(*b.d));
                    break;
                case Binding::integer:
                    treestrat::apply_config_entry(cfg, b.key, std::to_string(*b.i));
                    break;
            }
        }
        if (cmd->count("--seed")) treestrat::apply_config_entry(cfg, "seed", seed_value);
    }
};

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"point clouds -> dendrograms -> tree distances -> stratification"};
    app.require_subcommand(1);

    Cli cli;
    treestrat::RunConfig holder; // flag storage only

    auto add_common = [&](CLI::App* cmd) {
        cmd->add_option("--config", cli.config_path, "key=value config file; flags win");
        cmd->add_option("--seed", cli.seed_value, "64-bit seed");
        cli.add_str(cmd, "--out", "out", &holder.out, "output directory");
        cli.add_int(cmd, "--jobs", "jobs", &holder.jobs, "worker threads for pairwise distances");
    };

    CLI::App* reduce = app.add_subcommand("reduce", "impute, z-score and view-aware PCA");
    add_common(reduce);
    cli.add_str(reduce, "--input", "input", &holder.input, "feature csv (id, cloud_id, features)");
    cli.add_str(reduce, "--views", "views", &holder.views,
                "view spec csv (feature_name, view_name)");
    cli.add_int(reduce, "--components-per-view", "components_per_view",
                &holder.components_per_view, "components kept per view");

    CLI::App* trees = app.add_subcommand("trees", "one dendrogram per cloud id");
    add_common(trees);
    cli.add_str(trees, "--input", "input", &holder.input, "reduced feature csv with cloud_id");
    cli.add_str(trees, "--linkage", "linkage", &holder.linkage, "single|complete|average|ward");

    CLI::App* distances = app.add_subcommand("distances", "pairwise tree distance matrix");
    add_common(distances);
    cli.add_str(distances, "--trees", "trees_dir", &holder.trees_dir,
                "directory of tree .json files");
    cli.add_str(distances, "--metric", "metric", &holder.metric, "edit|pruned");
    cli.add_str(distances, "--mu-family", "mu_family", &holder.mu_family,
                "beta|uniform-grid|point-mass");
    cli.add_dbl(distances, "--mu-alpha", "mu_alpha", &holder.mu_alpha, "beta shape alpha");
    cli.add_dbl(distances, "--mu-beta", "mu_beta", &holder.mu_beta, "beta shape beta");
    cli.add_int(distances, "--mu-grid-points", "mu_grid_points", &holder.mu_grid_points,
                "points for uniform-grid");
    cli.add_str(distances, "--mu-points", "mu_points", &holder.mu_points,
                "point masses pos:mass;pos:mass");
    cli.add_str(distances, "--rescale", "rescale", &holder.rescale, "population|per-tree|none");
    cli.add_int(distances, "--budget-leaves", "budget_leaves", &holder.budget_leaves,
                "exact-search leaf budget");
    cli.add_str(distances, "--representation", "representation", &holder.representation,
                "trees|single-lesion|mean-vector");
    cli.add_str(distances, "--input", "input", &holder.input,
                "reduced csv (baseline representations)");
    cli.add_str(distances, "--selector", "selector", &holder.selector,
                "column picking the single lesion");

    CLI::App* stratify = app.add_subcommand("stratify", "silhouette-selected clustering");
    add_common(stratify);
    cli.add_str(stratify, "--matrix", "matrix", &holder.matrix, "distance matrix csv");
    cli.add_str(stratify, "--cluster-linkage", "cluster_linkage", &holder.cluster_linkage,
                "linkage for stratification");
    cli.add_int(stratify, "--k-lo", "k_lo", &holder.k_lo, "smallest k");
    cli.add_int(stratify, "--k-hi", "k_hi", &holder.k_hi, "largest k");
    cli.add_dbl(stratify, "--dbscan-eps", "dbscan_eps", &holder.dbscan_eps,
                "enable DBSCAN cross-check when > 0");
    cli.add_int(stratify, "--dbscan-min-pts", "dbscan_min_pts", &holder.dbscan_min_pts,
                "DBSCAN core threshold");
    cli.add_str(stratify, "--reference", "reference", &holder.reference,
                "reference assignment csv for Rand index");
    cli.add_str(stratify, "--trees", "trees_dir", &holder.trees_dir,
                "tree directory for height curves");

    CLI::App* simulate = app.add_subcommand("simulate", "two-group benchmark study");
    add_common(simulate);
    cli.add_dbl(simulate, "--mu-alpha", "mu_alpha", &holder.mu_alpha, "beta shape alpha");
    cli.add_dbl(simulate, "--mu-beta", "mu_beta", &holder.mu_beta, "beta shape beta");
    cli.add_str(simulate, "--mu-family", "mu_family", &holder.mu_family,
                "beta|uniform-grid|point-mass");

    CLI11_PARSE(app, argc, argv);

    try {
        CLI::App* cmd = app.get_subcommands().front();
        treestrat::RunConfig cfg;
        if (cmd == simulate) { // benchmark defaults
            cfg.mu_alpha = 2.0;
            cfg.mu_beta = 8.0;
        }
        if (cmd->count("--config")) {
            std::ifstream in(cli.config_path, std::ios::binary);
            if (!in) throw treestrat::ValidationError("cannot open config: " + cli.config_path);
            std::ostringstream ss;
            ss << in.rdbuf();
            treestrat::apply_run_config(cfg, ss.str());
        }
        cli.merge_into(cfg, cmd);

        if (cmd == reduce) return treestrat::cmd_reduce(cfg);
        if (cmd == trees) return treestrat::cmd_trees(cfg);
        if (cmd == distances) return treestrat::cmd_distances(cfg);
        if (cmd == stratify) return treestrat::cmd_stratify(cfg);
        if (cmd == simulate) return treestrat::cmd_simulate(cfg);
        return 1;
    } catch (const treestrat::BudgetExceededError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 3;
    } catch (const treestrat::ValidationError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
}
