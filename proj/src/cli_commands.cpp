#include "treestrat/cli_commands.hpp"

#include <algorithm>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <map>
#include <sstream>

#include <nlohmann/json.hpp>

#include "treestrat/csv.hpp"
#include "treestrat/pipeline.hpp"

namespace treestrat {

namespace fs = std::filesystem;

namespace {

std::string trim(const std::string& s) {
    size_t a = s.find_first_not_of(" \t\r");
    size_t b = s.find_last_not_of(" \t\r");
    return a == std::string::npos ? "" : s.substr(a, b - a + 1);
}

PruningMeasure measure_from_config(const RunConfig& cfg) {
    if (cfg.mu_family == "beta") return beta_measure(cfg.mu_alpha, cfg.mu_beta);
    if (cfg.mu_family == "uniform-grid") return uniform_grid_measure(cfg.mu_grid_points);
    if (cfg.mu_family == "point-mass") {
        std::vector<std::pair<double, double>> masses;
        std::istringstream is(cfg.mu_points);
        std::string item;
        while (std::getline(is, item, ';')) {
            item = trim(item);
            if (item.empty()) continue;
            const auto colon = item.find(':');
            if (colon == std::string::npos)
                throw ValidationError("mu_points entries must look like position:mass");
            masses.emplace_back(csv::parse_double(item.substr(0, colon), "mu_points"),
                                csv::parse_double(item.substr(colon + 1), "mu_points"));
        }
        return point_mass_measure(std::move(masses));
    }
    throw ValidationError("unknown mu_family '" + cfg.mu_family +
                          "' (beta|uniform-grid|point-mass)");
}

RescaleMode rescale_from_config(const RunConfig& cfg) {
    if (cfg.rescale == "population") return RescaleMode::population;
    if (cfg.rescale == "per-tree") return RescaleMode::per_tree;
    if (cfg.rescale == "none") return RescaleMode::none;
    throw ValidationError("unknown rescale mode '" + cfg.rescale + "' (population|per-tree|none)");
}

std::string sanitize_filename(const std::string& s) {
    std::string out;
    for (char c : s)
        out += (std::isalnum(static_cast<unsigned char>(c)) || c == '_' || c == '-' || c == '.')
                   ? c
                   : '_';
    return out.empty() ? "_" : out;
}

void write_text(const fs::path& path, const std::string& text) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw ValidationError("cannot write " + path.string());
    out << text;
}

void write_manifest(const RunConfig& cfg, const std::string& command,
                    const std::vector<std::string>& outputs, nlohmann::json extra = {}) {
    nlohmann::json j;
    j["command"] = command;
    j["config"] = serialize_run_config(cfg);
    j["outputs"] = outputs;
    for (auto& [k, v] : extra.items()) j[k] = v;
    write_text(fs::path(cfg.out) / "manifest.json", j.dump(2) + "\n");
}

struct TreeSet {
    std::vector<std::string> ids;
    std::vector<MergeTree> trees;
};

TreeSet load_trees(const std::string& dir) {
    if (dir.empty()) throw ValidationError("no tree directory given");
    if (!fs::is_directory(dir)) throw ValidationError("not a directory: " + dir);
    std::vector<std::string> files;
    for (const auto& entry : fs::directory_iterator(dir))
        if (entry.path().extension() == ".json") files.push_back(entry.path().string());
    std::sort(files.begin(), files.end());
    if (files.empty()) throw ValidationError("no .json trees under " + dir);
    TreeSet set;
    for (const auto& f : files) {
        std::ifstream in(f, std::ios::binary);
        std::ostringstream ss;
        ss << in.rdbuf();
        set.trees.push_back(parse(ss.str()));
        set.ids.push_back(fs::path(f).stem().string());
    }
    return set;
}

} // namespace

// ---------------------------------------------------------------------------
// Config round-trip

std::string serialize_run_config(const RunConfig& cfg) {
    std::ostringstream os;
    os << "input=" << cfg.input << "\n";
    os << "views=" << cfg.views << "\n";
    os << "trees_dir=" << cfg.trees_dir << "\n";
    os << "matrix=" << cfg.matrix << "\n";
    os << "reference=" << cfg.reference << "\n";
    os << "out=" << cfg.out << "\n";
    os << "linkage=" << cfg.linkage << "\n";
    os << "cluster_linkage=" << cfg.cluster_linkage << "\n";
    os << "metric=" << cfg.metric << "\n";
    os << "mu_family=" << cfg.mu_family << "\n";
    os << "mu_alpha=" << csv::format_double(cfg.mu_alpha) << "\n";
    os << "mu_beta=" << csv::format_double(cfg.mu_beta) << "\n";
    os << "mu_grid_points=" << cfg.mu_grid_points << "\n";
    os << "mu_points=" << cfg.mu_points << "\n";
    os << "rescale=" << cfg.rescale << "\n";
    os << "budget_leaves=" << cfg.budget_leaves << "\n";
    os << "components_per_view=" << cfg.components_per_view << "\n";
    os << "k_lo=" << cfg.k_lo << "\n";
    os << "k_hi=" << cfg.k_hi << "\n";
    if (cfg.seed_set) os << "seed=" << cfg.seed << "\n";
    os << "jobs=" << cfg.jobs << "\n";
    os << "dbscan_eps=" << csv::format_double(cfg.dbscan_eps) << "\n";
    os << "dbscan_min_pts=" << cfg.dbscan_min_pts << "\n";
    os << "representation=" << cfg.representation << "\n";
    os << "selector=" << cfg.selector << "\n";
    return os.str();
}

void apply_config_entry(RunConfig& cfg, const std::string& key, const std::string& value) {
    auto as_int = [&](const std::string& v) {
        return static_cast<int>(csv::parse_double(v, "config key " + key));
    };
    if (key == "input") cfg.input = value;
    else if (key == "views") cfg.views = value;
    else if (key == "trees_dir") cfg.trees_dir = value;
    else if (key == "matrix") cfg.matrix = value;
    else if (key == "reference") cfg.reference = value;
    else if (key == "out") cfg.out = value;
    else if (key == "linkage") cfg.linkage = value;
    else if (key == "cluster_linkage") cfg.cluster_linkage = value;
    else if (key == "metric") cfg.metric = value;
    else if (key == "mu_family") cfg.mu_family = value;
    else if (key == "mu_alpha") cfg.mu_alpha = csv::parse_double(value, "mu_alpha");
    else if (key == "mu_beta") cfg.mu_beta = csv::parse_double(value, "mu_beta");
    else if (key == "mu_grid_points") cfg.mu_grid_points = as_int(value);
    else if (key == "mu_points") cfg.mu_points = value;
    else if (key == "rescale") cfg.rescale = value;
    else if (key == "budget_leaves") cfg.budget_leaves = as_int(value);
    else if (key == "components_per_view") cfg.components_per_view = as_int(value);
    else if (key == "k_lo") cfg.k_lo = as_int(value);
    else if (key == "k_hi") cfg.k_hi = as_int(value);
    else if (key == "seed") {
        cfg.seed = std::stoull(value);
        cfg.seed_set = true;
    } else if (key == "jobs") cfg.jobs = as_int(value);
    else if (key == "dbscan_eps") cfg.dbscan_eps = csv::parse_double(value, "dbscan_eps");
    else if (key == "dbscan_min_pts") cfg.dbscan_min_pts = as_int(value);
    else if (key == "representation") cfg.representation = value;
    else if (key == "selector") cfg.selector = value;
    else throw ValidationError("unknown config key '" + key + "'");
}

void apply_run_config(RunConfig& cfg, const std::string& text) {
    std::istringstream is(text);
    std::string line;
    size_t lineno = 0;
    while (std::getline(is, line)) {
        ++lineno;
        const std::string s = trim(line);
        if (s.empty() || s[0] == '#') continue;
        const auto eq = s.find('=');
        if (eq == std::string::npos)
            throw ValidationError("config line " + std::to_string(lineno) + ": expected key=value");
        apply_config_entry(cfg, trim(s.substr(0, eq)), trim(s.substr(eq + 1)));
    }
}

RunConfig parse_run_config(const std::string& text) {
    RunConfig cfg;
    apply_run_config(cfg, text);
    return cfg;
}

RunConfig read_run_config(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw ValidationError("cannot open config: " + path);
    std::ostringstream ss;
    ss << in.rdbuf();
    return parse_run_config(ss.str());
}

// ---------------------------------------------------------------------------
// Commands

int cmd_reduce(const RunConfig& cfg) {
    if (cfg.input.empty()) throw ValidationError("reduce needs --input");
    if (cfg.views.empty()) throw ValidationError("reduce needs --views");
    const FeatureTable raw = FeatureTable::read_file(cfg.input);
    if (raw.rows() == 0) throw ValidationError("no lesions in " + cfg.input);
    const ViewSpec spec = ViewSpec::read_file(cfg.views, cfg.components_per_view);
    const FeatureTable imputed = impute(raw);
    const ZscoreResult z = zscore(imputed);
    for (const auto& w : z.warnings) std::cerr << "warning: " << w << "\n";
    const ViewPcaResult pca = view_pca(z.table, spec);

    fs::create_directories(cfg.out);
    write_text(fs::path(cfg.out) / "reduced.csv", pca.table.to_csv());
    csv::Table var;
    var.header = {"view", "component", "explained_fraction"};
    for (const auto& r : pca.reports)
        for (size_t c = 0; c < r.explained_fraction.size(); ++c)
            var.rows.push_back({r.view, std::to_string(c + 1),
                                csv::format_double(r.explained_fraction[c])});
    write_text(fs::path(cfg.out) / "variance_explained.csv", csv::to_string(var));
    write_manifest(cfg, "reduce", {"reduced.csv", "variance_explained.csv"},
                   {{"warnings", z.warnings}});
    return 0;
}

int cmd_trees(const RunConfig& cfg) {
    if (cfg.input.empty()) throw ValidationError("trees needs --input");
    const FeatureTable table = FeatureTable::read_file(cfg.input);
    if (table.rows() == 0) throw ValidationError("no lesions in " + cfg.input);
    const Linkage linkage = linkage_from_string(cfg.linkage);

    std::vector<std::string> order;
    std::map<std::string, std::vector<int>> members;
    for (int r = 0; r < table.rows(); ++r) {
        auto [it, fresh] = members.emplace(table.cloud_ids[r], std::vector<int>{});
        if (fresh) order.push_back(table.cloud_ids[r]);
        it->second.push_back(r);
    }

    fs::create_directories(fs::path(cfg.out) / "trees");
    std::vector<std::string> outputs;
    std::vector<std::string> warnings;
    std::map<std::string, int> seen;
    for (const auto& cloud_id : order) {
        const auto& rows = members[cloud_id];
        PointCloud cloud;
        cloud.cloud_id = cloud_id;
        cloud.points.resize(static_cast<int>(rows.size()), table.cols());
        for (size_t i = 0; i < rows.size(); ++i) {
            cloud.points.row(static_cast<int>(i)) = table.values.row(rows[i]);
            cloud.ids.push_back(table.row_ids[rows[i]]);
        }
        if (cloud.size() == 1) {
            warnings.push_back("cloud '" + cloud_id + "' has a single lesion; single-vertex tree");
            std::cerr << "warning: " << warnings.back() << "\n";
        }
        const MergeTree tree = build_dendrogram(cloud, linkage);
        std::string name = sanitize_filename(cloud_id);
        if (!seen.emplace(name, 1).second)
            throw ValidationError("cloud ids collide after filename sanitizing: " + name);
        const std::string rel = "trees/" + name + ".json";
        write_text(fs::path(cfg.out) / rel, serialize(tree));
        outputs.push_back(rel);
    }
    write_manifest(cfg, "trees", outputs,
                   {{"warnings", warnings}, {"linkage", cfg.linkage}});
    return 0;
}

int cmd_distances(const RunConfig& cfg) {
    fs::create_directories(cfg.out);
    nlohmann::json extra;
    DistanceMatrix matrix;
    if (cfg.representation == "trees") {
        TreeSet set = load_trees(cfg.trees_dir);
        double scale = 1.0;
        std::vector<MergeTree> scaled = rescale_heights(set.trees, rescale_from_config(cfg), &scale);
        TreeMetric metric;
        metric.edit.budget_leaves = cfg.budget_leaves;
        if (cfg.metric == "edit") {
            metric.kind = TreeMetric::Kind::edit;
        } else if (cfg.metric == "pruned") {
            metric.kind = TreeMetric::Kind::pruned;
            metric.mu = measure_from_config(cfg);
        } else {
            throw ValidationError("unknown metric '" + cfg.metric + "' (edit|pruned)");
        }
        matrix = tree_distance_matrix(scaled, metric, cfg.jobs, set.ids);
        extra["metric"] = cfg.metric;
        extra["rescale"] = cfg.rescale;
        extra["height_scale"] = scale;
        extra["budget_leaves"] = cfg.budget_leaves;
        if (cfg.metric == "pruned")
            extra["mu"] = {{"family", cfg.mu_family},
                           {"alpha", cfg.mu_alpha},
                           {"beta", cfg.mu_beta},
                           {"grid_points", cfg.mu_grid_points},
                           {"points", cfg.mu_points}};
    } else if (cfg.representation == "single-lesion" || cfg.representation == "mean-vector") {
        if (cfg.input.empty()) throw ValidationError("baseline distances need --input");
        const FeatureTable reduced = FeatureTable::read_file(cfg.input);
        matrix = baseline_distance_matrix(reduced,
                                          cfg.representation == "single-lesion"
                                              ? BaselineMode::single_lesion
                                              : BaselineMode::mean_vector,
                                          cfg.selector);
        extra["representation"] = cfg.representation;
    } else {
        throw ValidationError("unknown representation '" + cfg.representation +
                              "' (trees|single-lesion|mean-vector)");
    }
    matrix.write_file((fs::path(cfg.out) / "matrix.csv").string());
    write_manifest(cfg, "distances", {"matrix.csv"}, extra);
    return 0;
}

int cmd_stratify(const RunConfig& cfg) {
    if (cfg.matrix.empty()) throw ValidationError("stratify needs --matrix");
    const DistanceMatrix m = DistanceMatrix::read_file(cfg.matrix);
    const Linkage linkage = linkage_from_string(cfg.cluster_linkage);
    const SilhouetteSelection sel = silhouette_select(m, linkage, cfg.k_lo, cfg.k_hi);

    fs::create_directories(cfg.out);
    std::vector<std::string> outputs;
    sel.assignment.write_file((fs::path(cfg.out) / "assignment.csv").string());
    outputs.push_back("assignment.csv");

    nlohmann::json report;
    report["k"] = sel.k;
    report["silhouette"] = sel.score;
    for (const auto& [k, s] : sel.scores_by_k)
        report["silhouette_by_k"][std::to_string(k)] = s;

    if (cfg.dbscan_eps > 0.0) {
        const ClusterAssignment db = dbscan_matrix(m, cfg.dbscan_eps, cfg.dbscan_min_pts);
        db.write_file((fs::path(cfg.out) / "dbscan.csv").string());
        outputs.push_back("dbscan.csv");
        int noise = 0;
        int clusters = 0;
        for (int l : db.labels) {
            if (l < 0) ++noise;
            clusters = std::max(clusters, l + 1);
        }
        report["dbscan"] = {{"eps", cfg.dbscan_eps},
                            {"min_pts", cfg.dbscan_min_pts},
                            {"clusters", clusters},
                            {"noise", noise}};
    }
    if (!cfg.reference.empty()) {
        const ClusterAssignment ref = ClusterAssignment::read_file(cfg.reference);
        report["rand_index_vs_reference"] = rand_index(sel.assignment, ref);
    }
    if (!cfg.trees_dir.empty()) {
        TreeSet set = load_trees(cfg.trees_dir);
        std::map<std::string, int> label_of;
        for (size_t i = 0; i < sel.assignment.ids.size(); ++i)
            label_of[sel.assignment.ids[i]] = sel.assignment.labels[i];
        std::vector<int> labels;
        for (const auto& id : set.ids) {
            auto it = label_of.find(id);
            if (it == label_of.end())
                throw ValidationError("tree '" + id + "' missing from the distance matrix");
            labels.push_back(it->second);
        }
        const HeightCurve hc =
            height_curves(set.trees, labels, default_height_grid(set.trees, 256));
        write_text(fs::path(cfg.out) / "curves.csv", hc.to_csv());
        outputs.push_back("curves.csv");
    }
    outputs.push_back("report.json");
    write_text(fs::path(cfg.out) / "report.json", report.dump(2) + "\n");
    write_manifest(cfg, "stratify", outputs);
    return 0;
}

int cmd_simulate(const RunConfig& cfg) {
    if (!cfg.seed_set) throw ValidationError("simulate needs an explicit --seed");
    const PruningMeasure mu = measure_from_config(cfg);
    const SimulationReport rep = run_simulation_study(cfg.seed, mu, cfg.out, cfg.jobs);
    std::vector<std::string> outputs = rep.artifacts;
    write_manifest(cfg, "simulate", outputs,
                   {{"seed", cfg.seed},
                    {"purity_compact_pruned", rep.purity_compact_pruned},
                    {"silhouette_pruned_2cut", rep.silhouette_pruned_2cut},
                    {"silhouette_edit_2cut", rep.silhouette_edit_2cut}});
    return 0;
}

} // namespace treestrat
