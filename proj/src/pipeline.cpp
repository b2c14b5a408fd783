#include "treestrat/pipeline.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <functional>
#include <limits>
#include <map>
#include <set>
#include <sstream>
#include <thread>

#include <nlohmann/json.hpp>

#include "treestrat/csv.hpp"
#include "treestrat/rng.hpp"

namespace treestrat {

// ---------------------------------------------------------------------------
// ClusterAssignment

std::string ClusterAssignment::to_csv() const {
    csv::Table t;
    t.header = {"id", "label"};
    for (size_t i = 0; i < ids.size(); ++i)
        t.rows.push_back({ids[i], std::to_string(labels[i])});
    return csv::to_string(t);
}

ClusterAssignment ClusterAssignment::from_csv(const std::string& text) {
    const auto t = csv::parse(text);
    const int idc = t.column("id"), lc = t.column("label");
    if (idc < 0 || lc < 0) throw ValidationError("assignment csv needs columns id and label");
    ClusterAssignment a;
    for (const auto& row : t.rows) {
        a.ids.push_back(row[idc]);
        a.labels.push_back(static_cast<int>(csv::parse_double(row[lc], "assignment label")));
    }
    return a;
}

ClusterAssignment ClusterAssignment::read_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw ValidationError("cannot open assignment: " + path);
    std::ostringstream ss;
    ss << in.rdbuf();
    return from_csv(ss.str());
}

void ClusterAssignment::write_file(const std::string& path) const {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw ValidationError("cannot write assignment: " + path);
    out << to_csv();
}

// ---------------------------------------------------------------------------
// Pairwise tree distances

DistanceMatrix tree_distance_matrix(const std::vector<MergeTree>& trees, const TreeMetric& metric,
                                    int jobs, std::vector<std::string> ids) {
    const int n = static_cast<int>(trees.size());
    if (n < 2) throw ValidationError("distance matrix needs at least two trees");
    if (jobs < 1) jobs = 1;
    if (ids.empty())
        for (int i = 0; i < n; ++i) ids.push_back(std::to_string(i));
    if (static_cast<int>(ids.size()) != n)
        throw ValidationError("tree id count does not match tree count");

    std::vector<MergeTree> canon;
    canon.reserve(n);
    for (const auto& t : trees) canon.push_back(is_canonical(t) ? t : canonicalize(t));
    for (int i = 0; i < n; ++i)
        if (canon[i].leaf_count() > metric.edit.budget_leaves)
            throw BudgetExceededError("tree '" + ids[i] + "' has " +
                                          std::to_string(canon[i].leaf_count()) +
                                          " leaves, over budget " +
                                          std::to_string(metric.edit.budget_leaves),
                                      ids[i], ids[i]);

    struct Pair {
        int i, j;
    };
    std::vector<Pair> pairs;
    pairs.reserve(static_cast<size_t>(n) * (n - 1) / 2);
    for (int i = 0; i < n; ++i)
        for (int j = i + 1; j < n; ++j) pairs.push_back({i, j});

    std::vector<double> values(pairs.size(), 0.0);
    std::vector<int> failed(pairs.size(), 0);
    std::vector<std::string> messages(pairs.size());
    std::atomic<size_t> cursor{0};

    auto worker = [&] {
        while (true) {
            const size_t at = cursor.fetch_add(1);
            if (at >= pairs.size()) return;
            const auto [i, j] = pairs[at];
            try {
                values[at] = metric.kind == TreeMetric::Kind::edit
                                 ? edit_distance(canon[i], canon[j], metric.edit)
                                 : pruned_distance(canon[i], canon[j], metric.mu, metric.edit);
            } catch (const std::exception& e) {
                failed[at] = 1;
                messages[at] = e.what();
            }
        }
    };
    if (jobs == 1) {
        worker();
    } else {
        std::vector<std::thread> pool;
        for (int w = 0; w < jobs; ++w) pool.emplace_back(worker);
        for (auto& th : pool) th.join();
    }
    for (size_t at = 0; at < pairs.size(); ++at)
        if (failed[at])
            throw BudgetExceededError("distance (" + ids[pairs[at].i] + ", " + ids[pairs[at].j] +
                                          ") failed: " + messages[at],
                                      ids[pairs[at].i], ids[pairs[at].j]);

    DistanceMatrix m(n, ids);
    for (size_t at = 0; at < pairs.size(); ++at) m.set(pairs[at].i, pairs[at].j, values[at]);
    return m;
}

// ---------------------------------------------------------------------------
// Clustering on precomputed matrices

namespace {

std::vector<int> cut_labels(const std::vector<MergeStep>& steps, int n, int k) {
    // undo the last k-1 merges: union-find over the first n-k merge steps
    std::vector<int> uf(n);
    for (int i = 0; i < n; ++i) uf[i] = i;
    std::function<int(int)> find = [&](int x) { return uf[x] == x ? x : uf[x] = find(uf[x]); };
    std::vector<int> rep(2 * n - 1, -1);
    for (int i = 0; i < n; ++i) rep[i] = i;
    for (int t = 0; t < n - k; ++t) {
        const int a = rep[steps[t].left], b = rep[steps[t].right];
        uf[find(b)] = find(a);
        rep[n + t] = find(a);
    }
    // label clusters 0..k-1 ordered by smallest member
    std::map<int, int> relabel;
    std::vector<int> labels(n);
    for (int i = 0; i < n; ++i) {
        const int r = find(i);
        auto [it, fresh] = relabel.emplace(r, static_cast<int>(relabel.size()));
        labels[i] = it->second;
        (void)fresh;
    }
    return labels;
}

} // namespace

ClusterAssignment hcluster_matrix(const DistanceMatrix& m, Linkage linkage, int k) {
    const int n = m.size();
    if (k < 1 || k > n) throw ValidationError("cluster count k out of range [1, N]");
    ClusterAssignment a;
    a.ids = m.ids();
    if (k == n) {
        for (int i = 0; i < n; ++i) a.labels.push_back(i);
        return a;
    }
    const auto steps = agglomerate(m, linkage);
    a.labels = cut_labels(steps, n, k);
    return a;
}

double mean_silhouette(const DistanceMatrix& m, const std::vector<int>& labels) {
    const int n = m.size();
    if (static_cast<int>(labels.size()) != n)
        throw ValidationError("label count does not match matrix size");
    std::map<int, int> cluster_size;
    for (int l : labels)
        if (l >= 0) ++cluster_size[l];
    double total = 0.0;
    int counted = 0;
    for (int i = 0; i < n; ++i) {
        if (labels[i] < 0) continue;
        ++counted;
        if (cluster_size[labels[i]] <= 1) continue; // singleton scores 0
        std::map<int, double> sum;
        std::map<int, int> cnt;
        for (int j = 0; j < n; ++j) {
            if (j == i || labels[j] < 0) continue;
            sum[labels[j]] += m(i, j);
            ++cnt[labels[j]];
        }
        const double a = sum[labels[i]] / std::max(1, cnt[labels[i]] );
        double b = std::numeric_limits<double>::infinity();
        for (const auto& [l, s] : sum)
            if (l != labels[i]) b = std::min(b, s / cnt[l]);
        if (!std::isfinite(b)) continue; // single cluster: undefined, scores 0
        const double denom = std::max(a, b);
        total += denom > 0.0 ? (b - a) / denom : 0.0;
    }
    return counted > 0 ? total / counted : 0.0;
}

SilhouetteSelection silhouette_select(const DistanceMatrix& m, Linkage linkage, int k_lo,
                                      int k_hi) {
    if (k_lo < 2 || k_hi < k_lo) throw ValidationError("silhouette range must satisfy 2 <= lo <= hi");
    if (m.size() < k_hi + 1)
        throw ValidationError("silhouette selection needs at least " + std::to_string(k_hi + 1) +
                              " items");
    if (m.all_zero()) throw ValidationError("degenerate all-zero distance matrix");
    SilhouetteSelection best;
    for (int k = k_lo; k <= k_hi; ++k) {
        auto assignment = hcluster_matrix(m, linkage, k);
        const double score = mean_silhouette(m, assignment.labels);
        best.scores_by_k.emplace_back(k, score);
        if (best.k == 0 || score > best.score) {
            best.k = k;
            best.score = score;
            best.assignment = std::move(assignment);
        }
    }
    return best;
}

ClusterAssignment dbscan_matrix(const DistanceMatrix& m, double eps, int min_pts) {
    if (!(eps > 0.0)) throw ValidationError("dbscan eps must be > 0");
    if (min_pts < 1) throw ValidationError("dbscan min_pts must be >= 1");
    const int n = m.size();
    constexpr int kUnvisited = -2, kNoise = -1;
    std::vector<std::vector<int>> neigh(n);
    std::vector<char> core(n, 0);
    for (int i = 0; i < n; ++i) {
        for (int j = 0; j < n; ++j)
            if (m(i, j) <= eps) neigh[i].push_back(j); // closed ball, includes i
        core[i] = static_cast<int>(neigh[i].size()) >= min_pts;
    }
    std::vector<int> labels(n, kUnvisited);
    int cluster = 0;
    for (int i = 0; i < n; ++i) {
        if (labels[i] != kUnvisited) continue;
        if (!core[i]) {
            labels[i] = kNoise;
            continue;
        }
        labels[i] = cluster;
        std::vector<int> queue{i};
        while (!queue.empty()) {
            const int v = queue.back();
            queue.pop_back();
            for (int u : neigh[v]) {
                if (labels[u] == kNoise) labels[u] = cluster; // border point
                if (labels[u] != kUnvisited) continue;
                labels[u] = cluster;
                if (core[u]) queue.push_back(u);
            }
        }
        ++cluster;
    }
    ClusterAssignment a;
    a.ids = m.ids();
    a.labels = std::move(labels);
    return a;
}

double rand_index(const ClusterAssignment& a, const ClusterAssignment& b) {
    if (a.ids.size() != b.ids.size()) throw ValidationError("rand index: item sets differ in size");
    std::map<std::string, int> where;
    for (size_t i = 0; i < b.ids.size(); ++i)
        if (!where.emplace(b.ids[i], static_cast<int>(i)).second)
            throw ValidationError("rand index: duplicate id '" + b.ids[i] + "'");
    std::vector<int> lb(a.ids.size());
    for (size_t i = 0; i < a.ids.size(); ++i) {
        auto it = where.find(a.ids[i]);
        if (it == where.end())
            throw ValidationError("rand index: item '" + a.ids[i] + "' missing from second assignment");
        lb[i] = b.labels[it->second];
    }
    const size_t n = a.ids.size();
    if (n < 2) throw ValidationError("rand index needs at least two items");
    size_t agree = 0, pairs = 0;
    for (size_t i = 0; i < n; ++i) {
        for (size_t j = i + 1; j < n; ++j) {
            ++pairs;
            const bool same_a = a.labels[i] == a.labels[j];
            const bool same_b = lb[i] == lb[j];
            if (same_a == same_b) ++agree;
        }
    }
    return static_cast<double>(agree) / static_cast<double>(pairs);
}

// ---------------------------------------------------------------------------
// Height-count curves

std::vector<double> default_height_grid(const std::vector<MergeTree>& trees, int points) {
    if (trees.empty()) throw ValidationError("height grid over an empty population");
    if (points < 2) throw ValidationError("height grid needs at least two points");
    double m = 0.0;
    for (const auto& t : trees) m = std::max(m, t.height(t.root()));
    std::vector<double> grid(points);
    for (int i = 0; i < points; ++i) grid[i] = m * i / (points - 1);
    return grid;
}

HeightCurve height_curves(const std::vector<MergeTree>& trees, const std::vector<int>& labels,
                          const std::vector<double>& grid) {
    if (trees.empty()) throw ValidationError("height curves over an empty population");
    if (labels.size() != trees.size())
        throw ValidationError("height curves: label count does not match tree count");
    if (grid.empty()) throw ValidationError("height curves need a grid");
    HeightCurve hc;
    hc.grid = grid;
    hc.counts.reserve(trees.size());
    for (const auto& t : trees) {
        std::vector<int> row(grid.size(), 0);
        for (size_t g = 0; g < grid.size(); ++g) {
            int c = 0;
            for (int v = 0; v < t.n(); ++v)
                if (t.height(v) > grid[g]) ++c; // strict inequality
            row[g] = c;
        }
        hc.counts.push_back(std::move(row));
    }
    std::set<int> groups(labels.begin(), labels.end());
    for (int g : groups) {
        std::vector<int> members;
        for (size_t i = 0; i < labels.size(); ++i)
            if (labels[i] == g) members.push_back(static_cast<int>(i));
        if (members.empty()) throw ValidationError("height curves: empty group");
        std::vector<double> mean(grid.size(), 0.0), sd(grid.size(), 0.0);
        for (size_t p = 0; p < grid.size(); ++p) {
            double s = 0.0;
            for (int i : members) s += hc.counts[i][p];
            mean[p] = s / members.size();
            double ss = 0.0;
            for (int i : members) ss += (hc.counts[i][p] - mean[p]) * (hc.counts[i][p] - mean[p]);
            sd[p] = std::sqrt(ss / members.size());
        }
        hc.groups.push_back(g);
        hc.group_mean.push_back(std::move(mean));
        hc.group_sd.push_back(std::move(sd));
    }
    return hc;
}

std::string HeightCurve::to_csv() const {
    csv::Table t;
    t.header = {"h"};
    for (int g : groups) {
        t.header.push_back("mean_group" + std::to_string(g));
        t.header.push_back("sd_group" + std::to_string(g));
    }
    for (size_t p = 0; p < grid.size(); ++p) {
        std::vector<std::string> row{csv::format_double(grid[p])};
        for (size_t g = 0; g < groups.size(); ++g) {
            row.push_back(csv::format_double(group_mean[g][p]));
            row.push_back(csv::format_double(group_sd[g][p]));
        }
        t.rows.push_back(std::move(row));
    }
    return csv::to_string(t);
}

// ---------------------------------------------------------------------------
// Measure suggestion

MuSuggestion suggest_mu(const std::vector<MergeTree>& trees, double concentration) {
    if (trees.size() < 2) throw ValidationError("suggest_mu needs at least two trees");
    if (!(concentration > 0.0)) throw ValidationError("concentration must be positive");
    MuSuggestion s;
    double maxh = 0.0;
    for (const auto& t : trees) maxh = std::max(maxh, t.height(t.root()));
    std::vector<double> heights;
    for (const auto& t : trees)
        for (int v = 0; v < t.n(); ++v)
            if (!t.is_leaf(v)) heights.push_back(t.height(v));
    if (maxh <= 0.0 || heights.size() < 2) {
        s.warnings.push_back("too few internal heights; returning default Beta(2.5, 15)");
        return s;
    }
    for (double& h : heights) h /= maxh;

    // Gaussian KDE, Silverman bandwidth
    const double n = static_cast<double>(heights.size());
    double mean = 0.0;
    for (double h : heights) mean += h;
    mean /= n;
    double var = 0.0;
    for (double h : heights) var += (h - mean) * (h - mean);
    var /= n;
    std::vector<double> sorted = heights;
    std::sort(sorted.begin(), sorted.end());
    const double q1 = sorted[static_cast<size_t>(0.25 * (sorted.size() - 1))];
    const double q3 = sorted[static_cast<size_t>(0.75 * (sorted.size() - 1))];
    const double spread = std::min(std::sqrt(var), (q3 - q1) / 1.34);
    const double bw = 0.9 * spread * std::pow(n, -0.2);
    if (!(bw > 0.0)) {
        s.warnings.push_back("degenerate height spread; returning default Beta(2.5, 15)");
        return s;
    }

    const int points = 512;
    s.grid.resize(points);
    s.density.resize(points);
    for (int i = 0; i < points; ++i) {
        const double x = static_cast<double>(i) / (points - 1);
        s.grid[i] = x;
        double d = 0.0;
        for (double h : heights) {
            const double z = (x - h) / bw;
            d += std::exp(-0.5 * z * z);
        }
        s.density[i] = d / (n * bw * std::sqrt(2.0 * 3.14159265358979323846));
    }

    // first interior local minimum with a local maximum on each side
    int last_max = -1;
    for (int i = 1; i + 1 < points; ++i) {
        if (s.density[i] > s.density[i - 1] && s.density[i] >= s.density[i + 1]) last_max = i;
        if (last_max >= 0 && s.density[i] < s.density[i - 1] && s.density[i] <= s.density[i + 1]) {
            bool rises = false;
            for (int j = i + 1; j < points; ++j)
                if (s.density[j] > s.density[i]) {
                    rises = true;
                    break;
                }
            if (rises && s.grid[i] > 0.0 && s.grid[i] < 1.0) {
                s.antimode_found = true;
                s.antimode = s.grid[i];
                break;
            }
        }
    }
    if (!s.antimode_found) {
        s.warnings.push_back("no interior density minimum found; returning default Beta(2.5, 15)");
        return s;
    }
    s.alpha = concentration * s.antimode;
    s.beta = concentration * (1.0 - s.antimode);
    return s;
}

// ---------------------------------------------------------------------------
// Simulation study

SimulatedClouds simulate_clouds(std::uint64_t seed) {
    SimulatedClouds out;
    char name[16];
    for (int i = 0; i < 100; ++i) {
        const int group = i < 50 ? 1 : 2;
        CounterRng rng(seed, static_cast<std::uint64_t>(i));
        const int n = group == 1 ? rng.uniform_int(2, 20) : rng.uniform_int(2, 10);
        const double sigma = group == 1 ? 1.0 : 2.0;
        PointCloud cloud;
        std::snprintf(name, sizeof(name), "g%d_%02d", group, group == 1 ? i : i - 50);
        cloud.cloud_id = name;
        cloud.points.resize(n, 2);
        for (int p = 0; p < n; ++p)
            for (int c = 0; c < 2; ++c) cloud.points(p, c) = sigma * rng.normal();
        out.clouds.push_back(std::move(cloud));
        out.group.push_back(group);
    }
    return out;
}

namespace {

struct TrimmedCut {
    std::vector<int> labels;        // over all items; -1 = peeled outlier
    std::vector<int> kept;          // indices still in the cut
    std::vector<std::string> removed_ids;
};

// Peel singleton clusters (the average-linkage 2-cut often isolates one
// outlier tree) and recut the remainder, at most max_peels times.
TrimmedCut trimmed_two_cut(const DistanceMatrix& m, Linkage linkage, int max_peels) {
    const int n = m.size();
    std::vector<int> kept(n);
    for (int i = 0; i < n; ++i) kept[i] = i;
    TrimmedCut out;
    for (int round = 0; round <= max_peels; ++round) {
        DistanceMatrix sub(static_cast<int>(kept.size()));
        for (size_t i = 0; i < kept.size(); ++i)
            for (size_t j = i + 1; j < kept.size(); ++j)
                sub.set(static_cast<int>(i), static_cast<int>(j), m(kept[i], kept[j]));
        const auto cut = hcluster_matrix(sub, linkage, 2);
        std::vector<int> size(2, 0);
        for (int l : cut.labels) ++size[l];
        const int small = size[0] <= size[1] ? 0 : 1;
        if (size[small] > 1 || round == max_peels || kept.size() <= 3) {
            out.labels.assign(n, -1);
            for (size_t i = 0; i < kept.size(); ++i) out.labels[kept[i]] = cut.labels[i];
            out.kept = kept;
            return out;
        }
        std::vector<int> next;
        for (size_t i = 0; i < kept.size(); ++i) {
            if (cut.labels[i] == small)
                out.removed_ids.push_back(m.ids()[kept[i]]);
            else
                next.push_back(kept[i]);
        }
        kept = std::move(next);
    }
    return out; // unreachable
}

double cluster_mean_within(const DistanceMatrix& m, const std::vector<int>& labels, int cluster) {
    double s = 0.0;
    int c = 0;
    for (int i = 0; i < m.size(); ++i) {
        if (labels[i] != cluster) continue;
        for (int j = i + 1; j < m.size(); ++j) {
            if (labels[j] != cluster) continue;
            s += m(i, j);
            ++c;
        }
    }
    return c > 0 ? s / c : 0.0;
}

} // namespace

SimulationReport run_simulation_study(std::uint64_t seed, const PruningMeasure& mu,
                                      const std::string& outdir, int jobs) {
    namespace fs = std::filesystem;
    SimulationReport rep;
    rep.seed = seed;

    const SimulatedClouds sim = simulate_clouds(seed);
    std::vector<std::string> ids;
    std::vector<MergeTree> trees;
    for (const auto& cloud : sim.clouds) {
        ids.push_back(cloud.cloud_id);
        trees.push_back(build_dendrogram(cloud, Linkage::average));
    }
    const std::vector<MergeTree> scaled =
        rescale_heights(trees, RescaleMode::population, &rep.scale);

    TreeMetric edit_metric;
    edit_metric.kind = TreeMetric::Kind::edit;
    TreeMetric pruned_metric;
    pruned_metric.kind = TreeMetric::Kind::pruned;
    pruned_metric.mu = mu;
    const DistanceMatrix d_edit = tree_distance_matrix(scaled, edit_metric, jobs, ids);
    const DistanceMatrix d_pruned = tree_distance_matrix(scaled, pruned_metric, jobs, ids);

    const auto cut_edit = hcluster_matrix(d_edit, Linkage::average, 2);
    const auto cut_pruned = hcluster_matrix(d_pruned, Linkage::average, 2);
    rep.silhouette_edit_2cut = mean_silhouette(d_edit, cut_edit.labels);
    rep.silhouette_pruned_2cut = mean_silhouette(d_pruned, cut_pruned.labels);

    const TrimmedCut trim_p = trimmed_two_cut(d_pruned, Linkage::average, 3);
    const TrimmedCut trim_e = trimmed_two_cut(d_edit, Linkage::average, 3);
    rep.removed_outliers_pruned = trim_p.removed_ids;
    rep.removed_outliers_edit = trim_e.removed_ids;

    const double w0 = cluster_mean_within(d_pruned, trim_p.labels, 0);
    const double w1 = cluster_mean_within(d_pruned, trim_p.labels, 1);
    const int compact = w0 <= w1 ? 0 : 1;
    int in_compact = 0, in_compact_g1 = 0, g1_total = 0;
    std::vector<double> coords_compact, coords_other;
    for (int i = 0; i < 100; ++i) {
        if (sim.group[i] == 1) ++g1_total;
        if (trim_p.labels[i] < 0) continue;
        const bool is_compact = trim_p.labels[i] == compact;
        if (is_compact) {
            ++in_compact;
            if (sim.group[i] == 1) ++in_compact_g1;
        }
        auto& sink = is_compact ? coords_compact : coords_other;
        const auto& pts = sim.clouds[i].points;
        for (int p = 0; p < pts.rows(); ++p)
            for (int c = 0; c < 2; ++c) sink.push_back(pts(p, c));
    }
    rep.purity_compact_pruned = in_compact > 0 ? static_cast<double>(in_compact_g1) / in_compact : 0.0;
    rep.recall_group1_compact = g1_total > 0 ? static_cast<double>(in_compact_g1) / g1_total : 0.0;

    auto pooled_sd = [](const std::vector<double>& xs) {
        if (xs.empty()) return 0.0;
        double mean = 0.0;
        for (double x : xs) mean += x;
        mean /= xs.size();
        double ss = 0.0;
        for (double x : xs) ss += (x - mean) * (x - mean);
        return std::sqrt(ss / xs.size());
    };
    rep.sd_compact = pooled_sd(coords_compact);
    rep.sd_other = pooled_sd(coords_other);

    for (int cluster = 0; cluster < 2; ++cluster) {
        int total = 0, g1 = 0;
        for (int i = 0; i < 100; ++i) {
            if (trim_e.labels[i] != cluster) continue;
            ++total;
            if (sim.group[i] == 1) ++g1;
        }
        if (total > 0)
            rep.best_purity_edit = std::max(rep.best_purity_edit, static_cast<double>(g1) / total);
    }

    if (!outdir.empty()) {
        fs::create_directories(outdir);
        fs::create_directories(fs::path(outdir) / "trees");

        csv::Table clouds_csv;
        clouds_csv.header = {"cloud_id", "group", "point", "c0", "c1"};
        for (int i = 0; i < 100; ++i) {
            const auto& pts = sim.clouds[i].points;
            for (int p = 0; p < pts.rows(); ++p)
                clouds_csv.rows.push_back({sim.clouds[i].cloud_id, std::to_string(sim.group[i]),
                                           std::to_string(p), csv::format_double(pts(p, 0)),
                                           csv::format_double(pts(p, 1))});
        }
        csv::write_file((fs::path(outdir) / "clouds.csv").string(), clouds_csv);
        rep.artifacts.push_back("clouds.csv");

        for (int i = 0; i < 100; ++i) {
            const std::string rel = "trees/" + ids[i] + ".json";
            std::ofstream out(fs::path(outdir) / rel, std::ios::binary);
            out << serialize(scaled[i]);
            rep.artifacts.push_back(rel);
        }
        d_edit.write_file((fs::path(outdir) / "matrix_edit.csv").string());
        rep.artifacts.push_back("matrix_edit.csv");
        d_pruned.write_file((fs::path(outdir) / "matrix_pruned.csv").string());
        rep.artifacts.push_back("matrix_pruned.csv");

        ClusterAssignment ap;
        ap.ids = ids;
        ap.labels = trim_p.labels;
        ap.write_file((fs::path(outdir) / "assignment_pruned.csv").string());
        rep.artifacts.push_back("assignment_pruned.csv");
        ClusterAssignment ae;
        ae.ids = ids;
        ae.labels = trim_e.labels;
        ae.write_file((fs::path(outdir) / "assignment_edit.csv").string());
        rep.artifacts.push_back("assignment_edit.csv");

        nlohmann::json j;
        j["seed"] = seed;
        j["mu"] = {{"family", "beta"}, {"alpha", mu.alpha()}, {"beta", mu.beta()}};
        if (mu.family() != PruningMeasure::Family::beta) j["mu"]["family"] = "other";
        j["height_scale"] = rep.scale;
        j["silhouette_edit_2cut"] = rep.silhouette_edit_2cut;
        j["silhouette_pruned_2cut"] = rep.silhouette_pruned_2cut;
        j["removed_outliers_pruned"] = rep.removed_outliers_pruned;
        j["removed_outliers_edit"] = rep.removed_outliers_edit;
        j["purity_compact_pruned"] = rep.purity_compact_pruned;
        j["recall_group1_compact"] = rep.recall_group1_compact;
        j["best_purity_edit"] = rep.best_purity_edit;
        j["sd_compact"] = rep.sd_compact;
        j["sd_other"] = rep.sd_other;
        j["procedure"] =
            "average-linkage 2-cut per matrix; singleton clusters peeled (max 3) before the "
            "final 2-cut; compact cluster = smaller mean within-cluster distance";
        rep.artifacts.push_back("report.json");
        j["artifacts"] = rep.artifacts;
        std::ofstream out(fs::path(outdir) / "report.json", std::ios::binary);
        out << j.dump(2) << "\n";
    }
    return rep;
}

// ---------------------------------------------------------------------------
// Reduced-table baselines

DistanceMatrix baseline_distance_matrix(const FeatureTable& reduced, BaselineMode mode,
                                        const std::string& selector_column) {
    if (reduced.rows() < 1) throw ValidationError("baseline over an empty table");
    std::vector<std::string> order;
    std::map<std::string, std::vector<int>> members;
    for (int r = 0; r < reduced.rows(); ++r) {
        auto [it, fresh] = members.emplace(reduced.cloud_ids[r], std::vector<int>{});
        if (fresh) order.push_back(reduced.cloud_ids[r]);
        it->second.push_back(r);
    }
    int sel = -1;
    if (mode == BaselineMode::single_lesion && !selector_column.empty()) {
        sel = reduced.column_index(selector_column);
        if (sel < 0)
            throw ValidationError("selector column '" + selector_column + "' not in table");
    }
    Eigen::MatrixXd reps(order.size(), reduced.cols());
    for (size_t i = 0; i < order.size(); ++i) {
        const auto& rows = members[order[i]];
        if (mode == BaselineMode::mean_vector) {
            Eigen::RowVectorXd mean = Eigen::RowVectorXd::Zero(reduced.cols());
            for (int r : rows) mean += reduced.values.row(r);
            reps.row(i) = mean / static_cast<double>(rows.size());
        } else {
            int pick = rows[0];
            if (sel >= 0)
                for (int r : rows)
                    if (reduced.values(r, sel) > reduced.values(pick, sel)) pick = r;
            reps.row(i) = reduced.values.row(pick);
        }
    }
    DistanceMatrix m(static_cast<int>(order.size()), order);
    for (int i = 0; i < m.size(); ++i)
        for (int j = i + 1; j < m.size(); ++j)
            m.set(i, j, (reps.row(i) - reps.row(j)).norm());
    return m;
}

} // namespace treestrat
