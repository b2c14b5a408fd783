#include "treestrat/hclust.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <limits>
#include <numeric>

namespace treestrat {

Linkage linkage_from_string(const std::string& s) {
    if (s == "single") return Linkage::single;
    if (s == "complete") return Linkage::complete;
    if (s == "average") return Linkage::average;
    if (s == "ward") return Linkage::ward;
    throw ValidationError("unknown linkage '" + s + "' (single|complete|average|ward)");
}

std::string to_string(Linkage linkage) {
    switch (linkage) {
        case Linkage::single: return "single";
        case Linkage::complete: return "complete";
        case Linkage::average: return "average";
        case Linkage::ward: return "ward";
    }
    return "?";
}

DistanceMatrix pairwise_metric(const PointCloud& cloud) {
    if (cloud.size() < 1) throw ValidationError("point cloud is empty");
    if (cloud.points.hasNaN()) throw ValidationError("point cloud contains NaN entries");
    std::vector<std::string> ids = cloud.ids;
    if (ids.empty())
        for (int i = 0; i < cloud.size(); ++i) ids.push_back(std::to_string(i));
    DistanceMatrix m(cloud.size(), ids);
    for (int i = 0; i < cloud.size(); ++i)
        for (int j = i + 1; j < cloud.size(); ++j)
            m.set(i, j, (cloud.points.row(i) - cloud.points.row(j)).norm());
    return m;
}

double linkage_distance(const std::vector<int>& k1, const std::vector<int>& k2,
                        const DistanceMatrix& base, Linkage linkage) {
    if (k1.empty() || k2.empty()) throw ValidationError("linkage over an empty cluster");
    for (int a : k1)
        for (int b : k2)
            if (a == b) throw ValidationError("linkage clusters must be disjoint");
    switch (linkage) {
        case Linkage::single: {
            double best = std::numeric_limits<double>::infinity();
            for (int a : k1)
                for (int b : k2) best = std::min(best, base(a, b));
            return best;
        }
        case Linkage::complete: {
            double best = 0.0;
            for (int a : k1)
                for (int b : k2) best = std::max(best, base(a, b));
            return best;
        }
        case Linkage::average: {
            double s = 0.0;
            for (int a : k1)
                for (int b : k2) s += base(a, b);
            return s / (static_cast<double>(k1.size()) * static_cast<double>(k2.size()));
        }
        case Linkage::ward: {
            // squared-gap closed form; equals the Lance-Williams recurrence
            // value for clusters grown from singletons
            const double na = static_cast<double>(k1.size());
            const double nb = static_cast<double>(k2.size());
            double sab = 0.0, saa = 0.0, sbb = 0.0;
            for (int a : k1)
                for (int b : k2) sab += base(a, b) * base(a, b);
            for (size_t i = 0; i < k1.size(); ++i)
                for (size_t j = i + 1; j < k1.size(); ++j)
                    saa += base(k1[i], k1[j]) * base(k1[i], k1[j]);
            for (size_t i = 0; i < k2.size(); ++i)
                for (size_t j = i + 1; j < k2.size(); ++j)
                    sbb += base(k2[i], k2[j]) * base(k2[i], k2[j]);
            const double gap2 = sab / (na * nb) - saa / (na * na) - sbb / (nb * nb);
            return std::sqrt(std::max(0.0, 2.0 * na * nb / (na + nb) * gap2));
        }
    }
    throw ValidationError("unknown linkage");
}

std::vector<MergeStep> agglomerate(const DistanceMatrix& d, Linkage linkage,
                                   const std::vector<int>& sizes) {
    const int n = d.size();
    if (n < 1) throw ValidationError("agglomerate needs at least one item");
    if (!sizes.empty() && static_cast<int>(sizes.size()) != n)
        throw ValidationError("size vector does not match matrix");
    const bool squared = linkage == Linkage::ward;
    const int total = 2 * n - 1;
    std::vector<double> dist(static_cast<size_t>(total) * total, 0.0);
    auto at = [&](int i, int j) -> double& { return dist[static_cast<size_t>(i) * total + j]; };
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j) at(i, j) = squared ? d(i, j) * d(i, j) : d(i, j);
    std::vector<double> size(total, 1.0);
    for (int i = 0; i < n; ++i) size[i] = sizes.empty() ? 1.0 : sizes[i];
    std::vector<char> active(total, 0);
    std::vector<int> alive;
    for (int i = 0; i < n; ++i) {
        active[i] = 1;
        alive.push_back(i);
    }

    std::vector<MergeStep> steps;
    steps.reserve(n - 1);
    for (int t = 0; t < n - 1; ++t) {
        int bi = -1, bj = -1;
        double best = std::numeric_limits<double>::infinity();
        for (size_t x = 0; x < alive.size(); ++x) {
            for (size_t y = x + 1; y < alive.size(); ++y) {
                const int i = alive[x], j = alive[y];
                const double v = at(i, j);
                if (v < best) {
                    best = v;
                    bi = i;
                    bj = j;
                }
            }
        }
        const int m = n + t;
        const double height = squared ? std::sqrt(std::max(0.0, best)) : best;
        steps.push_back({bi, bj, height, static_cast<int>(size[bi] + size[bj])});
        size[m] = size[bi] + size[bj];
        for (int k : alive) {
            if (k == bi || k == bj) continue;
            double v;
            switch (linkage) {
                case Linkage::single: v = std::min(at(bi, k), at(bj, k)); break;
                case Linkage::complete: v = std::max(at(bi, k), at(bj, k)); break;
                case Linkage::average:
                    v = (size[bi] * at(bi, k) + size[bj] * at(bj, k)) / (size[bi] + size[bj]);
                    break;
                case Linkage::ward: {
                    const double si = size[bi], sj = size[bj], sk = size[k];
                    v = ((si + sk) * at(bi, k) + (sj + sk) * at(bj, k) - sk * at(bi, bj)) /
                        (si + sj + sk);
                    break;
                }
                default: throw ValidationError("unknown linkage");
            }
            at(m, k) = at(k, m) = v;
        }
        active[bi] = active[bj] = 0;
        active[m] = 1;
        alive.erase(std::remove_if(alive.begin(), alive.end(),
                                   [&](int x) { return x == bi || x == bj; }),
                    alive.end());
        alive.push_back(m);
    }
    return steps;
}

namespace {

struct ZeroGroups {
    std::vector<int> representative; // group index per point
    std::vector<std::vector<int>> members;
};

ZeroGroups merge_coincident(const DistanceMatrix& d) {
    const int n = d.size();
    std::vector<int> uf(n);
    std::iota(uf.begin(), uf.end(), 0);
    std::function<int(int)> find = [&](int x) { return uf[x] == x ? x : uf[x] = find(uf[x]); };
    for (int i = 0; i < n; ++i)
        for (int j = i + 1; j < n; ++j)
            if (d(i, j) == 0.0) uf[find(j)] = find(i);
    ZeroGroups g;
    g.representative.assign(n, -1);
    std::vector<int> group_of_root(n, -1);
    for (int i = 0; i < n; ++i) {
        const int r = find(i);
        if (group_of_root[r] < 0) {
            group_of_root[r] = static_cast<int>(g.members.size());
            g.members.push_back({});
        }
        g.representative[i] = group_of_root[r];
        g.members[group_of_root[r]].push_back(i);
    }
    return g;
}

// Merges at exactly equal heights (and, for the provably monotone linkages,
// sub-ulp height dips from the Lance-Williams updates) collapse into one
// multi-way vertex.
MergeTree tree_from_steps(const std::vector<MergeStep>& steps, int n_leaves,
                          std::vector<std::string> leaf_labels, bool ward) {
    const int total = 2 * n_leaves - 1;
    std::vector<VertexId> father(total, -1);
    std::vector<double> height(total, 0.0);
    std::vector<std::string> labels(total);
    for (int i = 0; i < n_leaves; ++i) labels[i] = std::move(leaf_labels[i]);
    for (size_t t = 0; t < steps.size(); ++t) {
        const int m = n_leaves + static_cast<int>(t);
        father[steps[t].left] = m;
        father[steps[t].right] = m;
        height[m] = steps[t].height;
    }
    if (ward) {
        for (size_t t = 0; t < steps.size(); ++t) {
            const int m = n_leaves + static_cast<int>(t);
            for (int c : {steps[t].left, steps[t].right})
                if (c >= n_leaves && height[c] > height[m])
                    throw ValidationError(
                        "ward linkage produced a height inversion at merge " + std::to_string(t) +
                        " (child height " + std::to_string(height[c]) + " > father height " +
                        std::to_string(height[m]) + ")");
        }
    }
    std::vector<char> keep(total, 1);
    bool changed = true;
    while (changed) {
        changed = false;
        std::vector<int> cur(total, -1);
        for (int v = 0; v < total; ++v) {
            if (!keep[v] || father[v] < 0) continue;
            int u = father[v];
            while (u >= 0 && !keep[u]) u = father[u];
            cur[v] = u;
        }
        for (int v = n_leaves; v < total; ++v) {
            if (!keep[v] || cur[v] < 0) continue;
            const bool tie = height[v] == height[cur[v]];
            const bool dip = !ward && height[v] >= height[cur[v]];
            if (tie || dip) {
                keep[v] = 0;
                changed = true;
            }
        }
    }
    std::vector<int> dense(total, -1);
    int next = 0;
    for (int v = 0; v < total; ++v)
        if (keep[v]) dense[v] = next++;
    std::vector<VertexId> fa(next, -1);
    std::vector<double> h(next);
    std::vector<std::string> lab(next);
    for (int v = 0; v < total; ++v) {
        if (!keep[v]) continue;
        h[dense[v]] = height[v];
        lab[dense[v]] = labels[v];
        int u = father[v];
        while (u >= 0 && !keep[u]) u = father[u];
        fa[dense[v]] = u < 0 ? -1 : dense[u];
    }
    return MergeTree::from_parents(std::move(fa), std::move(h), std::move(lab));
}

} // namespace

MergeTree build_dendrogram(const PointCloud& cloud, Linkage linkage) {
    if (cloud.size() < 1) throw ValidationError("point cloud is empty");
    const DistanceMatrix full = pairwise_metric(cloud);
    const ZeroGroups groups = merge_coincident(full);
    const int g = static_cast<int>(groups.members.size());

    auto label_of_group = [&](int gi) {
        std::string lab;
        for (size_t k = 0; k < groups.members[gi].size(); ++k) {
            if (k) lab += '+';
            const int p = groups.members[gi][k];
            lab += cloud.ids.empty() ? std::to_string(p) : cloud.ids[p];
        }
        return lab;
    };

    if (g == 1) {
        MergeTree t = MergeTree::single_vertex(0.0);
        return MergeTree::from_parents(t.fathers(), t.heights(), {label_of_group(0)});
    }

    DistanceMatrix reduced(g);
    std::vector<int> sizes(g);
    for (int a = 0; a < g; ++a) {
        sizes[a] = static_cast<int>(groups.members[a].size());
        for (int b = a + 1; b < g; ++b)
            reduced.set(a, b, full(groups.members[a][0], groups.members[b][0]));
    }
    const auto steps = agglomerate(reduced, linkage, sizes);
    std::vector<std::string> labels(g);
    for (int a = 0; a < g; ++a) labels[a] = label_of_group(a);
    return tree_from_steps(steps, g, std::move(labels), linkage == Linkage::ward);
}

double hausdorff(const PointCloud& a, const PointCloud& b) {
    if (a.size() < 1 || b.size() < 1) throw ValidationError("hausdorff over an empty cloud");
    if (a.dim() != b.dim()) throw ValidationError("hausdorff dimension mismatch");
    auto directed = [](const PointCloud& x, const PointCloud& y) {
        double worst = 0.0;
        for (int i = 0; i < x.size(); ++i) {
            double nearest = std::numeric_limits<double>::infinity();
            for (int j = 0; j < y.size(); ++j)
                nearest = std::min(nearest, (x.points.row(i) - y.points.row(j)).norm());
            worst = std::max(worst, nearest);
        }
        return worst;
    };
    return std::max(directed(a, b), directed(b, a));
}

} // namespace treestrat
