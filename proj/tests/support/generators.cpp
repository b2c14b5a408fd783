#include "support/generators.hpp"

#include <algorithm>

namespace testsupport {

namespace {

struct Shape {
    std::vector<std::vector<int>> children;
    int make_node() {
        children.emplace_back();
        return static_cast<int>(children.size()) - 1;
    }
};

int build_shape(Shape& s, CounterRng& rng, int leaves, const TreeGenOptions& opts) {
    const int v = s.make_node();
    if (leaves == 1) return v;
    int parts = 2;
    if (leaves >= 3 && rng.uniform01() < opts.ternary_prob) parts = 3;
    parts = std::min(parts, leaves);
    std::vector<int> sizes(parts, 1);
    for (int extra = leaves - parts; extra > 0; --extra) ++sizes[rng.uniform_int(0, parts - 1)];
    for (int p = 0; p < parts; ++p) {
        const int c = build_shape(s, rng, sizes[p], opts);
        s.children[v].push_back(c);
    }
    return v;
}

double assign_heights(const Shape& s, int v, std::vector<double>& height, CounterRng& rng,
                      const TreeGenOptions& opts) {
    if (s.children[v].empty()) {
        height[v] = opts.heterochronous && rng.uniform01() < 0.5
                        ? opts.unit * rng.uniform_int(0, opts.max_increment / 4)
                        : 0.0;
        return height[v];
    }
    double top = 0.0;
    for (int c : s.children[v]) top = std::max(top, assign_heights(s, c, height, rng, opts));
    height[v] = top + opts.unit * rng.uniform_int(1, opts.max_increment);
    return height[v];
}

} // namespace

MergeTree random_canonical_tree(CounterRng& rng, const TreeGenOptions& opts) {
    const int leaves = rng.uniform_int(opts.min_leaves, opts.max_leaves);
    Shape s;
    const int root = build_shape(s, rng, leaves, opts);
    std::vector<double> height(s.children.size(), 0.0);
    assign_heights(s, root, height, rng, opts);
    bool wrap = leaves > 1 && rng.uniform01() < opts.root_chain_prob;
    const int n = static_cast<int>(s.children.size()) + (wrap ? 1 : 0);
    std::vector<int> father(n, -1);
    std::vector<double> h(n, 0.0);
    for (size_t v = 0; v < s.children.size(); ++v) {
        h[v] = height[v];
        for (int c : s.children[v]) father[c] = static_cast<int>(v);
    }
    if (wrap) {
        const int super = n - 1;
        father[root] = super;
        h[super] = height[root] + opts.unit * rng.uniform_int(1, opts.max_increment);
    }
    return MergeTree::from_parents(std::move(father), std::move(h));
}

MergeTree insert_order2(const MergeTree& t, CounterRng& rng) {
    std::vector<int> non_root;
    for (int v = 0; v < t.n(); ++v)
        if (v != t.root()) non_root.push_back(v);
    if (non_root.empty()) return t;
    const int v = non_root[rng.uniform_int(0, static_cast<int>(non_root.size()) - 1)];
    const int fa = t.father(v);
    const double mid = 0.5 * (t.height(v) + t.height(fa));
    std::vector<int> father = t.fathers();
    std::vector<double> h = t.heights();
    std::vector<std::string> lab = t.labels();
    const int ghost = t.n();
    father.push_back(fa);
    h.push_back(mid);
    lab.emplace_back();
    father[v] = ghost;
    return MergeTree::from_parents(std::move(father), std::move(h), std::move(lab));
}

PointCloud random_cloud(CounterRng& rng, int min_n, int max_n, int dim, double sigma) {
    PointCloud cloud;
    const int n = rng.uniform_int(min_n, max_n);
    cloud.points.resize(n, dim);
    for (int i = 0; i < n; ++i)
        for (int c = 0; c < dim; ++c) cloud.points(i, c) = sigma * rng.normal();
    return cloud;
}

} // namespace testsupport
