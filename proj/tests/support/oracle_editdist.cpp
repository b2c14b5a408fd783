#include "support/oracle_editdist.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <stdexcept>
#include <vector>

namespace testsupport {

namespace {

using treestrat::MergeTree;

constexpr double kInf = std::numeric_limits<double>::infinity();

struct Contracted {
    // local vertex 0 is the root; weights are chain sums
    std::vector<int> father;
    std::vector<double> weight;
    std::vector<std::vector<int>> children;
    double deleted = 0.0; // weight of edges not kept
};

struct TreeEdges {
    const MergeTree* t;
    std::vector<int> edge_vertex; // lower endpoint of each edge
    std::vector<double> w;
    double total = 0.0;
};

TreeEdges index_edges(const MergeTree& t) {
    TreeEdges e{&t, {}, {}, 0.0};
    for (int v = 0; v < t.n(); ++v) {
        if (v == t.root()) continue;
        e.edge_vertex.push_back(v);
        e.w.push_back(t.weight(v));
        e.total += t.weight(v);
    }
    return e;
}

Contracted contract(const TreeEdges& e, unsigned mask) {
    const MergeTree& t = *e.t;
    std::vector<char> present(t.n(), 0);
    present[t.root()] = 1;
    double kept_weight = 0.0;
    for (size_t i = 0; i < e.edge_vertex.size(); ++i) {
        if (mask & (1u << i)) {
            present[e.edge_vertex[i]] = 1;
            kept_weight += e.w[i];
        }
    }
    // father in the deletion-collapsed tree
    std::vector<int> fs(t.n(), -1);
    std::vector<int> child_count(t.n(), 0);
    for (int v = 0; v < t.n(); ++v) {
        if (!present[v] || v == t.root()) continue;
        int u = t.father(v);
        while (!present[u]) u = t.father(u);
        fs[v] = u;
        ++child_count[u];
    }
    // contracted vertices: root plus present vertices that are not ghosted
    std::vector<char> kept(t.n(), 0);
    kept[t.root()] = 1;
    for (int v = 0; v < t.n(); ++v)
        if (present[v] && v != t.root() && child_count[v] != 1) kept[v] = 1;

    Contracted c;
    std::vector<int> local(t.n(), -1);
    local[t.root()] = 0;
    c.father.push_back(-1);
    c.weight.push_back(0.0);
    for (int v = 0; v < t.n(); ++v)
        if (kept[v] && v != t.root()) {
            local[v] = static_cast<int>(c.father.size());
            c.father.push_back(-2); // fixed below
            c.weight.push_back(0.0);
        }
    for (int v = 0; v < t.n(); ++v) {
        if (!kept[v] || v == t.root()) continue;
        // climb the ghost chain, summing the original kept-edge weights
        // (a deleted edge reattaches children without changing their weights)
        double chain = t.weight(v);
        int u = fs[v];
        while (u != t.root() && !kept[u]) {
            chain += t.weight(u);
            u = fs[u];
        }
        c.father[local[v]] = local[u];
        c.weight[local[v]] = chain;
    }
    c.children.assign(c.father.size(), {});
    for (size_t v = 1; v < c.father.size(); ++v) c.children[c.father[v]].push_back(static_cast<int>(v));
    c.deleted = e.total - kept_weight;
    return c;
}

double iso_min_cost(const Contracted& a, int va, const Contracted& b, int vb) {
    const auto& ca = a.children[va];
    const auto& cb = b.children[vb];
    if (ca.size() != cb.size()) return kInf;
    if (ca.empty()) return 0.0;
    std::vector<int> perm(cb.size());
    std::iota(perm.begin(), perm.end(), 0);
    double best = kInf;
    do {
        double cost = 0.0;
        for (size_t i = 0; i < ca.size() && cost < kInf; ++i) {
            const double sub = iso_min_cost(a, ca[i], b, cb[perm[i]]);
            if (sub == kInf) {
                cost = kInf;
                break;
            }
            cost += std::abs(a.weight[ca[i]] - b.weight[cb[perm[i]]]) + sub;
        }
        best = std::min(best, cost);
    } while (std::next_permutation(perm.begin(), perm.end()));
    return best;
}

} // namespace

double oracle_edit_distance(const MergeTree& a, const MergeTree& b) {
    if (a.leaf_count() > 5 || b.leaf_count() > 5)
        throw std::invalid_argument("oracle limited to trees with at most 5 leaves");
    const TreeEdges ea = index_edges(a);
    const TreeEdges eb = index_edges(b);
    if (ea.edge_vertex.size() > 16 || eb.edge_vertex.size() > 16)
        throw std::invalid_argument("oracle limited to 16 edges");

    const unsigned na = 1u << ea.edge_vertex.size();
    const unsigned nb = 1u << eb.edge_vertex.size();
    std::vector<Contracted> cas(na), cbs(nb);
    for (unsigned m = 0; m < na; ++m) cas[m] = contract(ea, m);
    for (unsigned m = 0; m < nb; ++m) cbs[m] = contract(eb, m);

    double best = kInf;
    for (unsigned ma = 0; ma < na; ++ma) {
        const auto& ca = cas[ma];
        if (ca.deleted >= best) continue;
        for (unsigned mb = 0; mb < nb; ++mb) {
            const auto& cb = cbs[mb];
            const double fixed = ca.deleted + cb.deleted;
            if (fixed >= best) continue;
            if (ca.father.size() != cb.father.size()) continue;
            const double match = iso_min_cost(ca, 0, cb, 0);
            if (match < kInf) best = std::min(best, fixed + match);
        }
    }
    return best;
}

} // namespace testsupport
