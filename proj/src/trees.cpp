#include "treestrat/trees.hpp"

#include <algorithm>
#include <cstdio>
#include <map>
#include <set>
#include <sstream>

#include <nlohmann/json.hpp>

namespace treestrat {

namespace {

std::string hex_double(double x) {
    char buf[40];
    std::snprintf(buf, sizeof(buf), "%a", x);
    return buf;
}

void add(ValidationReport& r, Violation::Kind k, std::string msg) {
    r.violations.push_back({k, std::move(msg)});
}

} // namespace

std::string ValidationReport::to_string() const {
    if (ok()) return "valid";
    std::ostringstream os;
    for (size_t i = 0; i < violations.size(); ++i) {
        if (i) os << "; ";
        os << violations[i].message;
    }
    return os.str();
}

ValidationReport validate(const std::vector<VertexId>& father, const std::vector<double>& height) {
    ValidationReport r;
    const int n = static_cast<int>(father.size());
    if (n == 0) {
        add(r, Violation::Kind::empty, "tree has no vertices");
        return r;
    }
    if (height.size() != father.size()) {
        add(r, Violation::Kind::unknown_vertex, "height array size differs from vertex count");
        return r;
    }
    int roots = 0;
    for (int v = 0; v < n; ++v) {
        if (father[v] < 0) {
            ++roots;
            continue;
        }
        if (father[v] >= n) {
            add(r, Violation::Kind::unknown_vertex,
                "vertex " + std::to_string(v) + " names missing father " + std::to_string(father[v]));
        }
    }
    if (roots == 0) add(r, Violation::Kind::cycle, "no root vertex (every vertex has a father)");
    if (roots > 1) add(r, Violation::Kind::disconnected, std::to_string(roots) + " root vertices");
    if (!r.ok()) return r;

    // Walk father chains; a chain that exceeds n steps has a cycle.
    for (int v = 0; v < n; ++v) {
        int u = v, steps = 0;
        while (father[u] >= 0 && steps <= n) {
            u = father[u];
            ++steps;
        }
        if (steps > n) {
            add(r, Violation::Kind::cycle, "cycle through vertex " + std::to_string(v));
            return r;
        }
    }
    for (int v = 0; v < n; ++v) {
        if (father[v] >= 0 && !(height[father[v]] - height[v] > 0.0)) {
            add(r, Violation::Kind::nonpositive_weight,
                "non-positive weight on edge (" + std::to_string(v) + "," + std::to_string(father[v]) + ")");
        }
    }
    return r;
}

ValidationReport validate(const TreeData& data) {
    ValidationReport r;
    if (data.vertices.empty()) {
        add(r, Violation::Kind::empty, "tree has no vertices");
        return r;
    }
    std::map<long long, int> index;
    for (size_t i = 0; i < data.vertices.size(); ++i) {
        if (!index.emplace(data.vertices[i].id, static_cast<int>(i)).second)
            add(r, Violation::Kind::duplicate_vertex,
                "duplicate vertex id " + std::to_string(data.vertices[i].id));
    }
    if (!index.count(data.root))
        add(r, Violation::Kind::unknown_vertex, "root id " + std::to_string(data.root) + " is not a vertex");
    std::map<long long, long long> father;
    for (const auto& [child, fa] : data.edges) {
        if (!index.count(child))
            add(r, Violation::Kind::unknown_vertex,
                "edge names missing child vertex " + std::to_string(child));
        if (!index.count(fa))
            add(r, Violation::Kind::unknown_vertex,
                "edge names missing father vertex " + std::to_string(fa));
        if (index.count(child) && !father.emplace(child, fa).second)
            add(r, Violation::Kind::multiple_fathers,
                "vertex " + std::to_string(child) + " has multiple fathers");
    }
    if (!r.ok()) return r;
    if (father.count(data.root))
        add(r, Violation::Kind::root_has_father, "root " + std::to_string(data.root) + " has a father");
    for (const auto& v : data.vertices) {
        if (v.id != data.root && !father.count(v.id))
            add(r, Violation::Kind::disconnected,
                "vertex " + std::to_string(v.id) + " has no father and is not the root");
    }
    if (!r.ok()) return r;

    std::vector<VertexId> fa(data.vertices.size(), -1);
    std::vector<double> h(data.vertices.size(), 0.0);
    // Dense ids in ascending original-id order keeps relabelling deterministic.
    std::vector<long long> ordered;
    ordered.reserve(index.size());
    for (const auto& [id, _] : index) ordered.push_back(id);
    std::map<long long, int> dense;
    for (size_t i = 0; i < ordered.size(); ++i) dense[ordered[i]] = static_cast<int>(i);
    for (const auto& v : data.vertices) h[dense[v.id]] = v.height;
    for (const auto& [child, f] : father) fa[dense[child]] = dense[f];
    auto rr = validate(fa, h);
    r.violations.insert(r.violations.end(), rr.violations.begin(), rr.violations.end());
    return r;
}

MergeTree MergeTree::from_parents(std::vector<VertexId> father, std::vector<double> height,
                                  std::vector<std::string> label) {
    auto report = validate(father, height);
    if (!report.ok()) throw ValidationError("invalid merge tree: " + report.to_string());
    MergeTree t;
    t.father_ = std::move(father);
    t.height_ = std::move(height);
    t.label_ = std::move(label);
    t.label_.resize(t.father_.size());
    t.children_.assign(t.father_.size(), {});
    for (int v = 0; v < t.n(); ++v) {
        if (t.father_[v] < 0)
            t.root_ = v;
        else
            t.children_[t.father_[v]].push_back(v);
    }
    return t;
}

MergeTree MergeTree::from_data(const TreeData& data) {
    auto report = validate(data);
    if (!report.ok()) throw ValidationError("invalid merge tree: " + report.to_string());
    std::map<long long, int> dense;
    for (const auto& v : data.vertices) dense[v.id]; // ordered keys
    int next = 0;
    for (auto& [id, d] : dense) d = next++;
    std::vector<VertexId> fa(data.vertices.size(), -1);
    std::vector<double> h(data.vertices.size(), 0.0);
    std::vector<std::string> lab(data.vertices.size());
    for (const auto& v : data.vertices) {
        h[dense[v.id]] = v.height;
        lab[dense[v.id]] = v.label;
    }
    for (const auto& [child, f] : data.edges) fa[dense[child]] = dense[f];
    return from_parents(std::move(fa), std::move(h), std::move(lab));
}

MergeTree MergeTree::single_vertex(double height) {
    return from_parents({-1}, {height});
}

int MergeTree::leaf_count() const {
    int c = 0;
    for (int v = 0; v < n(); ++v)
        if (is_leaf(v)) ++c;
    return c;
}

std::vector<VertexId> MergeTree::leaves() const {
    std::vector<VertexId> out;
    for (int v = 0; v < n(); ++v)
        if (is_leaf(v)) out.push_back(v);
    return out;
}

bool MergeTree::is_dendrogram() const {
    for (int v = 0; v < n(); ++v)
        if (is_leaf(v) && height_[v] != 0.0) return false;
    return true;
}

bool is_canonical(const MergeTree& t) {
    for (int v = 0; v < t.n(); ++v)
        if (v != t.root() && t.children(v).size() == 1) return false;
    return true;
}

MergeTree canonicalize(const MergeTree& t) {
    // Splicing an order-2 vertex never changes its father's child count, so a
    // single pass finds all survivors.
    const int n = t.n();
    std::vector<char> keep(n, 0);
    for (int v = 0; v < n; ++v)
        keep[v] = (v == t.root() || t.children(v).size() != 1) ? 1 : 0;
    std::vector<int> dense(n, -1);
    int next = 0;
    for (int v = 0; v < n; ++v)
        if (keep[v]) dense[v] = next++;
    std::vector<VertexId> fa(next, -1);
    std::vector<double> h(next, 0.0);
    std::vector<std::string> lab(next);
    for (int v = 0; v < n; ++v) {
        if (!keep[v]) continue;
        h[dense[v]] = t.height(v);
        lab[dense[v]] = t.label(v);
        int u = t.father(v);
        while (u >= 0 && !keep[u]) u = t.father(u);
        fa[dense[v]] = u < 0 ? -1 : dense[u];
    }
    return MergeTree::from_parents(std::move(fa), std::move(h), std::move(lab));
}

double total_weight(const MergeTree& t) {
    double s = 0.0;
    for (int v = 0; v < t.n(); ++v)
        if (v != t.root()) s += t.weight(v);
    return s;
}

namespace {

std::string signature_rec(const MergeTree& t, VertexId v, bool use_heights) {
    std::vector<std::string> child_sigs;
    child_sigs.reserve(t.children(v).size());
    for (VertexId c : t.children(v)) child_sigs.push_back(signature_rec(t, c, use_heights));
    std::sort(child_sigs.begin(), child_sigs.end());
    std::string s;
    if (use_heights)
        s += hex_double(t.height(v));
    else if (v != t.root())
        s += hex_double(t.weight(v));
    s += '[';
    for (const auto& cs : child_sigs) {
        s += cs;
        s += ',';
    }
    s += ']';
    return s;
}

} // namespace

std::string shape_signature(const MergeTree& t) { return signature_rec(t, t.root(), false); }
std::string height_signature(const MergeTree& t) { return signature_rec(t, t.root(), true); }

bool isomorphic_shapes(const MergeTree& a, const MergeTree& b) {
    return shape_signature(a) == shape_signature(b);
}

bool isomorphic_with_heights(const MergeTree& a, const MergeTree& b) {
    return height_signature(a) == height_signature(b);
}

TreeData to_data(const MergeTree& t) {
    TreeData d;
    d.root = t.root();
    for (int v = 0; v < t.n(); ++v)
        d.vertices.push_back({v, t.height(v), t.label(v)});
    for (int v = 0; v < t.n(); ++v)
        if (v != t.root()) d.edges.emplace_back(v, t.father(v));
    return d;
}

std::string serialize(const MergeTree& t) {
    nlohmann::json j;
    j["root"] = t.root();
    auto& vs = j["vertices"] = nlohmann::json::array();
    for (int v = 0; v < t.n(); ++v) {
        nlohmann::json jv{{"id", v}, {"height", t.height(v)}};
        if (!t.label(v).empty()) jv["label"] = t.label(v);
        vs.push_back(std::move(jv));
    }
    auto& es = j["edges"] = nlohmann::json::array();
    for (int v = 0; v < t.n(); ++v)
        if (v != t.root()) es.push_back({v, t.father(v)});
    return j.dump(2) + "\n";
}

MergeTree parse(const std::string& text) {
    nlohmann::json j;
    try {
        j = nlohmann::json::parse(text);
    } catch (const nlohmann::json::parse_error& e) {
        throw ValidationError(std::string("tree parse error: ") + e.what());
    }
    TreeData d;
    try {
        d.root = j.at("root").get<long long>();
        for (const auto& jv : j.at("vertices")) {
            TreeData::Vertex v;
            v.id = jv.at("id").get<long long>();
            v.height = jv.at("height").get<double>();
            if (jv.contains("label")) v.label = jv["label"].get<std::string>();
            d.vertices.push_back(std::move(v));
        }
        for (const auto& je : j.at("edges"))
            d.edges.emplace_back(je.at(0).get<long long>(), je.at(1).get<long long>());
    } catch (const nlohmann::json::exception& e) {
        throw ValidationError(std::string("tree schema error: ") + e.what());
    }
    return MergeTree::from_data(d);
}

namespace {

void newick_rec(const MergeTree& t, VertexId v, std::string& out) {
    if (!t.is_leaf(v)) {
        out += '(';
        const auto& ch = t.children(v);
        for (size_t i = 0; i < ch.size(); ++i) {
            if (i) out += ',';
            newick_rec(t, ch[i], out);
        }
        out += ')';
    }
    out += t.label(v).empty() ? "v" + std::to_string(v) : t.label(v);
    if (v != t.root()) {
        char buf[40];
        std::snprintf(buf, sizeof(buf), "%.17g", t.weight(v));
        out += ':';
        out += buf;
    }
}

} // namespace

std::string to_newick(const MergeTree& t) {
    std::string out;
    newick_rec(t, t.root(), out);
    out += ";";
    return out;
}

} // namespace treestrat
