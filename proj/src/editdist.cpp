#include "treestrat/editdist.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <cstdint>
#include <cstdio>
#include <limits>
#include <map>
#include <string>
#include <unordered_map>

#include <gsl/gsl_cdf.h>
#include <gsl/gsl_errno.h>

namespace treestrat {

// ---------------------------------------------------------------------------
// PruningMeasure

namespace {

const bool gsl_handler_disabled = [] {
    gsl_set_error_handler_off();
    return true;
}();

} // namespace

double PruningMeasure::total_mass() const {
    if (family_ == Family::beta) return 1.0;
    double s = 0.0;
    for (const auto& [p, m] : masses_) s += m;
    return s;
}

double PruningMeasure::cdf_left(double x) const {
    if (family_ == Family::beta) {
        if (x <= 0.0) return 0.0;
        if (x >= 1.0) return 1.0;
        return gsl_cdf_beta_P(x, alpha_, beta_);
    }
    double s = 0.0;
    for (const auto& [p, m] : masses_) {
        if (p < x)
            s += m;
        else
            break;
    }
    return s;
}

double PruningMeasure::interval_mass(double lo, double hi) const {
    if (std::isinf(hi)) return total_mass() - cdf_left(lo);
    return cdf_left(hi) - cdf_left(lo);
}

double PruningMeasure::quantile(double p) const {
    const double total = total_mass();
    if (!(p > 0.0) || p > total * (1.0 + 1e-12))
        throw ValidationError("measure quantile argument out of range");
    if (family_ == Family::beta) {
        double q = std::min(p, 1.0 - 1e-16);
        return gsl_cdf_beta_Pinv(q, alpha_, beta_);
    }
    double s = 0.0;
    for (const auto& [pos, m] : masses_) {
        s += m;
        if (s >= p - 1e-15 * total) return pos;
    }
    return masses_.back().first;
}

PruningMeasure beta_measure(double alpha, double beta) {
    if (!(alpha > 0.0) || !(beta > 0.0))
        throw ValidationError("beta measure requires positive shape parameters");
    PruningMeasure mu;
    mu.family_ = PruningMeasure::Family::beta;
    mu.alpha_ = alpha;
    mu.beta_ = beta;
    return mu;
}

PruningMeasure uniform_grid_measure(int points) {
    if (points < 1) throw ValidationError("uniform grid measure needs at least one point");
    PruningMeasure mu;
    mu.family_ = PruningMeasure::Family::uniform_grid;
    for (int j = 1; j <= points; ++j)
        mu.masses_.emplace_back((j - 0.5) / points, 1.0 / points);
    return mu;
}

PruningMeasure point_mass_measure(std::vector<std::pair<double, double>> masses) {
    if (masses.empty()) throw ValidationError("point mass measure needs at least one mass");
    for (const auto& [p, m] : masses) {
        if (p < 0.0 || p > 1.0) throw ValidationError("point mass position outside [0,1]");
        if (!(m > 0.0)) throw ValidationError("point masses must be positive");
    }
    std::sort(masses.begin(), masses.end());
    PruningMeasure mu;
    mu.family_ = PruningMeasure::Family::point_mass_list;
    mu.masses_ = std::move(masses);
    return mu;
}

// ---------------------------------------------------------------------------
// Exact edit distance: branch and bound over chain mappings.
//
// A mapping keeps a subset of edges on each side, grouped into descending
// chains (consecutive edges merged by free ghosting, with the side subtrees
// of ghosted vertices deleted entirely); kept chains are matched one to one
// preserving ancestry, costing |chain weight difference|, and every unmatched
// edge pays its own weight. The search state is a pair of "dangling edge"
// sets, one per side, encoded as vertex bitmasks.

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

struct ChainEnd {
    int u;          // chain tail vertex
    double addw;    // weight added below the starting edge
    double side;    // total weight of subtrees deleted off ghosted vertices
};

struct Side {
    int n = 0;
    int root = 0;
    std::vector<double> w;        // father-edge weight (0 for root)
    std::vector<double> subtotal; // total edge weight strictly inside subtree
    std::vector<double> twe;      // w + subtotal
    std::vector<std::uint64_t> cmask;
    std::vector<std::vector<int>> children;
    std::vector<std::vector<ChainEnd>> chains;
    std::vector<int> sig; // interned weighted-subtree signature (incl. father edge)

    void build(const MergeTree& t) {
        n = t.n();
        root = t.root();
        w.assign(n, 0.0);
        subtotal.assign(n, 0.0);
        twe.assign(n, 0.0);
        cmask.assign(n, 0);
        children.assign(n, {});
        for (int v = 0; v < n; ++v) {
            children[v] = t.children(v);
            if (v != root) w[v] = t.weight(v);
        }
        // vertices ordered so that children follow fathers is not guaranteed;
        // accumulate subtotals by repeated sweeps over height order instead.
        std::vector<int> order(n);
        for (int i = 0; i < n; ++i) order[i] = i;
        std::sort(order.begin(), order.end(),
                  [&](int a, int b) { return t.height(a) < t.height(b); });
        for (int v : order) {
            twe[v] = w[v] + subtotal[v];
            if (v != root) subtotal[t.father(v)] += twe[v];
        }
        for (int v = 0; v < n; ++v) {
            std::uint64_t m = 0;
            for (int c : children[v]) m |= 1ULL << c;
            cmask[v] = m;
        }
        chains.assign(n, {});
        for (int v = 0; v < n; ++v) enumerate_chains(v, v, 0.0, 0.0);
    }

    void enumerate_chains(int start, int at, double addw, double side) {
        chains[start].push_back({at, addw, side});
        for (int c : children[at])
            enumerate_chains(start, c, addw + w[c], side + (subtotal[at] - twe[c]));
    }
};

std::string vertex_signature(const MergeTree& t, int v, std::vector<std::string>& memo) {
    if (!memo[v].empty()) return memo[v];
    std::vector<std::string> cs;
    for (int c : t.children(v)) cs.push_back(vertex_signature(t, c, memo));
    std::sort(cs.begin(), cs.end());
    char buf[40];
    double w = v == t.root() ? 0.0 : t.weight(v);
    std::snprintf(buf, sizeof(buf), "%a[", w);
    std::string s = buf;
    for (auto& c : cs) {
        s += c;
        s += ',';
    }
    s += ']';
    return memo[v] = s;
}

struct Entry {
    double bound = 0.0;
    bool exact = false;
};

struct MaskKey {
    std::uint64_t a, b;
    bool operator==(const MaskKey& o) const { return a == o.a && b == o.b; }
};

struct MaskKeyHash {
    std::size_t operator()(const MaskKey& k) const {
        std::uint64_t x = k.a * 0x9e3779b97f4a7c15ULL ^ (k.b + 0xbf58476d1ce4e5b9ULL);
        x ^= x >> 29;
        x *= 0x94d049bb133111ebULL;
        return static_cast<std::size_t>(x ^ (x >> 32));
    }
};

class EditSearch {
public:
    EditSearch(const MergeTree& ta, const MergeTree& tb) : ta_(ta), tb_(tb) {
        A_.build(ta);
        B_.build(tb);
        intern_signatures();
        cm_.assign(static_cast<size_t>(A_.n) * B_.n, -1.0);
        cp_.assign(static_cast<size_t>(A_.n) * B_.n, -1.0);
    }

    double run() {
        // The constrained matching (no subtree splitting) is a feasible
        // mapping, so it seeds a tight incumbent for the exact search.
        double ub = std::min(constrained_forest(A_.root, B_.root),
                             A_.subtotal[A_.root] + B_.subtotal[B_.root]);
        ub += 1e-9 * (1.0 + ub); // strictly above a feasible cost, so the result is exact
        const double twa = A_.subtotal[A_.root];
        const double twb = B_.subtotal[B_.root];
        return forest(A_.cmask[A_.root], B_.cmask[B_.root], twa, twb, ub);
    }

private:
    void intern_signatures() {
        std::vector<std::string> ma(A_.n), mb(B_.n);
        std::map<std::string, int> ids;
        A_.sig.resize(A_.n);
        B_.sig.resize(B_.n);
        for (int v = 0; v < A_.n; ++v)
            A_.sig[v] = ids.emplace(vertex_signature(ta_, v, ma), (int)ids.size()).first->second;
        for (int v = 0; v < B_.n; ++v)
            B_.sig[v] = ids.emplace(vertex_signature(tb_, v, mb), (int)ids.size()).first->second;
    }

    // ---- constrained upper bound: subtree-to-subtree matching only --------

    // cost of matching the forests below corresponding (u, v) when every kept
    // chain stays inside one child subtree pair
    double constrained_forest(int u, int v) {
        double& slot = cm_[static_cast<size_t>(u) * B_.n + v];
        if (slot >= 0.0) return slot;
        const auto& ca = A_.children[u];
        const auto& cb = B_.children[v];
        double value;
        if (ca.empty()) {
            value = B_.subtotal[v];
        } else if (cb.empty()) {
            value = A_.subtotal[u];
        } else if (ca.size() <= 12 && cb.size() <= 12) {
            // assignment over child pairs, deletions allowed, exact over the
            // smaller side's subsets
            const bool a_small = ca.size() <= cb.size();
            const auto& small = a_small ? ca : cb;
            const auto& large = a_small ? cb : ca;
            const Side& sside = a_small ? A_ : B_;
            const Side& lside = a_small ? B_ : A_;
            const unsigned full = (1u << large.size()) - 1;
            std::vector<double> dp(full + 1, kInf);
            dp[0] = 0.0;
            for (size_t i = 0; i < small.size(); ++i) {
                std::vector<double> next(full + 1, kInf);
                for (unsigned mask = 0; mask <= full; ++mask) {
                    if (dp[mask] == kInf) continue;
                    // delete the small-side subtree
                    next[mask] = std::min(next[mask], dp[mask] + sside.twe[small[i]]);
                    for (size_t j = 0; j < large.size(); ++j) {
                        if (mask & (1u << j)) continue;
                        const double pc = a_small ? constrained_pair(small[i], large[j])
                                                  : constrained_pair(large[j], small[i]);
                        next[mask | (1u << j)] = std::min(next[mask | (1u << j)], dp[mask] + pc);
                    }
                }
                dp.swap(next);
            }
            value = kInf;
            for (unsigned mask = 0; mask <= full; ++mask) {
                if (dp[mask] == kInf) continue;
                double rest = 0.0;
                for (size_t j = 0; j < large.size(); ++j)
                    if (!(mask & (1u << j))) rest += lside.twe[large[j]];
                value = std::min(value, dp[mask] + rest);
            }
        } else {
            // arity past the exact-assignment cap: greedy by subtree weight
            auto sa = ca;
            auto sb = cb;
            std::sort(sa.begin(), sa.end(), [&](int x, int y) { return A_.twe[x] > A_.twe[y]; });
            std::sort(sb.begin(), sb.end(), [&](int x, int y) { return B_.twe[x] > B_.twe[y]; });
            const size_t m = std::min(sa.size(), sb.size());
            value = 0.0;
            for (size_t i = 0; i < m; ++i) value += constrained_pair(sa[i], sb[i]);
            for (size_t i = m; i < sa.size(); ++i) value += A_.twe[sa[i]];
            for (size_t i = m; i < sb.size(); ++i) value += B_.twe[sb[i]];
        }
        return slot = value;
    }

    // constrained cost of matching the father edges of (xa, xb) as chain
    // starts, chains descending with side subtrees deleted
    double constrained_pair(int xa, int xb) {
        double& slot = cp_[static_cast<size_t>(xa) * B_.n + xb];
        if (slot >= 0.0) return slot;
        if (A_.sig[xa] == B_.sig[xb]) return slot = 0.0;
        double best = kInf;
        for (const ChainEnd& pa : A_.chains[xa]) {
            for (const ChainEnd& pb : B_.chains[xb]) {
                const double base = std::abs((A_.w[xa] + pa.addw) - (B_.w[xb] + pb.addw)) +
                                    pa.side + pb.side;
                if (base >= best) continue;
                best = std::min(best, base + constrained_forest(pa.u, pb.u));
            }
        }
        return slot = best;
    }

    bool same_multiset(std::uint64_t a, std::uint64_t b) const {
        int ca[64], cb[64], na = 0, nb = 0;
        for (std::uint64_t m = a; m;) {
            ca[na++] = A_.sig[std::countr_zero(m)];
            m &= m - 1;
        }
        for (std::uint64_t m = b; m;) {
            cb[nb++] = B_.sig[std::countr_zero(m)];
            m &= m - 1;
        }
        if (na != nb) return false;
        std::sort(ca, ca + na);
        std::sort(cb, cb + nb);
        return std::equal(ca, ca + na, cb);
    }

    // ---- exact search ------------------------------------------------------

    // Feasible constrained mapping of a forest state: greedy subtree matching
    // over the constrained-pair table, leftovers deleted/inserted. Used to
    // discard moves whose lower bound already exceeds a known upper bound.
    double greedy_state_ub(std::uint64_t A, std::uint64_t B) {
        int ia[64], ib[64];
        int na = 0, nb = 0;
        for (std::uint64_t m = A; m;) {
            ia[na++] = std::countr_zero(m);
            m &= m - 1;
        }
        for (std::uint64_t m = B; m;) {
            ib[nb++] = std::countr_zero(m);
            m &= m - 1;
        }
        std::sort(ia, ia + na, [&](int x, int y) { return A_.twe[x] > A_.twe[y]; });
        bool used[64] = {};
        double cost = 0.0;
        for (int i = 0; i < na; ++i) {
            int pick = -1;
            double gain = 0.0;
            for (int j = 0; j < nb; ++j) {
                if (used[j]) continue;
                const double g =
                    A_.twe[ia[i]] + B_.twe[ib[j]] - constrained_pair(ia[i], ib[j]);
                if (g > gain) {
                    gain = g;
                    pick = j;
                }
            }
            if (pick < 0) {
                cost += A_.twe[ia[i]];
            } else {
                used[pick] = true;
                cost += constrained_pair(ia[i], ib[pick]);
            }
        }
        for (int j = 0; j < nb; ++j)
            if (!used[j]) cost += B_.twe[ib[j]];
        return cost;
    }

    // Fail-soft: returns the exact value when it is < ub, otherwise a lower
    // bound. twa/twb are the total weights of the two forests, maintained
    // incrementally by the callers.
    double forest(std::uint64_t A, std::uint64_t B, double twa, double twb, double ub) {
        if (!A) return twb;
        if (!B) return twa;
        const double lb = std::abs(twa - twb);
        if (lb >= ub) return lb;
        if (twa == twb && same_multiset(A, B)) return 0.0;

        const MaskKey key{A, B};
        auto it = fmemo_.find(key);
        if (it != fmemo_.end()) {
            if (it->second.exact) return it->second.bound;
            if (it->second.bound >= ub) return it->second.bound;
        }

        // moves whose lower bound exceeds a feasible cost of this state can
        // never be minimal and are dropped outright
        const double uc = greedy_state_ub(A, B);
        const double dominated = uc + 1e-12 * (1.0 + uc);

        // anchor: the dangling subtree of A with the largest total weight
        int a0 = -1;
        double besttwe = -1.0;
        for (std::uint64_t m = A; m;) {
            const int v = std::countr_zero(m);
            m &= m - 1;
            if (A_.twe[v] > besttwe) {
                besttwe = A_.twe[v];
                a0 = v;
            }
        }

        struct Move {
            double lb;
            int kind; // 0: match a0-b, 1: delete a0 top, 2: delete b top
            int b;
        };
        Move moves[130];
        int nmoves = 0;
        for (std::uint64_t m = B; m;) {
            const int b = std::countr_zero(m);
            m &= m - 1;
            const double rest = std::abs((twa - A_.twe[a0]) - (twb - B_.twe[b]));
            const double pair_lb = A_.sig[a0] == B_.sig[b]
                                       ? 0.0
                                       : std::abs(A_.twe[a0] - B_.twe[b]);
            moves[nmoves++] = {pair_lb + rest, 0, b};
            moves[nmoves++] = {B_.w[b] + std::abs(twa - (twb - B_.w[b])), 2, b};
        }
        moves[nmoves++] = {A_.w[a0] + std::abs((twa - A_.w[a0]) - twb), 1, -1};
        std::sort(moves, moves + nmoves,
                  [](const Move& x, const Move& y) { return x.lb < y.lb; });

        // `best` tracks computed move bounds; `result` stays a valid lower
        // bound on the state even when the loop stops early, because every
        // skipped move has true cost >= its lb.
        double best = kInf;
        double result = kInf;
        for (int mi = 0; mi < nmoves; ++mi) {
            const Move& mv = moves[mi];
            if (mv.lb >= dominated) break; // never minimal; result keeps its value
            const double cap = std::min(best, ub);
            if (mv.lb >= cap) {
                result = std::min(best, mv.lb);
                break;
            }
            double bound;
            if (mv.kind == 0) {
                const double ra = twa - A_.twe[a0];
                const double rb = twb - B_.twe[mv.b];
                const double rest_lb = std::abs(ra - rb);
                const double pc = paircost(a0, mv.b, cap - rest_lb);
                if (pc + rest_lb >= cap) {
                    bound = pc + rest_lb;
                } else {
                    const double rest =
                        forest(A & ~(1ULL << a0), B & ~(1ULL << mv.b), ra, rb, cap - pc);
                    bound = pc + rest;
                }
            } else if (mv.kind == 1) {
                bound = A_.w[a0] + forest((A & ~(1ULL << a0)) | A_.cmask[a0], B,
                                          twa - A_.w[a0], twb, cap - A_.w[a0]);
            } else {
                bound = B_.w[mv.b] + forest(A, (B & ~(1ULL << mv.b)) | B_.cmask[mv.b], twa,
                                            twb - B_.w[mv.b], cap - B_.w[mv.b]);
            }
            best = std::min(best, bound);
            result = best;
        }
        if (result == kInf) result = lb;
        Entry e{result, result < ub};
        auto [pos, inserted] = fmemo_.emplace(key, e);
        if (!inserted) {
            if (e.exact || e.bound > pos->second.bound) pos->second = e;
        }
        return result;
    }

    // Cost of matching the father edges of xa and xb as the starts of a
    // matched chain pair, including everything below both subtrees.
    double paircost(int xa, int xb, double ub) {
        const double lb = std::abs(A_.twe[xa] - B_.twe[xb]);
        if (lb >= ub) return lb;
        if (A_.sig[xa] == B_.sig[xb]) return 0.0;

        const int key = (xa << 8) | xb;
        auto it = pmemo_.find(key);
        if (it != pmemo_.end()) {
            if (it->second.exact) return it->second.bound;
            if (it->second.bound >= ub) return it->second.bound;
        }

        const double uc = constrained_pair(xa, xb);
        const double dominated = uc + 1e-12 * (1.0 + uc);

        struct Term {
            double lb;
            double base;
            int u, v;
        };
        std::vector<Term> terms;
        terms.reserve(A_.chains[xa].size() * B_.chains[xb].size());
        double skipped_min = kInf; // lower bound over terms never evaluated
        for (const ChainEnd& pa : A_.chains[xa]) {
            for (const ChainEnd& pb : B_.chains[xb]) {
                const double base = std::abs((A_.w[xa] + pa.addw) - (B_.w[xb] + pb.addw)) +
                                    pa.side + pb.side;
                const double tlb =
                    base + std::abs(A_.subtotal[pa.u] - B_.subtotal[pb.u]);
                if (tlb >= dominated) continue; // never minimal
                if (tlb < ub)
                    terms.push_back({tlb, base, pa.u, pb.u});
                else
                    skipped_min = std::min(skipped_min, tlb);
            }
        }
        std::sort(terms.begin(), terms.end(),
                  [](const Term& x, const Term& y) { return x.lb < y.lb; });

        double best = kInf;
        double explored = kInf; // min over computed bounds and skipped lbs
        for (const Term& t : terms) {
            const double cap = std::min(best, ub);
            if (t.lb >= cap) {
                explored = std::min(explored, t.lb);
                break;
            }
            const double r =
                forest(A_.cmask[t.u], B_.cmask[t.v], A_.subtotal[t.u], B_.subtotal[t.v],
                       cap - t.base);
            best = std::min(best, t.base + r);
            explored = std::min(explored, best);
        }
        double result = std::min(explored, skipped_min);
        if (result == kInf) result = lb;
        Entry e{result, result < ub};
        auto [pos, inserted] = pmemo_.emplace(key, e);
        if (!inserted) {
            if (e.exact || e.bound > pos->second.bound) pos->second = e;
        }
        return result;
    }

    const MergeTree& ta_;
    const MergeTree& tb_;
    Side A_, B_;
    std::vector<double> cm_, cp_; // constrained-bound tables
    std::unordered_map<MaskKey, Entry, MaskKeyHash> fmemo_;
    std::unordered_map<int, Entry> pmemo_;
};

void check_edit_input(const MergeTree& t, const EditOptions& opts) {
    if (opts.budget_leaves < 1 || opts.budget_leaves > 32)
        throw ValidationError("budget-leaves must be in [1, 32]");
    if (!is_canonical(t))
        throw ValidationError("edit distance requires canonical trees (no order-2 vertices)");
    const int leaves = t.leaf_count();
    if (leaves > opts.budget_leaves)
        throw BudgetExceededError("edit distance budget exceeded: tree has " +
                                      std::to_string(leaves) + " leaves, budget " +
                                      std::to_string(opts.budget_leaves),
                                  "", "");
}

} // namespace

double edit_distance(const MergeTree& a, const MergeTree& b, const EditOptions& opts) {
    check_edit_input(a, opts);
    check_edit_input(b, opts);
    if (shape_signature(a) == shape_signature(b)) return 0.0;
    EditSearch search(a, b);
    return search.run();
}

// ---------------------------------------------------------------------------
// Pruning operator

MergeTree prune(const MergeTree& t, double eps) {
    if (eps < 0.0) throw ValidationError("prune threshold must be >= 0");
    const MergeTree base = is_canonical(t) ? t : canonicalize(t);
    const int n = base.n();
    const int root = base.root();
    std::vector<char> alive(n, 1);
    std::vector<int> curfather(n);
    for (int v = 0; v < n; ++v) curfather[v] = base.father(v);

    auto alive_children = [&] {
        std::vector<std::vector<int>> ch(n);
        for (int v = 0; v < n; ++v)
            if (alive[v] && v != root) ch[curfather[v]].push_back(v);
        return ch;
    };

    while (true) {
        auto ch = alive_children();
        // candidates grouped by current father
        std::map<int, std::vector<int>> groups;
        for (int v = 0; v < n; ++v) {
            if (!alive[v] || v == root || !ch[v].empty()) continue;
            const double w = base.height(curfather[v]) - base.height(v);
            if (w <= eps) groups[curfather[v]].push_back(v);
        }
        if (groups.empty()) break;
        for (auto& [fa, cand] : groups) {
            if (cand.size() == 1) {
                alive[cand[0]] = 0;
                continue;
            }
            int keep = cand[0];
            double keepw = base.height(fa) - base.height(keep);
            for (size_t i = 1; i < cand.size(); ++i) {
                const double w = base.height(fa) - base.height(cand[i]);
                if (w > keepw) {
                    keep = cand[i];
                    keepw = w;
                }
            }
            for (int v : cand)
                if (v != keep) alive[v] = 0;
        }
        // ghost pass: splice alive non-root vertices left with a single child
        ch = alive_children();
        for (int v = 0; v < n; ++v) {
            if (!alive[v] || v == root || ch[v].size() != 1) continue;
            alive[v] = 0;
        }
        for (int v = 0; v < n; ++v) {
            if (!alive[v] || v == root) continue;
            int u = curfather[v];
            while (u != root && !alive[u]) u = curfather[u];
            curfather[v] = u;
        }
    }

    std::vector<int> dense(n, -1);
    int next = 0;
    for (int v = 0; v < n; ++v)
        if (alive[v]) dense[v] = next++;
    std::vector<VertexId> fa(next, -1);
    std::vector<double> h(next);
    std::vector<std::string> lab(next);
    for (int v = 0; v < n; ++v) {
        if (!alive[v]) continue;
        h[dense[v]] = base.height(v);
        lab[dense[v]] = base.label(v);
        if (v != root) fa[dense[v]] = dense[curfather[v]];
    }
    return MergeTree::from_parents(std::move(fa), std::move(h), std::move(lab));
}

std::vector<double> breakpoints(const MergeTree& a, const MergeTree& b) {
    std::vector<double> vals{0.0};
    for (const MergeTree* t : {&a, &b}) {
        const MergeTree c = is_canonical(*t) ? *t : canonicalize(*t);
        for (int l = 0; l < c.n(); ++l) {
            if (!c.is_leaf(l)) continue;
            for (int u = c.father(l); u >= 0; u = c.father(u)) {
                const double v = c.height(u) - c.height(l);
                if (v > 0.0) vals.push_back(v);
            }
        }
    }
    std::sort(vals.begin(), vals.end());
    vals.erase(std::unique(vals.begin(), vals.end()), vals.end());
    return vals;
}

namespace {

double integrate_over(const MergeTree& a, const MergeTree& b,
                      const std::vector<std::pair<double, double>>& eval_points,
                      const EditOptions& opts) {
    // eval_points: (threshold, mass); repeated pruned shapes share one
    // edit-distance evaluation.
    std::map<std::pair<std::string, std::string>, double> cache;
    double sum = 0.0;
    for (const auto& [eps, mass] : eval_points) {
        if (!(mass > 0.0)) continue;
        const MergeTree pa = prune(a, eps);
        const MergeTree pb = prune(b, eps);
        std::pair<std::string, std::string> key{shape_signature(pa), shape_signature(pb)};
        auto it = cache.find(key);
        double d;
        if (it != cache.end()) {
            d = it->second;
        } else {
            d = edit_distance(pa, pb, opts);
            cache.emplace(std::move(key), d);
        }
        sum += d * mass;
    }
    return sum;
}

} // namespace

double pruned_distance(const MergeTree& a, const MergeTree& b, const PruningMeasure& mu,
                       const EditOptions& opts) {
    if (!(mu.total_mass() > 0.0)) throw ValidationError("measure has no mass");
    const MergeTree ca = is_canonical(a) ? a : canonicalize(a);
    const MergeTree cb = is_canonical(b) ? b : canonicalize(b);
    const auto bps = breakpoints(ca, cb);
    std::vector<std::pair<double, double>> pieces;
    pieces.reserve(bps.size());
    for (size_t k = 0; k < bps.size(); ++k) {
        const double hi = k + 1 < bps.size() ? bps[k + 1] : kInf;
        pieces.emplace_back(bps[k], mu.interval_mass(bps[k], hi));
    }
    return integrate_over(ca, cb, pieces, opts);
}

double quadrature_distance(const MergeTree& a, const MergeTree& b, const PruningMeasure& mu,
                           int points, const EditOptions& opts) {
    if (points < 1) throw ValidationError("quadrature needs at least one point");
    const MergeTree ca = is_canonical(a) ? a : canonicalize(a);
    const MergeTree cb = is_canonical(b) ? b : canonicalize(b);
    const double total = mu.total_mass();
    std::vector<std::pair<double, double>> pieces;
    pieces.reserve(points);
    for (int j = 1; j <= points; ++j)
        pieces.emplace_back(mu.quantile((j - 0.5) / points * total), total / points);
    return integrate_over(ca, cb, pieces, opts);
}

std::vector<MergeTree> rescale_heights(const std::vector<MergeTree>& trees, RescaleMode mode,
                                       double* scale_out) {
    if (scale_out) *scale_out = 1.0;
    if (mode == RescaleMode::none) return trees;
    auto scaled_copy = [](const MergeTree& t, double divisor) {
        std::vector<double> h = t.heights();
        for (double& x : h) x /= divisor;
        return MergeTree::from_parents(t.fathers(), std::move(h), t.labels());
    };
    std::vector<MergeTree> out;
    out.reserve(trees.size());
    if (mode == RescaleMode::per_tree) {
        for (const auto& t : trees) {
            const double m = t.height(t.root());
            out.push_back(m > 0.0 ? scaled_copy(t, m) : t);
        }
        return out;
    }
    double m = 0.0;
    for (const auto& t : trees) m = std::max(m, t.height(t.root()));
    if (m <= 0.0) {
        bool any_edge = false;
        for (const auto& t : trees) any_edge = any_edge || t.n() > 1;
        if (!any_edge) return trees; // nothing to scale
        throw ValidationError("population maximum height is not positive; cannot rescale");
    }
    if (scale_out) *scale_out = m;
    for (const auto& t : trees) out.push_back(scaled_copy(t, m));
    return out;
}

} // namespace treestrat
