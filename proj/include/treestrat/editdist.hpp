#pragma once

#include <utility>
#include <vector>

#include "treestrat/trees.hpp"

namespace treestrat {

/// Finite measure on [0,1] weighting pruning thresholds. The beta family is
/// the default; uniform-grid and point-mass-list exist for discretization and
/// degenerate cases (e.g. a point mass at 0 recovers the plain edit distance).
class PruningMeasure {
public:
    enum class Family { beta, uniform_grid, point_mass_list };

    Family family() const { return family_; }
    double alpha() const { return alpha_; }
    double beta() const { return beta_; }
    const std::vector<std::pair<double, double>>& masses() const { return masses_; }

    double total_mass() const;
    /// mu([0, x)) — mass strictly below x.
    double cdf_left(double x) const;
    /// mu([lo, hi)); hi may be +infinity.
    double interval_mass(double lo, double hi) const;
    /// Generalized inverse CDF for p in (0, total_mass].
    double quantile(double p) const;

    friend PruningMeasure beta_measure(double alpha, double beta);
    friend PruningMeasure uniform_grid_measure(int points);
    friend PruningMeasure point_mass_measure(std::vector<std::pair<double, double>> masses);

private:
    Family family_ = Family::beta;
    double alpha_ = 0.0, beta_ = 0.0;
    std::vector<std::pair<double, double>> masses_; // (position, mass), sorted
};

/// Beta(alpha, beta) density on [0,1], total mass 1. Positive mass on every
/// [0, m], m > 0. Throws ValidationError unless both parameters are > 0.
PruningMeasure beta_measure(double alpha, double beta);

/// n equal masses at the midpoints (j - 1/2)/n.
PruningMeasure uniform_grid_measure(int points);

/// Arbitrary point masses; positions in [0,1], masses > 0.
PruningMeasure point_mass_measure(std::vector<std::pair<double, double>> masses);

struct EditOptions {
    /// Exact search refuses trees with more leaves than this (max 32).
    int budget_leaves = 25;
};

/// Exact edit distance between canonical merge trees: the minimal total cost
/// of weight shrinks (cost |dw|), edge deletions/insertions (cost w) and free
/// order-2 ghost/split edits. Symmetric; zero iff the weighted shapes are
/// isomorphic; satisfies the triangle inequality.
/// Throws BudgetExceededError when either tree is over budget and
/// ValidationError when an input is not canonical.
double edit_distance(const MergeTree& a, const MergeTree& b, const EditOptions& opts = {});

/// Delete leaves whose father-edge weight is <= eps, keeping the
/// largest-weight candidate among candidate siblings (ties: lowest id),
/// ghosting emerging order-2 vertices and iterating until stable.
MergeTree prune(const MergeTree& t, double eps);

/// Increasing thresholds 0 = e0 < e1 < ... such that prune(a, e) and
/// prune(b, e) are both structurally constant on every [ek, ek+1). Computed
/// from the cumulative leaf-to-ancestor weight sums of both trees.
std::vector<double> breakpoints(const MergeTree& a, const MergeTree& b);

/// Integral of edit_distance(prune(a,e), prune(b,e)) d mu(e), evaluated
/// exactly over the breakpoint partition. Inputs are expected to be
/// height-rescaled onto the measure's [0,1] support.
double pruned_distance(const MergeTree& a, const MergeTree& b, const PruningMeasure& mu,
                       const EditOptions& opts = {});

/// n-point discretization of the same integral (quantile midpoint rule);
/// converges to pruned_distance as points grows.
double quadrature_distance(const MergeTree& a, const MergeTree& b, const PruningMeasure& mu,
                           int points, const EditOptions& opts = {});

enum class RescaleMode { population, per_tree, none };

/// Divide all vertex heights by the population-wide maximum (or per-tree
/// maximum), mapping the population onto [0,1]. Returns the scaled trees;
/// scale_out receives the population divisor (1 for per_tree/none).
std::vector<MergeTree> rescale_heights(const std::vector<MergeTree>& trees, RescaleMode mode,
                                       double* scale_out = nullptr);

} // namespace treestrat
