#pragma once

#include <array>
#include <cstdint>
#include <string>
#include <vector>

#include "chainpay/properties.hpp"

namespace chainpay {

/// Coordinate of a reward table entry, ordered by (t, k).
struct Coord {
    int k = 0;
    int t = 0;
    friend bool operator==(const Coord&, const Coord&) = default;
    friend auto operator<=>(const Coord& a, const Coord& b) {
        return std::pair(a.t, a.k) <=> std::pair(b.t, b.k);
    }
};

/// The homogeneous linear system obtained by equating the sybil and
/// collapse inequalities: R(k,t) = sum_{i=0..n} R(k+i,t+n) for every
/// k <= t, n >= 1 with t+n inside the horizon. One variable per (k,t),
/// exact rational rows, reduced by Gaussian elimination with pivots chosen
/// in (t asc, k asc) variable order.
class EliminationSystem {
public:
    explicit EliminationSystem(int horizon);

    int horizon() const { return horizon_; }
    const std::vector<Coord>& variables() const { return vars_; }
    size_t var_index(Coord c) const;

    /// Raw constraint rows (before reduction), one coefficient per variable.
    const std::vector<std::vector<Rational>>& constraints() const { return constraints_; }

    /// Coordinates whose value is zero in every solution.
    std::vector<Coord> forced_zero() const;
    /// Non-pivot coordinates; each one generates a null-space basis vector.
    std::vector<Coord> free_parameters() const;
    /// One basis vector of the solution space per free parameter.
    std::vector<std::vector<Rational>> null_basis() const;
    /// True when the linear functional (one coefficient per variable)
    /// vanishes on every solution.
    bool functional_vanishes(const std::vector<Rational>& coeffs) const;
    /// True when R(a) = R(b) in every solution.
    bool forced_equal(Coord a, Coord b) const;
    /// Reduced rows rendered as "R(k,t) = ..." strings.
    std::vector<std::string> equalities() const;

private:
    int horizon_;
    std::vector<Coord> vars_;
    std::vector<std::vector<Rational>> constraints_;
    std::vector<std::vector<Rational>> reduced_;   // RREF rows
    std::vector<int> pivot_of_row_;                // column of each RREF row
    std::vector<int> row_of_col_;                  // -1 for free columns
};

/// Elimination outcome in the shape shared by both theorem reports.
struct EliminationReport {
    int horizon = 0;
    std::vector<Coord> forced_zero;
    std::vector<Coord> free_parameters;
    std::vector<std::string> equalities;
};

/// Shows that the exact sybil+collapse equalities kill strict payments:
/// within any horizon T >= 3 the coordinate (t-1,t) is forced to zero for
/// every 3 <= t <= T. `scr_zero_forced` records that conclusion.
struct ImpossibilityReport : EliminationReport {
    bool scr_zero_forced = false;
};
ImpossibilityReport verify_impossibility(int horizon);

/// Structure of the solution space: all interior coordinates
/// (2 <= k <= t-1) zero, winner rewards equal across lengths >= 2, and a
/// single depth-1 family equal across lengths >= 2. The winner and depth-1
/// equalities are listed as coordinate pairs proved equal.
struct WtaStructureReport : EliminationReport {
    std::vector<Coord> interior_forced_zero;
    bool all_interior_forced = false;
    std::vector<std::array<Coord, 2>> winner_equalities;
    std::vector<std::array<Coord, 2>> depth1_equalities;
    bool structure_verified = false;
};
WtaStructureReport verify_wta_structure(int horizon);

/// Point of the (delta, eps, gamma) parameter space. delta = 0 is accepted
/// as the degenerate winner-takes-all floor.
struct RegionPoint {
    Rational delta;
    Rational eps;
    Rational gamma;
};

/// Membership verdict: inside iff delta <= min(1-gamma, eps/(1+eps)).
/// Outside points carry a certified violation of the matching geometric
/// mechanism: budget balance when gamma > 1-delta, otherwise the bounded
/// sybil-factor property.
struct RegionVerdict {
    bool inside = false;
    std::optional<CheckReport> violation;
};
RegionVerdict region_membership(const RegionPoint& point);

struct RegionCell {
    RegionPoint point;
    RegionVerdict verdict;
};

/// Half-open rational grid scan over delta in (0,1), eps in (0, eps_max],
/// gamma in (0,1]. Cells are ordered by (delta, eps, gamma); the result is
/// independent of the thread count.
std::vector<RegionCell> region_scan(const Rational& step_delta, const Rational& step_eps,
                                    const Rational& step_gamma, const Rational& eps_max,
                                    int threads = 1);

enum class Objective { min_cost, max_leaf };

/// Analytic optimum at chain length t: the minimal total payment
/// gamma*r*(1-delta^t)/(1-delta) for min_cost, the maximal winner payment
/// (1-delta)/(1-delta^t)*r for max_leaf.
Rational objective_bound(Objective objective, const Rational& delta, const Rational& gamma,
                         const Budget& budget, int t);

/// Sampled dominance check of the two optimality claims. Draws `samples`
/// mechanisms from the relevant class and compares them, exactly, against
/// the geometric reference at every chain length <= t_max. The reference
/// itself is re-validated against the class; `reference_override` lets a
/// harness inject a corrupted reference to prove violations are caught.
struct DominanceReport {
    Objective objective = Objective::min_cost;
    int samples = 0;
    int t_max = 0;
    struct Counterexample {
        int sample_index;
        int t;
        Rational sample_value;
        Rational reference_value;
    };
    std::vector<Counterexample> counterexamples;
    std::vector<CheckReport> reference_failures;
    bool passed() const { return counterexamples.empty() && reference_failures.empty(); }
};
DominanceReport dominance_test(Objective objective, const Rational& delta,
                               const std::optional<Rational>& gamma, const Budget& budget,
                               int t_max, int samples, std::uint64_t seed,
                               const Mechanism* reference_override = nullptr);

/// The two winner-reward bounds that drive the max_leaf characterization.
struct BoundPair {
    Rational a;  // (1+eps)*(1-delta)^2 / ((1-delta^{n+1})(1-delta^t)) * r
    Rational b;  // (1-delta) / (1-delta^{t+n}) * r
};
BoundPair bound_pair(const Rational& delta, const Rational& eps, int n, int t,
                     const Budget& budget);

/// Exhaustive exact verification that 1/(1+eps) <= B/A <= 1/((1+eps)(1-delta))
/// on the grid n,t <= bounds, and that A dominates B everywhere whenever
/// delta <= eps/(1+eps).
struct RatioBoundsReport {
    Rational delta;
    Rational eps;
    int n_max = 0;
    int t_max = 0;
    struct Violation {
        int n;
        int t;
        Rational ratio;
    };
    std::vector<Violation> bound_violations;
    std::vector<Violation> dominance_failures;  // points with A < B
    bool bounds_hold() const { return bound_violations.empty(); }
    bool dominance_holds() const { return dominance_failures.empty(); }
};
RatioBoundsReport ratio_bounds_check(const Rational& delta, const Rational& eps, int n_max,
                                     int t_max);

/// Terms a_k = delta^k - delta^{t-k}, k = 1..t-1: the full sum telescopes
/// to zero, every prefix is nonnegative, and signs flip once at t/2. These
/// prefix sums are exactly the collapse slacks of the budget-exhausting
/// geometric mechanism.
struct PartialSumReport {
    Rational delta;
    int t = 0;
    int p = 0;
    std::vector<Rational> terms;
    Rational full_sum;
    Rational prefix_sum;
    bool full_sum_zero = false;
    bool prefix_nonnegative = false;
    bool sign_pattern_ok = false;
    bool passed() const { return full_sum_zero && prefix_nonnegative && sign_pattern_ok; }
};
PartialSumReport partial_sum_check(const Rational& delta, int t, int p);

}  // namespace chainpay
