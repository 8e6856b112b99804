#include "chainpay/analysis.hpp"

#include <algorithm>
#include <map>
#include <sstream>

#include "chainpay/parallel.hpp"
#include "chainpay/rng.hpp"

namespace chainpay {

namespace {

void require(bool ok, Errc code, const std::string& what) {
    if (!ok) throw Error(code, what);
}

std::string coord_str(Coord c) {
    return "R(" + std::to_string(c.k) + "," + std::to_string(c.t) + ")";
}

}  // namespace

EliminationSystem::EliminationSystem(int horizon) : horizon_(horizon) {
    require(horizon >= 2, Errc::parameter_out_of_range, "horizon must be >= 2");
    for (int t = 1; t <= horizon; ++t)
        for (int k = 1; k <= t; ++k) vars_.push_back({k, t});

    std::map<std::pair<int, int>, size_t> index;
    for (size_t i = 0; i < vars_.size(); ++i) index[{vars_[i].t, vars_[i].k}] = i;

    for (int t = 1; t <= horizon; ++t)
        for (int k = 1; k <= t; ++k)
            for (int n = 1; t + n <= horizon; ++n) {
                std::vector<Rational> row(vars_.size(), Rational(0));
                row[index[{t, k}]] += 1;
                for (int i = 0; i <= n; ++i) row[index[{t + n, k + i}]] -= 1;
                constraints_.push_back(std::move(row));
            }

    // Gauss-Jordan over the rationals; pivot columns are taken in variable
    // order, so the reduction is deterministic and tolerance-free.
    reduced_ = constraints_;
    row_of_col_.assign(vars_.size(), -1);
    size_t next_row = 0;
    for (size_t col = 0; col < vars_.size() && next_row < reduced_.size(); ++col) {
        size_t pivot = next_row;
        while (pivot < reduced_.size() && reduced_[pivot][col] == 0) ++pivot;
        if (pivot == reduced_.size()) continue;
        std::swap(reduced_[next_row], reduced_[pivot]);
        Rational lead = reduced_[next_row][col];
        for (Rational& x : reduced_[next_row]) x /= lead;
        for (size_t r = 0; r < reduced_.size(); ++r) {
            if (r == next_row || reduced_[r][col] == 0) continue;
            Rational factor = reduced_[r][col];
            for (size_t c = 0; c < vars_.size(); ++c) reduced_[r][c] -= factor * reduced_[next_row][c];
        }
        row_of_col_[col] = static_cast<int>(next_row);
        pivot_of_row_.push_back(static_cast<int>(col));
        ++next_row;
    }
    reduced_.resize(next_row);  // drop the all-zero rows
}

size_t EliminationSystem::var_index(Coord c) const {
    auto it = std::lower_bound(vars_.begin(), vars_.end(), c);
    require(it != vars_.end() && *it == c, Errc::position_out_of_domain,
            coord_str(c) + " outside horizon");
    return static_cast<size_t>(it - vars_.begin());
}

std::vector<Coord> EliminationSystem::forced_zero() const {
    // A pivot variable is identically zero iff its reduced row has no free
    // coordinates left: the row literally reads R(k,t) = 0.
    std::vector<Coord> zeros;
    for (size_t r = 0; r < reduced_.size(); ++r) {
        size_t col = static_cast<size_t>(pivot_of_row_[r]);
        bool solitary = true;
        for (size_t c = col + 1; c < vars_.size() && solitary; ++c)
            if (reduced_[r][c] != 0) solitary = false;
        if (solitary) zeros.push_back(vars_[col]);
    }
    return zeros;
}

std::vector<Coord> EliminationSystem::free_parameters() const {
    std::vector<Coord> free;
    for (size_t c = 0; c < vars_.size(); ++c)
        if (row_of_col_[c] < 0) free.push_back(vars_[c]);
    return free;
}

std::vector<std::vector<Rational>> EliminationSystem::null_basis() const {
    std::vector<std::vector<Rational>> basis;
    for (size_t f = 0; f < vars_.size(); ++f) {
        if (row_of_col_[f] >= 0) continue;
        std::vector<Rational> vec(vars_.size(), Rational(0));
        vec[f] = 1;
        for (size_t c = 0; c < vars_.size(); ++c)
            if (row_of_col_[c] >= 0) vec[c] = -reduced_[static_cast<size_t>(row_of_col_[c])][f];
        basis.push_back(std::move(vec));
    }
    return basis;
}

bool EliminationSystem::functional_vanishes(const std::vector<Rational>& coeffs) const {
    require(coeffs.size() == vars_.size(), Errc::parameter_out_of_range,
            "functional has wrong dimension");
    for (const auto& vec : null_basis()) {
        Rational dot = 0;
        for (size_t i = 0; i < vars_.size(); ++i) dot += coeffs[i] * vec[i];
        if (dot != 0) return false;
    }
    return true;
}

bool EliminationSystem::forced_equal(Coord a, Coord b) const {
    std::vector<Rational> coeffs(vars_.size(), Rational(0));
    coeffs[var_index(a)] += 1;
    coeffs[var_index(b)] -= 1;
    return functional_vanishes(coeffs);
}

std::vector<std::string> EliminationSystem::equalities() const {
    std::vector<std::string> out;
    for (size_t r = 0; r < reduced_.size(); ++r) {
        size_t col = static_cast<size_t>(pivot_of_row_[r]);
        std::ostringstream line;
        line << coord_str(vars_[col]) << " = ";
        bool first = true;
        for (size_t c = col + 1; c < vars_.size(); ++c) {
            Rational coeff = -reduced_[r][c];
            if (coeff == 0) continue;
            if (!first) line << (coeff > 0 ? " + " : " - ");
            else if (coeff < 0) line << "-";
            Rational mag = abs(coeff);
            if (mag != 1) line << rat_str(mag) << "*";
            line << coord_str(vars_[c]);
            first = false;
        }
        if (first) line << "0";
        out.push_back(line.str());
    }
    return out;
}

ImpossibilityReport verify_impossibility(int horizon) {
    require(horizon >= 3, Errc::parameter_out_of_range, "impossibility needs horizon >= 3");
    EliminationSystem system(horizon);
    ImpossibilityReport report;
    report.horizon = horizon;
    report.forced_zero = system.forced_zero();
    report.free_parameters = system.free_parameters();
    report.equalities = system.equalities();
    report.scr_zero_forced = true;
    for (int t = 3; t <= horizon; ++t) {
        Coord target{t - 1, t};
        if (!std::binary_search(report.forced_zero.begin(), report.forced_zero.end(), target))
            report.scr_zero_forced = false;
    }
    return report;
}

WtaStructureReport verify_wta_structure(int horizon) {
    require(horizon >= 3, Errc::parameter_out_of_range, "structure report needs horizon >= 3");
    EliminationSystem system(horizon);
    WtaStructureReport report;
    report.horizon = horizon;
    report.forced_zero = system.forced_zero();
    report.free_parameters = system.free_parameters();
    report.equalities = system.equalities();

    report.all_interior_forced = true;
    for (int t = 3; t <= horizon; ++t)
        for (int k = 2; k <= t - 1; ++k) {
            Coord c{k, t};
            if (std::binary_search(report.forced_zero.begin(), report.forced_zero.end(), c))
                report.interior_forced_zero.push_back(c);
            else
                report.all_interior_forced = false;
        }

    bool equalities_hold = true;
    for (int t = 3; t <= horizon; ++t) {
        // Winner rewards repeat once interiors vanish: R(t-1,t-1) = R(t,t).
        if (system.forced_equal({t - 1, t - 1}, {t, t}))
            report.winner_equalities.push_back({Coord{t - 1, t - 1}, Coord{t, t}});
        else
            equalities_hold = false;
        // The depth-1 payment is one shared parameter: R(1,t-1) = R(1,t).
        if (system.forced_equal({1, t - 1}, {1, t}))
            report.depth1_equalities.push_back({Coord{1, t - 1}, Coord{1, t}});
        else
            equalities_hold = false;
    }
    report.structure_verified = report.all_interior_forced && equalities_hold;
    return report;
}

RegionVerdict region_membership(const RegionPoint& point) {
    require(point.delta >= 0 && point.delta < 1, Errc::parameter_out_of_range,
            "delta must be in [0,1)");
    require(point.eps > 0, Errc::parameter_out_of_range, "eps must be > 0");
    require(point.gamma > 0 && point.gamma <= 1, Errc::parameter_out_of_range,
            "gamma must be in (0,1]");
    Rational bb_cap = 1 - point.gamma;
    Rational dsp_cap = point.eps / (1 + point.eps);
    Rational cap = std::min(bb_cap, dsp_cap);
    RegionVerdict verdict;
    verdict.inside = point.delta <= cap;
    if (verdict.inside) return verdict;
    // delta = 0 is always inside, so a geometric mechanism exists here and
    // certifiably breaks one of the two binding properties.
    Mechanism mech = Mechanism::gamma_delta_geom(point.gamma, point.delta, Budget{1});
    PropertySpec prop = point.delta > 1 - point.gamma ? PropertySpec::bb()
                                                      : PropertySpec::eps_dsp(point.eps);
    verdict.violation = certify_geometric(mech, prop);
    return verdict;
}

std::vector<RegionCell> region_scan(const Rational& step_delta, const Rational& step_eps,
                                    const Rational& step_gamma, const Rational& eps_max,
                                    int threads) {
    require(step_delta > 0 && step_eps > 0 && step_gamma > 0, Errc::parameter_out_of_range,
            "grid steps must be > 0");
    require(eps_max > 0, Errc::parameter_out_of_range, "eps_max must be > 0");
    std::vector<RegionPoint> points;
    for (Rational delta = step_delta; delta < 1; delta += step_delta)
        for (Rational eps = step_eps; eps <= eps_max; eps += step_eps)
            for (Rational gamma = step_gamma; gamma <= 1; gamma += step_gamma)
                points.push_back({delta, eps, gamma});
    std::vector<RegionCell> cells(points.size());
    parallel_for(points.size(), threads, [&](size_t i) {
        cells[i] = RegionCell{points[i], region_membership(points[i])};
    });
    return cells;
}

Rational objective_bound(Objective objective, const Rational& delta, const Rational& gamma,
                         const Budget& budget, int t) {
    require(delta > 0 && delta < 1, Errc::parameter_out_of_range, "delta must be in (0,1)");
    require(t >= 1, Errc::position_out_of_domain, "t must be >= 1");
    Rational span = 1 - rat_pow(delta, static_cast<unsigned long>(t));
    if (objective == Objective::min_cost) {
        require(gamma > 0 && gamma <= 1, Errc::parameter_out_of_range, "gamma must be in (0,1]");
        return gamma * budget.r_max * span / (1 - delta);
    }
    return (1 - delta) / span * budget.r_max;
}

DominanceReport dominance_test(Objective objective, const Rational& delta,
                               const std::optional<Rational>& gamma, const Budget& budget,
                               int t_max, int samples, std::uint64_t seed,
                               const Mechanism* reference_override) {
    require(samples >= 1, Errc::parameter_out_of_range, "need at least one sample");
    require(t_max >= 1, Errc::parameter_out_of_range, "t_max must be >= 1");
    SampleClass cls;
    cls.delta = delta;
    cls.budget_balance = true;
    if (objective == Objective::min_cost) {
        require(gamma.has_value(), Errc::parameter_out_of_range, "min_cost needs gamma");
        cls.gamma = gamma;
    }

    Mechanism reference = reference_override
                              ? *reference_override
                              : (objective == Objective::min_cost
                                     ? Mechanism::gamma_delta_geom(*gamma, delta, budget)
                                     : Mechanism::delta_geom(delta, budget));

    DominanceReport report;
    report.objective = objective;
    report.samples = samples;
    report.t_max = t_max;

    // The reference must live in the class it claims to dominate.
    CheckBounds bounds{t_max, 1, 1};
    std::vector<PropertySpec> suite{PropertySpec::delta_scr(delta), PropertySpec::bb()};
    if (cls.gamma) suite.push_back(PropertySpec::gamma_sec(*cls.gamma));
    for (const PropertySpec& prop : suite) {
        CheckReport check = check_property(reference, prop, bounds);
        if (!check.passed()) report.reference_failures.push_back(check);
    }

    std::vector<Rational> reference_values(static_cast<size_t>(t_max));
    for (int t = 1; t <= t_max; ++t)
        reference_values[static_cast<size_t>(t - 1)] = objective == Objective::min_cost
                                                           ? reference.chain_total(t)
                                                           : reference.reward({t, t});

    for (int index = 0; index < samples; ++index) {
        Mechanism sample = sample_mechanism(cls, t_max, budget, stream_seed(seed, static_cast<std::uint64_t>(index)));
        for (int t = 1; t <= t_max; ++t) {
            Rational value = objective == Objective::min_cost ? sample.chain_total(t)
                                                              : sample.reward({t, t});
            const Rational& bound = reference_values[static_cast<size_t>(t - 1)];
            bool ok = objective == Objective::min_cost ? value >= bound : value <= bound;
            if (!ok) report.counterexamples.push_back({index, t, value, bound});
        }
    }
    return report;
}

BoundPair bound_pair(const Rational& delta, const Rational& eps, int n, int t,
                     const Budget& budget) {
    require(delta > 0 && delta < 1, Errc::parameter_out_of_range, "delta must be in (0,1)");
    require(eps > 0, Errc::parameter_out_of_range, "eps must be > 0");
    require(n >= 1 && t >= 1, Errc::position_out_of_domain, "n and t must be >= 1");
    Rational one_minus = 1 - delta;
    Rational dn = 1 - rat_pow(delta, static_cast<unsigned long>(n + 1));
    Rational dt = 1 - rat_pow(delta, static_cast<unsigned long>(t));
    Rational dtn = 1 - rat_pow(delta, static_cast<unsigned long>(t + n));
    BoundPair pair;
    pair.a = (1 + eps) * one_minus * one_minus / (dn * dt) * budget.r_max;
    pair.b = one_minus / dtn * budget.r_max;
    return pair;
}

RatioBoundsReport ratio_bounds_check(const Rational& delta, const Rational& eps, int n_max,
                                     int t_max) {
    require(n_max >= 1 && t_max >= 1, Errc::parameter_out_of_range, "bounds must be >= 1");
    RatioBoundsReport report;
    report.delta = delta;
    report.eps = eps;
    report.n_max = n_max;
    report.t_max = t_max;
    Rational lower = 1 / (1 + eps);
    Rational upper = 1 / ((1 + eps) * (1 - delta));
    for (int n = 1; n <= n_max; ++n)
        for (int t = 1; t <= t_max; ++t) {
            BoundPair pair = bound_pair(delta, eps, n, t, Budget{1});
            Rational ratio = pair.b / pair.a;
            if (ratio < lower || ratio > upper)
                report.bound_violations.push_back({n, t, ratio});
            if (pair.a < pair.b) report.dominance_failures.push_back({n, t, ratio});
        }
    return report;
}

PartialSumReport partial_sum_check(const Rational& delta, int t, int p) {
    require(delta > 0 && delta < 1, Errc::parameter_out_of_range, "delta must be in (0,1)");
    require(t >= 2, Errc::position_out_of_domain, "t must be >= 2");
    require(p >= 1 && p <= t - 1, Errc::position_out_of_domain, "p must be in [1, t-1]");
    PartialSumReport report;
    report.delta = delta;
    report.t = t;
    report.p = p;
    report.full_sum = 0;
    report.prefix_sum = 0;
    report.sign_pattern_ok = true;
    for (int k = 1; k <= t - 1; ++k) {
        Rational term = rat_pow(delta, static_cast<unsigned long>(k)) -
                        rat_pow(delta, static_cast<unsigned long>(t - k));
        report.terms.push_back(term);
        report.full_sum += term;
        if (k <= p) report.prefix_sum += term;
        bool front_half = k <= t / 2;
        if (front_half ? term < 0 : term > 0) report.sign_pattern_ok = false;
    }
    report.full_sum_zero = report.full_sum == 0;
    report.prefix_nonnegative = report.prefix_sum >= 0;
    return report;
}

}  // namespace chainpay
