#include "chainpay/properties.hpp"

#include <algorithm>
#include <array>
#include <cctype>
#include <vector>

#include "chainpay/rng.hpp"

namespace chainpay {

const char* property_kind_name(PropertyKind kind) {
    switch (kind) {
        case PropertyKind::dsp: return "dsp";
        case PropertyKind::eps_dsp: return "eps_dsp";
        case PropertyKind::cp: return "cp";
        case PropertyKind::bb: return "bb";
        case PropertyKind::scr: return "scr";
        case PropertyKind::wcr: return "wcr";
        case PropertyKind::delta_scr: return "delta_scr";
        case PropertyKind::gamma_sec: return "gamma_sec";
    }
    return "?";
}

std::optional<PropertyKind> property_kind_from(std::string_view name) {
    std::string normalized;
    for (char c : name) normalized += c == '-' ? '_' : static_cast<char>(std::tolower(c));
    for (PropertyKind kind :
         {PropertyKind::dsp, PropertyKind::eps_dsp, PropertyKind::cp, PropertyKind::bb,
          PropertyKind::scr, PropertyKind::wcr, PropertyKind::delta_scr, PropertyKind::gamma_sec})
        if (normalized == property_kind_name(kind)) return kind;
    return std::nullopt;
}

const char* verdict_name(Verdict verdict) {
    switch (verdict) {
        case Verdict::certified: return "certified";
        case Verdict::pass_bounded: return "pass_bounded";
        case Verdict::fail: return "fail";
    }
    return "?";
}

namespace {

void require(bool ok, Errc code, const std::string& what) {
    if (!ok) throw Error(code, what);
}

}  // namespace

PropertySpec PropertySpec::dsp() { return {PropertyKind::dsp, 0}; }
PropertySpec PropertySpec::cp() { return {PropertyKind::cp, 0}; }
PropertySpec PropertySpec::bb() { return {PropertyKind::bb, 0}; }
PropertySpec PropertySpec::scr() { return {PropertyKind::scr, 0}; }
PropertySpec PropertySpec::wcr() { return {PropertyKind::wcr, 0}; }

PropertySpec PropertySpec::eps_dsp(const Rational& eps) {
    require(eps > 0, Errc::parameter_out_of_range, "eps must be > 0");
    return {PropertyKind::eps_dsp, eps};
}

PropertySpec PropertySpec::delta_scr(const Rational& delta) {
    require(delta > 0 && delta < 1, Errc::parameter_out_of_range, "delta must be in (0,1)");
    return {PropertyKind::delta_scr, delta};
}

PropertySpec PropertySpec::gamma_sec(const Rational& gamma) {
    require(gamma > 0 && gamma <= 1, Errc::parameter_out_of_range, "gamma must be in (0,1]");
    return {PropertyKind::gamma_sec, gamma};
}

bool PropertySpec::has_param() const {
    return kind == PropertyKind::eps_dsp || kind == PropertyKind::delta_scr ||
           kind == PropertyKind::gamma_sec;
}

namespace {

// 1 + delta + ... + delta^m, exact.
Rational geom_sum(const Rational& delta, int m) {
    return (1 - rat_pow(delta, static_cast<unsigned long>(m + 1))) / (1 - delta);
}

// Slack of the sybil inequality factor*R(k,t) >= sum_{i=0..n} R(k+i,t+n);
// negative means violated.
Rational sybil_slack(const Mechanism& mech, const Rational& factor, int k, int t, int n) {
    Rational sum = 0;
    for (int i = 0; i <= n; ++i) sum += mech.reward({k + i, t + n});
    return factor * mech.reward({k, t}) - sum;
}

// Slack of the collapse inequality sum_{i=0..p} R(k+i,t) >= R(k,t-p).
Rational collapse_slack(const Mechanism& mech, int k, int t, int p) {
    Rational sum = 0;
    for (int i = 0; i <= p; ++i) sum += mech.reward({k + i, t});
    return sum - mech.reward({k, t - p});
}

struct ScanState {
    std::optional<Rational> min_slack;
    std::optional<Witness> witness;
    Rational violation;

    // Instances are visited in lexicographic (t, k, n|p) order, so the
    // first violation seen is the minimal witness.
    bool note(const Rational& slack, Witness w) {
        if (slack < 0) {
            witness = w;
            violation = -slack;
            return true;
        }
        if (!min_slack || slack < *min_slack) min_slack = slack;
        return false;
    }

    CheckReport finish(const PropertySpec& prop, const CheckBounds& bounds) const {
        CheckReport report;
        report.property = prop;
        report.bounds = bounds;
        if (witness) {
            report.verdict = Verdict::fail;
            report.witness = witness;
            report.margin = violation;
        } else {
            report.verdict = Verdict::pass_bounded;
            report.margin = min_slack.value_or(Rational(0));
        }
        return report;
    }
};

CheckReport scan_sybil(const Mechanism& mech, const PropertySpec& prop, const Rational& factor,
                       const CheckBounds& bounds) {
    ScanState state;
    for (int t = 1; t <= bounds.t_max; ++t)
        for (int k = 1; k <= t; ++k)
            for (int n = 1; n <= bounds.n_max; ++n)
                if (state.note(sybil_slack(mech, factor, k, t, n), Witness{k, t, n, {}}))
                    return state.finish(prop, bounds);
    return state.finish(prop, bounds);
}

CheckReport scan_collapse(const Mechanism& mech, const PropertySpec& prop,
                          const CheckBounds& bounds) {
    ScanState state;
    for (int t = 1; t <= bounds.t_max; ++t)
        for (int k = 1; k < t; ++k)
            for (int p = 1; p <= bounds.p_max && k + p <= t; ++p)
                if (state.note(collapse_slack(mech, k, t, p), Witness{k, t, {}, p}))
                    return state.finish(prop, bounds);
    return state.finish(prop, bounds);
}

CheckReport scan_bb(const Mechanism& mech, const PropertySpec& prop, const CheckBounds& bounds) {
    ScanState state;
    for (int t = 1; t <= bounds.t_max; ++t)
        if (state.note(mech.budget().r_max - mech.chain_total(t), Witness{{}, t, {}, {}}))
            return state.finish(prop, bounds);
    return state.finish(prop, bounds);
}

CheckReport scan_scr(const Mechanism& mech, const PropertySpec& prop, const CheckBounds& bounds) {
    // Strict positivity: R(k,t) = 0 violates with margin 0.
    ScanState state;
    for (int t = 1; t <= bounds.t_max; ++t) {
        std::vector<Rational> pay = mech.chain_payments(t);
        for (int k = 1; k <= t; ++k) {
            const Rational& value = pay[static_cast<size_t>(k - 1)];
            if (value <= 0) {
                state.witness = Witness{k, t, {}, {}};
                state.violation = -value;
                return state.finish(prop, bounds);
            }
            if (!state.min_slack || value < *state.min_slack) state.min_slack = value;
        }
    }
    return state.finish(prop, bounds);
}

CheckReport scan_wcr(const Mechanism& mech, const PropertySpec& prop, const CheckBounds& bounds) {
    ScanState state;
    for (int t = 1; t <= bounds.t_max; ++t) {
        std::vector<Rational> pay = mech.chain_payments(t);
        for (int k = 1; k < t; ++k)
            if (state.note(pay[static_cast<size_t>(k - 1)], Witness{k, t, {}, {}}))
                return state.finish(prop, bounds);
        const Rational& winner = pay[static_cast<size_t>(t - 1)];
        if (winner <= 0) {
            state.witness = Witness{t, t, {}, {}};
            state.violation = -winner;
            return state.finish(prop, bounds);
        }
        if (!state.min_slack || winner < *state.min_slack) state.min_slack = winner;
    }
    return state.finish(prop, bounds);
}

CheckReport scan_delta_scr(const Mechanism& mech, const PropertySpec& prop,
                           const CheckBounds& bounds) {
    ScanState state;
    for (int t = 1; t <= bounds.t_max; ++t) {
        std::vector<Rational> pay = mech.chain_payments(t);
        for (int k = 1; k < t; ++k)
            if (state.note(pay[static_cast<size_t>(k - 1)] - prop.param * pay[static_cast<size_t>(k)],
                           Witness{k, t, {}, {}}))
                return state.finish(prop, bounds);
        const Rational& winner = pay[static_cast<size_t>(t - 1)];
        if (winner <= 0) {
            state.witness = Witness{t, t, {}, {}};
            state.violation = -winner;
            return state.finish(prop, bounds);
        }
        if (!state.min_slack || winner < *state.min_slack) state.min_slack = winner;
    }
    return state.finish(prop, bounds);
}

CheckReport scan_gamma_sec(const Mechanism& mech, const PropertySpec& prop,
                           const CheckBounds& bounds) {
    ScanState state;
    for (int t = 1; t <= bounds.t_max; ++t)
        if (state.note(mech.reward({t, t}) - prop.param * mech.budget().r_max,
                       Witness{{}, t, {}, {}}))
            return state.finish(prop, bounds);
    return state.finish(prop, bounds);
}

CheckReport certified(const PropertySpec& prop, const Rational& infimum_slack) {
    CheckReport report;
    report.property = prop;
    report.verdict = Verdict::certified;
    report.margin = infimum_slack;
    return report;
}

CheckReport certified_fail(const PropertySpec& prop, Witness witness, const Rational& violation) {
    CheckReport report;
    report.property = prop;
    report.verdict = Verdict::fail;
    report.witness = witness;
    report.margin = violation;
    return report;
}

// eps/(1+eps), the decay threshold below which the geometric sybil factor
// 1/(1-delta) stays within 1+eps.
bool decay_within(const Rational& delta, const Rational& eps) {
    return delta <= eps / (1 + eps);
}

CheckReport certify_wta(const Mechanism& mech, const PropertySpec& prop) {
    const Rational& c = mech.payout();
    const Rational& r = mech.budget().r_max;
    switch (prop.kind) {
        case PropertyKind::dsp:
        case PropertyKind::eps_dsp:
            // Fakes below the winner only relocate the single payment.
            return certified(prop, 0);
        case PropertyKind::cp:
            // Both sides are c when the subchain ends at the winner, else 0.
            return certified(prop, 0);
        case PropertyKind::bb:
            return certified(prop, r - c);
        case PropertyKind::scr:
            return certified_fail(prop, Witness{1, 2, {}, {}}, 0);
        case PropertyKind::wcr:
            return certified(prop, 0);
        case PropertyKind::delta_scr:
            // R(t-1,t) = 0 < delta * R(t,t).
            return certified_fail(prop, Witness{1, 2, {}, {}}, prop.param * c);
        case PropertyKind::gamma_sec:
            if (c >= prop.param * r) return certified(prop, c - prop.param * r);
            return certified_fail(prop, Witness{{}, 1, {}, {}}, prop.param * r - c);
    }
    throw Error(Errc::parameter_out_of_range, "unreachable");
}

CheckReport certify_gamma_delta_geom(const Mechanism& mech, const PropertySpec& prop) {
    const Rational& g = mech.gamma();
    const Rational& d = mech.delta();
    const Rational& r = mech.budget().r_max;
    switch (prop.kind) {
        case PropertyKind::dsp:
            // A single fake below the winner already collects delta*gamma*r.
            return certified_fail(prop, Witness{1, 1, 1, {}}, -sybil_slack(mech, 1, 1, 1, 1));
        case PropertyKind::eps_dsp: {
            if (decay_within(d, prop.param)) return certified(prop, 0);
            // The sybil factor 1+d+...+d^n grows to 1/(1-d) > 1+eps, so some
            // finite n crosses; position does not matter.
            int n = 1;
            while (geom_sum(d, n) <= 1 + prop.param) ++n;
            return certified_fail(prop, Witness{1, 1, n, {}},
                                  -sybil_slack(mech, 1 + prop.param, 1, 1, n));
        }
        case PropertyKind::cp:
            // The collapsed node's reward reappears as the deepest term of
            // the sum, which is otherwise positive; slack vanishes as t grows.
            return certified(prop, 0);
        case PropertyKind::bb: {
            if (g <= 1 - d) return certified(prop, r * (1 - g / (1 - d)));
            // Totals grow to g*r/(1-d) > r; first offending length is finite.
            int t = 1;
            while (g * geom_sum(d, t - 1) <= 1) ++t;
            return certified_fail(prop, Witness{{}, t, {}, {}}, mech.chain_total(t) - r);
        }
        case PropertyKind::scr:
        case PropertyKind::wcr:
            return certified(prop, 0);
        case PropertyKind::delta_scr:
            if (prop.param <= d) return certified(prop, 0);
            return certified_fail(prop, Witness{1, 2, {}, {}}, (prop.param - d) * g * r);
        case PropertyKind::gamma_sec:
            if (g >= prop.param) return certified(prop, (g - prop.param) * r);
            return certified_fail(prop, Witness{{}, 1, {}, {}}, (prop.param - g) * r);
    }
    throw Error(Errc::parameter_out_of_range, "unreachable");
}

CheckReport certify_delta_geom(const Mechanism& mech, const PropertySpec& prop) {
    const Rational& d = mech.delta();
    const Rational& r = mech.budget().r_max;
    switch (prop.kind) {
        case PropertyKind::dsp:
            // At t=1 insertion is break-even (the whole budget either way);
            // from t=2 the leaf fraction shrinks slower than the sum grows.
            return certified_fail(prop, Witness{1, 2, 1, {}}, -sybil_slack(mech, 1, 1, 2, 1));
        case PropertyKind::eps_dsp: {
            if (decay_within(d, prop.param)) return certified(prop, 0);
            // The sybil factor at length t rises with n to 1+d+...+d^{t-1};
            // find the first t whose limit crosses 1+eps, then the first n.
            int t = 2;
            while (geom_sum(d, t - 1) <= 1 + prop.param) ++t;
            int n = 1;
            while (sybil_slack(mech, 1 + prop.param, 1, t, n) >= 0) ++n;
            return certified_fail(prop, Witness{1, t, n, {}},
                                  -sybil_slack(mech, 1 + prop.param, 1, t, n));
        }
        case PropertyKind::cp:
        case PropertyKind::bb:
            // Collapsing the whole chain is exactly break-even; totals are
            // exactly r for every length.
            return certified(prop, 0);
        case PropertyKind::scr:
        case PropertyKind::wcr:
            return certified(prop, 0);
        case PropertyKind::delta_scr:
            if (prop.param <= d) return certified(prop, 0);
            return certified_fail(prop, Witness{1, 2, {}, {}},
                                  (prop.param - d) * mech.reward({2, 2}));
        case PropertyKind::gamma_sec: {
            if (prop.param <= 1 - d) return certified(prop, (1 - d - prop.param) * r);
            // Leaf rewards decrease towards (1-d)*r < gamma*r.
            int t = 2;
            while (mech.reward({t, t}) >= prop.param * r) ++t;
            return certified_fail(prop, Witness{{}, t, {}, {}},
                                  prop.param * r - mech.reward({t, t}));
        }
    }
    throw Error(Errc::parameter_out_of_range, "unreachable");
}

CheckReport certify_top_down(const Mechanism& mech, const PropertySpec& prop) {
    const Rational& r = mech.budget().r_max;
    switch (prop.kind) {
        case PropertyKind::dsp:
        case PropertyKind::eps_dsp:
            // Extending the chain halves every collected term: the n fakes
            // sum to strictly less than the original payment.
            return certified(prop, 0);
        case PropertyKind::cp:
            return certified_fail(prop, Witness{1, 2, {}, 1}, -collapse_slack(mech, 1, 2, 1));
        case PropertyKind::bb:
            // Totals are 2^-t*(1-2^-t)*r, maximal at t=1.
            return certified(prop, r - mech.chain_total(1));
        case PropertyKind::scr:
        case PropertyKind::wcr:
        case PropertyKind::delta_scr:
            // Rewards double towards the root, so any delta < 1 is met.
            return certified(prop, 0);
        case PropertyKind::gamma_sec: {
            // Winner rewards 4^-t*r drop below any positive fraction.
            int t = 1;
            while (mech.reward({t, t}) >= prop.param * r) ++t;
            return certified_fail(prop, Witness{{}, t, {}, {}},
                                  prop.param * r - mech.reward({t, t}));
        }
    }
    throw Error(Errc::parameter_out_of_range, "unreachable");
}

}  // namespace

std::optional<CheckReport> certify_geometric(const Mechanism& mech, const PropertySpec& prop) {
    switch (mech.family()) {
        case Mechanism::Family::wta: return certify_wta(mech, prop);
        case Mechanism::Family::gamma_delta_geom: return certify_gamma_delta_geom(mech, prop);
        case Mechanism::Family::delta_geom: return certify_delta_geom(mech, prop);
        case Mechanism::Family::top_down_geom: return certify_top_down(mech, prop);
        case Mechanism::Family::tabular: return std::nullopt;
    }
    return std::nullopt;
}

CheckReport check_property(const Mechanism& mech, const PropertySpec& prop,
                           const CheckBounds& bounds) {
    require(bounds.t_max >= 1 && bounds.n_max >= 1 && bounds.p_max >= 1,
            Errc::parameter_out_of_range, "check bounds must be >= 1");
    if (auto report = certify_geometric(mech, prop)) {
        report->bounds = bounds;
        return *report;
    }
    bool extends_chain = prop.kind == PropertyKind::dsp || prop.kind == PropertyKind::eps_dsp;
    int needed = bounds.t_max + (extends_chain ? bounds.n_max : 0);
    require(mech.covers(needed), Errc::domain_too_small,
            "tabular domain smaller than requested bounds (need t <= " + std::to_string(needed) +
                ")");
    switch (prop.kind) {
        case PropertyKind::dsp: return scan_sybil(mech, prop, 1, bounds);
        case PropertyKind::eps_dsp: return scan_sybil(mech, prop, 1 + prop.param, bounds);
        case PropertyKind::cp: return scan_collapse(mech, prop, bounds);
        case PropertyKind::bb: return scan_bb(mech, prop, bounds);
        case PropertyKind::scr: return scan_scr(mech, prop, bounds);
        case PropertyKind::wcr: return scan_wcr(mech, prop, bounds);
        case PropertyKind::delta_scr: return scan_delta_scr(mech, prop, bounds);
        case PropertyKind::gamma_sec: return scan_gamma_sec(mech, prop, bounds);
    }
    throw Error(Errc::parameter_out_of_range, "unreachable");
}

Mechanism sample_mechanism(const SampleClass& cls, int t_max, const Budget& budget,
                           std::uint64_t seed) {
    require(cls.delta > 0 && cls.delta < 1, Errc::parameter_out_of_range,
            "sample class delta must be in (0,1)");
    if (cls.gamma)
        require(*cls.gamma > 0 && *cls.gamma <= 1, Errc::parameter_out_of_range,
                "sample class gamma must be in (0,1]");
    require(t_max >= 1, Errc::parameter_out_of_range, "t_max must be >= 1");
    if (cls.budget_balance && cls.gamma && *cls.gamma > 1 - cls.delta)
        throw Error(Errc::infeasible_class,
                    "no mechanism is delta-SCR, gamma-SEC and BB with gamma > 1-delta");

    // Slack grid {0, 1/16, ..., 1/2}; all draws stay exact rationals.
    std::array<Rational, 9> grid;
    for (size_t i = 0; i < grid.size(); ++i) grid[i] = Rational(static_cast<int>(i)) / 16;
    std::mt19937_64 rng(splitmix64(seed));
    auto draw = [&] { return grid[rng() % grid.size()]; };

    const Rational& r = budget.r_max;
    Rational leaf_floor = cls.gamma ? Rational(*cls.gamma * r) : Rational(r / 2);

    Mechanism::Table table;
    for (int t = 1; t <= t_max; ++t) {
        std::vector<Rational> chain(static_cast<size_t>(t));
        for (int attempt = 0;; ++attempt) {
            chain[static_cast<size_t>(t - 1)] = leaf_floor * (1 + draw());
            for (int k = t - 1; k >= 1; --k)
                chain[static_cast<size_t>(k - 1)] = (cls.delta + draw()) * chain[static_cast<size_t>(k)];
            Rational total = 0;
            for (const Rational& x : chain) total += x;
            if (!cls.budget_balance || total <= r) break;
            // Uniform rescaling keeps all successor ratios, hence delta-SCR.
            Rational scale = r / total;
            for (Rational& x : chain) x *= scale;
            if (!cls.gamma || chain[static_cast<size_t>(t - 1)] >= *cls.gamma * r) break;
            if (attempt < 32) continue;
            // Deterministic fallback: the plain geometric chain with leaf
            // gamma*r is inside the class whenever gamma <= 1-delta.
            chain[static_cast<size_t>(t - 1)] = leaf_floor;
            for (int k = t - 1; k >= 1; --k)
                chain[static_cast<size_t>(k - 1)] = cls.delta * chain[static_cast<size_t>(k)];
            break;
        }
        for (int k = 1; k <= t; ++k) table[{t, k}] = chain[static_cast<size_t>(k - 1)];
    }
    return Mechanism::tabular(std::move(table), budget);
}

}  // namespace chainpay
