#pragma once

#include <cstdint>
#include <optional>
#include <string>

#include "chainpay/mechanism.hpp"

namespace chainpay {

enum class PropertyKind {
    dsp,        // no sybil insertion ever profits
    eps_dsp,    // sybil profit factor bounded by 1+eps
    cp,         // no subchain profits by collapsing
    bb,         // chain payments never exceed the budget
    scr,        // every chain node strictly paid
    wcr,        // nonnegative payments, strictly paid winner
    delta_scr,  // each recruiter gets >= delta of its successor; winner paid
    gamma_sec,  // winner gets >= gamma of the budget
};

const char* property_kind_name(PropertyKind kind);
std::optional<PropertyKind> property_kind_from(std::string_view name);

/// A property plus its approximation parameter (eps, delta or gamma,
/// whichever the kind uses). Construct through the factories, which
/// validate the parameter range.
struct PropertySpec {
    PropertyKind kind = PropertyKind::dsp;
    Rational param;

    static PropertySpec dsp();
    static PropertySpec eps_dsp(const Rational& eps);    // eps > 0
    static PropertySpec cp();
    static PropertySpec bb();
    static PropertySpec scr();
    static PropertySpec wcr();
    static PropertySpec delta_scr(const Rational& delta);  // delta in (0,1)
    static PropertySpec gamma_sec(const Rational& gamma);  // gamma in (0,1]
    bool has_param() const;
};

/// Finite truncation of the unbounded quantifiers over t, n and p.
struct CheckBounds {
    int t_max = 10;
    int n_max = 10;
    int p_max = 10;
};

enum class Verdict {
    certified,     // holds for ALL t,n,p, proved via the family's closed form
    pass_bounded,  // no violation within the scanned bounds; nothing more
    fail,          // concrete violating instance found
};

const char* verdict_name(Verdict verdict);

/// Violating (or not applicable) coordinates; only the fields the property
/// quantifies over are set.
struct Witness {
    std::optional<int> k;
    std::optional<int> t;
    std::optional<int> n;
    std::optional<int> p;
};

/// Outcome of one property check. On fail the witness re-evaluates, via
/// chain payments alone, to exactly the reported violation. The margin is
/// the violation amount on fail (0 only when a strict inequality fails at
/// its boundary) and the minimum slack on pass; certified margins are the
/// exact infimum of slack over the unbounded domain.
struct CheckReport {
    PropertySpec property;
    Verdict verdict = Verdict::pass_bounded;
    std::optional<Witness> witness;
    Rational margin;
    CheckBounds bounds;

    bool passed() const { return verdict != Verdict::fail; }
};

/// Decides the property by exhaustive exact evaluation within bounds,
/// upgrading to a certified verdict whenever the closed-form route applies.
/// Fail reports carry the lexicographically smallest witness in (t, k, n|p).
CheckReport check_property(const Mechanism& mech, const PropertySpec& prop,
                           const CheckBounds& bounds);

/// Closed-form decision over the unbounded quantifiers for the geometric
/// families; nullopt for tabular mechanisms (not applicable).
std::optional<CheckReport> certify_geometric(const Mechanism& mech, const PropertySpec& prop);

/// Mechanism class for the sampler: delta-SCR always, optionally gamma-SEC
/// and budget balance.
struct SampleClass {
    Rational delta;                  // in (0,1)
    std::optional<Rational> gamma;   // in (0,1]
    bool budget_balance = false;
};

/// Draws a tabular mechanism satisfying the requested class by
/// construction, deterministically in (cls, t_max, seed). Throws
/// Error{infeasible_class} when gamma-SEC and BB are both requested with
/// gamma > 1-delta, which no mechanism can satisfy.
Mechanism sample_mechanism(const SampleClass& cls, int t_max, const Budget& budget,
                           std::uint64_t seed);

}  // namespace chainpay
