#pragma once

#include <iosfwd>
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "chainpay/error.hpp"
#include "chainpay/rational.hpp"

namespace chainpay {

/// Position inside a winning chain: depth k of the paid node, chain length t.
/// The planner sits at depth 0 and is never paid; valid positions have
/// 1 <= k <= t.
struct ChainPosition {
    int k = 1;
    int t = 1;
};

/// Planner budget; strictly positive.
struct Budget {
    Rational r_max = 1;
};

/// A chain payment rule R(k,t): how much the node at depth k receives when
/// the winning chain has length t. Only winning-chain nodes are ever paid;
/// everyone else gets zero. Immutable after construction, so instances are
/// safe to share across threads.
class Mechanism {
public:
    enum class Family {
        wta,               // whole payout to the winner, zero elsewhere
        gamma_delta_geom,  // winner gets gamma*r_max, decay delta towards root
        delta_geom,        // winner gets (1-delta)/(1-delta^t)*r_max, decay delta
        top_down_geom,     // R(k,t) = 2^-(k+t)*r_max, heavy near the root
        tabular,           // explicit table over 1 <= k <= t <= t_max
    };

    using Table = std::map<std::pair<int, int>, Rational>;  // key (t,k)

    static Mechanism wta(const Rational& payout, const Budget& budget);
    static Mechanism gamma_delta_geom(const Rational& gamma, const Rational& delta,
                                      const Budget& budget);
    static Mechanism delta_geom(const Rational& delta, const Budget& budget);
    static Mechanism top_down_geom(const Budget& budget);
    // Table must be total on {(k,t) : 1 <= k <= t <= t_max} and nonnegative.
    static Mechanism tabular(Table table, const Budget& budget);

    Family family() const { return family_; }
    const Budget& budget() const { return budget_; }

    // Family parameters; only meaningful for the matching family.
    const Rational& payout() const { return payout_; }
    const Rational& gamma() const { return gamma_; }
    const Rational& delta() const { return delta_; }
    const Table& table() const { return table_; }

    /// Largest chain length the mechanism can price; nullopt when unbounded.
    std::optional<int> table_limit() const;
    bool covers(int t) const;

    /// Exact R(k,t). Throws Error{position_out_of_domain} for invalid or
    /// uncovered positions.
    Rational reward(ChainPosition pos) const;

    /// Payments for depths 1..t, in depth order.
    std::vector<Rational> chain_payments(int t) const;

    /// Sum of all winning-chain payments at length t.
    Rational chain_total(int t) const;

    /// Mini-spec string, e.g. "gdgeom:1/2,1/2 rmax=1".
    std::string describe() const;

private:
    Mechanism() = default;

    Family family_ = Family::wta;
    Budget budget_;
    Rational payout_;
    Rational gamma_;
    Rational delta_;
    Table table_;
    int table_t_max_ = 0;
};

/// Reads the tabular CSV format: header "t,k,reward", one row per position,
/// '#' comment lines ignored, rewards as decimals or "p/q" with q > 0.
Mechanism parse_tabular(std::istream& in, const Budget& budget);

/// CLI mini-spec: wta:<payout> | gdgeom:<gamma>,<delta> | dgeom:<delta> |
/// topdown | table:<path>.
Mechanism parse_mechanism_spec(std::string_view spec, const Budget& budget);

}  // namespace chainpay
