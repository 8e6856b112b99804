#pragma once

#include <optional>
#include <variant>

#include "chainpay/mechanism.hpp"

namespace chainpay {

/// A node at depth k of a length-t chain inserts n fake identities directly
/// below itself; everyone deeper shifts down and the reported chain has
/// length t+n. The attacker controls the fakes and collects their payments.
struct SybilMove {
    int k = 1;
    int t = 1;
    int n = 1;
};

/// The p+1 nodes at depths k..k+p of a length-t chain report as a single
/// node at depth k; the reported chain has length t-p.
struct CollapseMove {
    int k = 1;
    int t = 2;
    int p = 1;
};

/// Group-level outcome of a manipulation: the attacker group's payment
/// change, exact. `ratio` is post/pre and only defined when the pre-attack
/// payment is positive.
struct AttackResult {
    std::variant<SybilMove, CollapseMove> move;
    Rational gain;
    std::optional<Rational> ratio;
};

AttackResult sybil_gain(const Mechanism& mech, SybilMove move);
AttackResult collapse_gain(const Mechanism& mech, CollapseMove move);

/// Max-gain sybil insertion at fixed (k,t) over 1 <= n <= n_max;
/// ties go to the smallest n.
AttackResult best_sybil(const Mechanism& mech, int k, int t, int n_max);

/// Max-gain collapse within a length-t chain over all (k,p) with k+p <= t
/// and p <= p_max; ties go to the lexicographically smallest (k,p).
AttackResult best_collapse(const Mechanism& mech, int t, int p_max);

}  // namespace chainpay
