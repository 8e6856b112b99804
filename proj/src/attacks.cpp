#include "chainpay/attacks.hpp"

namespace chainpay {

namespace {

void require(bool ok, Errc code, const std::string& what) {
    if (!ok) throw Error(code, what);
}

}  // namespace

AttackResult sybil_gain(const Mechanism& mech, SybilMove move) {
    require(move.k >= 1 && move.k <= move.t && move.n >= 1, Errc::position_out_of_domain,
            "sybil move needs 1 <= k <= t and n >= 1");
    require(mech.covers(move.t + move.n), Errc::domain_too_small,
            "mechanism does not cover chain length " + std::to_string(move.t + move.n));
    Rational before = mech.reward({move.k, move.t});
    Rational after = 0;
    for (int i = 0; i <= move.n; ++i) after += mech.reward({move.k + i, move.t + move.n});
    AttackResult result{move, after - before, std::nullopt};
    if (before > 0) result.ratio = after / before;
    return result;
}

AttackResult collapse_gain(const Mechanism& mech, CollapseMove move) {
    require(move.k >= 1 && move.p >= 1 && move.k + move.p <= move.t, Errc::position_out_of_domain,
            "collapse move needs k >= 1, p >= 1, k+p <= t");
    require(mech.covers(move.t), Errc::domain_too_small,
            "mechanism does not cover chain length " + std::to_string(move.t));
    Rational before = 0;
    for (int i = 0; i <= move.p; ++i) before += mech.reward({move.k + i, move.t});
    Rational after = mech.reward({move.k, move.t - move.p});
    AttackResult result{move, after - before, std::nullopt};
    if (before > 0) result.ratio = after / before;
    return result;
}

AttackResult best_sybil(const Mechanism& mech, int k, int t, int n_max) {
    require(n_max >= 1, Errc::position_out_of_domain, "n_max must be >= 1");
    std::optional<AttackResult> best;
    for (int n = 1; n <= n_max; ++n) {
        AttackResult candidate = sybil_gain(mech, {k, t, n});
        if (!best || candidate.gain > best->gain) best = candidate;
    }
    return *best;
}

AttackResult best_collapse(const Mechanism& mech, int t, int p_max) {
    require(t >= 2, Errc::position_out_of_domain, "collapse needs a chain of length >= 2");
    std::optional<AttackResult> best;
    for (int k = 1; k < t; ++k) {
        for (int p = 1; k + p <= t && p <= p_max; ++p) {
            AttackResult candidate = collapse_gain(mech, {k, t, p});
            if (!best || candidate.gain > best->gain) best = candidate;
        }
    }
    return *best;
}

}  // namespace chainpay
