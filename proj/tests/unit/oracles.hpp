#pragma once

// Test-only brute-force re-evaluations, kept deliberately independent of
// the library's checker implementations: everything here is recomputed
// from chain_payments alone.

#include <optional>
#include <vector>

#include "chainpay/properties.hpp"

namespace chainpay::testing {

struct OracleViolation {
    Witness witness;
    Rational amount;
};

/// First violation of the property in (t, k, n|p) lexicographic order,
/// scanning exhaustively within the bounds.
inline std::optional<OracleViolation> first_violation(const Mechanism& mech,
                                                      const PropertySpec& prop,
                                                      const CheckBounds& bounds) {
    auto pay = [&](int t) { return mech.chain_payments(t); };
    switch (prop.kind) {
        case PropertyKind::dsp:
        case PropertyKind::eps_dsp: {
            Rational factor = prop.kind == PropertyKind::dsp ? Rational(1) : 1 + prop.param;
            for (int t = 1; t <= bounds.t_max; ++t) {
                std::vector<Rational> base = pay(t);
                for (int k = 1; k <= t; ++k)
                    for (int n = 1; n <= bounds.n_max; ++n) {
                        std::vector<Rational> longer = pay(t + n);
                        Rational sum = 0;
                        for (int i = 0; i <= n; ++i) sum += longer[size_t(k + i - 1)];
                        if (factor * base[size_t(k - 1)] < sum)
                            return OracleViolation{Witness{k, t, n, {}},
                                                   sum - factor * base[size_t(k - 1)]};
                    }
            }
            return std::nullopt;
        }
        case PropertyKind::cp: {
            for (int t = 1; t <= bounds.t_max; ++t)
                for (int k = 1; k < t; ++k)
                    for (int p = 1; p <= bounds.p_max && k + p <= t; ++p) {
                        Rational sum = 0;
                        for (int i = 0; i <= p; ++i) sum += pay(t)[size_t(k + i - 1)];
                        Rational merged = pay(t - p)[size_t(k - 1)];
                        if (sum < merged)
                            return OracleViolation{Witness{k, t, {}, p}, merged - sum};
                    }
            return std::nullopt;
        }
        case PropertyKind::bb: {
            for (int t = 1; t <= bounds.t_max; ++t) {
                Rational total = 0;
                for (const Rational& x : pay(t)) total += x;
                if (total > mech.budget().r_max)
                    return OracleViolation{Witness{{}, t, {}, {}}, total - mech.budget().r_max};
            }
            return std::nullopt;
        }
        case PropertyKind::scr: {
            for (int t = 1; t <= bounds.t_max; ++t)
                for (int k = 1; k <= t; ++k)
                    if (!(pay(t)[size_t(k - 1)] > 0))
                        return OracleViolation{Witness{k, t, {}, {}}, -pay(t)[size_t(k - 1)]};
            return std::nullopt;
        }
        case PropertyKind::wcr: {
            for (int t = 1; t <= bounds.t_max; ++t) {
                for (int k = 1; k < t; ++k)
                    if (pay(t)[size_t(k - 1)] < 0)
                        return OracleViolation{Witness{k, t, {}, {}}, -pay(t)[size_t(k - 1)]};
                if (!(pay(t)[size_t(t - 1)] > 0))
                    return OracleViolation{Witness{t, t, {}, {}}, -pay(t)[size_t(t - 1)]};
            }
            return std::nullopt;
        }
        case PropertyKind::delta_scr: {
            for (int t = 1; t <= bounds.t_max; ++t) {
                for (int k = 1; k < t; ++k)
                    if (pay(t)[size_t(k - 1)] < prop.param * pay(t)[size_t(k)])
                        return OracleViolation{Witness{k, t, {}, {}},
                                               prop.param * pay(t)[size_t(k)] - pay(t)[size_t(k - 1)]};
                if (!(pay(t)[size_t(t - 1)] > 0))
                    return OracleViolation{Witness{t, t, {}, {}}, -pay(t)[size_t(t - 1)]};
            }
            return std::nullopt;
        }
        case PropertyKind::gamma_sec: {
            for (int t = 1; t <= bounds.t_max; ++t)
                if (pay(t)[size_t(t - 1)] < prop.param * mech.budget().r_max)
                    return OracleViolation{Witness{{}, t, {}, {}},
                                           prop.param * mech.budget().r_max - pay(t)[size_t(t - 1)]};
            return std::nullopt;
        }
    }
    return std::nullopt;
}

inline bool same_witness(const Witness& a, const Witness& b) {
    return a.k == b.k && a.t == b.t && a.n == b.n && a.p == b.p;
}

}  // namespace chainpay::testing
