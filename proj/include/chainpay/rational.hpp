#pragma once

#include <gmpxx.h>

#include <string>
#include <string_view>

namespace chainpay {

// All mechanism parameters, rewards and property margins are exact
// rationals. The properties are strict/weak inequalities and equality
// chains, so verdicts must never depend on rounding.
using Rational = mpq_class;

/// base^exp with exact arithmetic; exp >= 0.
Rational rat_pow(const Rational& base, unsigned long exp);

/// Parses "p/q" (q > 0), an integer, or a plain decimal such as "0.25".
/// Throws Error{malformed_row} on anything else.
Rational parse_rational(std::string_view text);

/// Canonical form: "p/q", or just "p" when the denominator is 1.
std::string rat_str(const Rational& value);

}  // namespace chainpay
