#include "chainpay/rational.hpp"

#include <cctype>

#include "chainpay/error.hpp"

namespace chainpay {

const char* errc_name(Errc code) {
    switch (code) {
        case Errc::parameter_out_of_range: return "ParameterOutOfRange";
        case Errc::negative_reward: return "NegativeReward";
        case Errc::position_out_of_domain: return "PositionOutOfDomain";
        case Errc::malformed_row: return "MalformedRow";
        case Errc::duplicate_entry: return "DuplicateEntry";
        case Errc::incomplete_chain: return "IncompleteChain";
        case Errc::domain_too_small: return "DomainTooSmall";
        case Errc::infeasible_class: return "InfeasibleClass";
    }
    return "UnknownError";
}

Rational rat_pow(const Rational& base, unsigned long exp) {
    Rational out;
    mpz_pow_ui(out.get_num_mpz_t(), base.get_num_mpz_t(), exp);
    mpz_pow_ui(out.get_den_mpz_t(), base.get_den_mpz_t(), exp);
    return out;  // num/den stay coprime under powers, already canonical
}

namespace {

bool all_digits(std::string_view s) {
    if (s.empty()) return false;
    for (char c : s)
        if (!std::isdigit(static_cast<unsigned char>(c))) return false;
    return true;
}

[[noreturn]] void bad(std::string_view text) {
    throw Error(Errc::malformed_row, "not a rational: '" + std::string(text) + "'");
}

}  // namespace

Rational parse_rational(std::string_view text) {
    while (!text.empty() && std::isspace(static_cast<unsigned char>(text.front()))) text.remove_prefix(1);
    while (!text.empty() && std::isspace(static_cast<unsigned char>(text.back()))) text.remove_suffix(1);
    if (text.empty()) bad(text);

    bool negative = false;
    std::string_view body = text;
    if (body.front() == '+' || body.front() == '-') {
        negative = body.front() == '-';
        body.remove_prefix(1);
    }

    Rational value;
    if (auto slash = body.find('/'); slash != std::string_view::npos) {
        std::string_view num = body.substr(0, slash);
        std::string_view den = body.substr(slash + 1);
        if (!all_digits(num) || !all_digits(den)) bad(text);
        mpz_class numerator{std::string(num)};
        mpz_class denominator{std::string(den)};
        if (denominator == 0) bad(text);
        value = Rational(numerator, denominator);
        value.canonicalize();
    } else if (auto dot = body.find('.'); dot != std::string_view::npos) {
        std::string_view whole = body.substr(0, dot);
        std::string_view frac = body.substr(dot + 1);
        if (whole.empty() && frac.empty()) bad(text);
        if (!whole.empty() && !all_digits(whole)) bad(text);
        if (!frac.empty() && !all_digits(frac)) bad(text);
        mpz_class numerator = whole.empty() ? mpz_class(0) : mpz_class(std::string(whole));
        mpz_class denominator = 1;
        for (char c : frac) {
            numerator = numerator * 10 + (c - '0');
            denominator *= 10;
        }
        value = Rational(numerator, denominator);
        value.canonicalize();
    } else {
        if (!all_digits(body)) bad(text);
        value = Rational(mpz_class(std::string(body)));
    }
    return negative ? Rational(-value) : value;
}

std::string rat_str(const Rational& value) {
    return value.get_str();
}

}  // namespace chainpay
