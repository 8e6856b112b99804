#pragma once

#include <stdexcept>
#include <string>

namespace chainpay {

enum class Errc {
    parameter_out_of_range,
    negative_reward,
    position_out_of_domain,
    malformed_row,
    duplicate_entry,
    incomplete_chain,
    domain_too_small,
    infeasible_class,
};

/// Library-wide exception carrying a machine-checkable error code.
class Error : public std::runtime_error {
public:
    Error(Errc code, const std::string& what) : std::runtime_error(what), code_(code) {}
    Errc code() const { return code_; }

private:
    Errc code_;
};

const char* errc_name(Errc code);

}  // namespace chainpay
