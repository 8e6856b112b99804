#pragma once

namespace chainpay {

/// Parses argv and runs one subcommand. Exit status: 0 on pass/success,
/// 1 when a property fails, an attack profits or a theorem check does not
/// verify, 2 on usage or input errors.
int run_cli(int argc, char** argv);

}  // namespace chainpay
