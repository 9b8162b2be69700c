#pragma once

#include <iosfwd>

namespace ksense {

/// Exit codes of the command-line front end.
enum ExitCode : int {
    kExitOk = 0,
    kExitConfigError = 1,
    kExitRuntimeError = 2,
};

/// Entry point behind the ksense_cli binary: subcommands sweep, roc,
/// similarity, and calibrate. Results go to --out (or the config's "output"),
/// falling back to `out`; diagnostics go to `err`.
int run_cli(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

}  // namespace ksense
