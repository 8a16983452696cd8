#pragma once

#include <ostream>

#include "grouptc/error.hpp"

namespace gtc {

enum ExitCode { kExitOk = 0, kExitValidation = 1, kExitIo = 2, kExitInfeasible = 3 };

/// Exit code for a library error: I/O failures 2, infeasible or expected
/// failures of the recovery pipeline 3, everything else 1.
int exit_code_for(ErrorKind kind);

/// Runs one `grouptc` invocation. Data goes to --out (or `out` when no path is
/// given); the key=value summary line and error messages go to `err`.
int run_cli(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

}  // namespace gtc
