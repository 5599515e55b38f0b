#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace binreg::cli {

enum ExitCode : int {
  kOk = 0,
  kInputError = 1,
  kSeparated = 2,
  kVerificationFailure = 3,
};

/// Runs one invocation. args excludes the program name. Reports go to out,
/// diagnostics to err.
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace binreg::cli
