#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace hpmean::cli {

enum ExitCode : int { Success = 0, UsageError = 1, NumericalFailure = 2 };

/// Runs one command line (program name excluded). Tables go to `out`,
/// diagnostics to `err`.
int run(std::vector<std::string> args, std::ostream& out, std::ostream& err);

}  // namespace hpmean::cli
