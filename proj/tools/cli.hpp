#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace pamlab {

enum ExitCode : int { kOk = 0, kConfigError = 1, kPartialFailure = 2, kInvariantBreach = 3 };

/// Runs the command line `args` (without the program name). Records go to
/// `out` unless --out names a directory; diagnostics go to `err`.
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace pamlab
