#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace hmine {

enum ExitCode : int { kExitOk = 0, kExitData = 1, kExitUsage = 2 };

/// Runs one command line (without the program name). "-" as an input path
/// reads `in`; tables go to `out`, diagnostics to `err`.
int run_cli(const std::vector<std::string>& args, std::istream& in, std::ostream& out, std::ostream& err);

} // namespace hmine
