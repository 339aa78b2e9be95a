#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace calcforge::cli {

enum ExitCode { kOk = 0, kUsage = 1, kData = 2 };

/// Runs one subcommand. `args` excludes the program name. Data goes to
/// `out` (when --out is "-" or absent) or to files; progress and
/// diagnostics go to `err` as JSON lines.
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);
int run(int argc, char** argv);

}  // namespace calcforge::cli
