#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace bbsm::cli {

/// Runs one command. args excludes the program name. Primary output goes to
/// `out` (or the --out file), diagnostics to `err`. Returns the exit code:
/// 0 success, 2 input or configuration error, 3 model or numerical error.
int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace bbsm::cli
