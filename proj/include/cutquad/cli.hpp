#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace cutquad {

/// Environment variable naming the default output directory.
inline constexpr const char* kOutputDirEnv = "CUTQUAD_OUTPUT_DIR";

/// Runs the command line `args` (args[0] is the program name). Returns the
/// process exit status: 0 pass, 1 tolerance failure, 2 execution or argument
/// error. Nothing under the output directory is touched until every argument
/// and input file has been validated.
int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace cutquad
