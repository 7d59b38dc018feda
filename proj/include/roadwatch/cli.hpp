#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace roadwatch::cli {

enum ExitCode : int { kOk = 0, kInputError = 2, kInternalError = 3 };

// Entry point shared by the executable and the tests. `args` excludes the
// program name. Subcommands: simulate, replay, report, decode.
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace roadwatch::cli
