#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace radtex::cli {

enum ExitCode : int {
  kOk = 0,
  kUsage = 1,
  kFileFormat = 2,
  kValidation = 3,
};

// Entry point of the radtex tool. Diagnostics go to err, results to out.
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);
int run(int argc, const char* const* argv);

}  // namespace radtex::cli
