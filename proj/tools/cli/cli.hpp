#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace vmrank::cli {

/// Process exit codes.
enum ExitCode : int {
  kOk = 0,
  kUsage = 1,
  kDataError = 2,
  kInternal = 3,
};

/// Environment variable naming the default measurement file.
inline constexpr const char* kDatasetEnv = "VMRANK_DATASET";

/// Runs the vmrank command line. args[0] is the program name.
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace vmrank::cli
