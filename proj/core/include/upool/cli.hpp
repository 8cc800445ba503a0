#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace upool {

enum ExitCode : int {
  kExitOk = 0,
  kExitUsage = 2,
  kExitInput = 3,  // unreadable or invalid input / config
  kExitCompute = 4,
};

// Runs one command line (without the program name), e.g.
// {"pool", "--input", "dixie.csv", "--seed", "7"}. Commands: pool, pool-all,
// dpm, simulate, partitions. Reports go to `out` unless --output is given.
int run_command(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace upool
