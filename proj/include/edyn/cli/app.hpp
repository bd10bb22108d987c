#pragma once

#include <ostream>
#include <string>
#include <vector>

namespace edyn::cli {

/// Exit statuses of edsim.
enum ExitCode : int {
  kOk = 0,
  kToleranceViolated = 1,
  kConfigError = 2,
  kRuntimeError = 3,
};

/// Entry point of the edsim tool; args excludes the program name.
/// The output directory is --out, else $EDSIM_OUT_DIR, else output.dir.
int run_command(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace edyn::cli
