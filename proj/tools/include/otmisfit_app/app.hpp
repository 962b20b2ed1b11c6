#pragma once

#include <string>
#include <vector>

namespace otm::app {

enum ExitCode : int {
  kSuccess = 0,
  kNoConvergence = 1,
  kInputError = 2,
};

/// Runs the `otmisfit` command line. args excludes the program name.
/// Diagnostics go to standard error, data only to files below --out.
int run_cli(const std::vector<std::string>& args);

int run_cli(int argc, char** argv);

}  // namespace otm::app
