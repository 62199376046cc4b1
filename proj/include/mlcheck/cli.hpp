#pragma once

#include <ostream>
#include <string>
#include <vector>

namespace mlcheck {

enum ExitCode : int {
  kExitOk = 0,
  kExitViolations = 1,
  kExitUsage = 2,
  kExitFailure = 3,
};

/// `mlcheck run ...` and `mlcheck bench ...`. args excludes the program name.
int cli_main(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

/// key = value lines (# comments, optional quotes) turned into --key=value.
std::vector<std::string> config_to_args(const std::string& text);

}  // namespace mlcheck
