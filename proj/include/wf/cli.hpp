#pragma once

#include <string>
#include <vector>

namespace wf {

/// Runs one CLI invocation (arguments without the program name).
/// Exit codes: 0 success, 1 usage error, 2 configuration error, 3 runtime
/// failure.
int run_cli(const std::vector<std::string>& args);

}  // namespace wf
