#pragma once

#include <string>
#include <vector>

namespace cvsskit::cli {

/// Runs the CLI on argv-style arguments (program name excluded).
/// Exit codes: 0 success, 1 runtime failure, 2 usage/validation error.
int run_cli(std::vector<std::string> args);

} // namespace cvsskit::cli
