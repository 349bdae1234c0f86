#pragma once

#include <string>
#include <vector>

#define V2XSIM_VERSION "0.1.0"

namespace v2xsim {

/// Command-line entry point, exposed as a function so tests can drive it
/// in-process. Exit codes: 0 success, 1 runtime error, 2 validation error.
int CliMain(const std::vector<std::string>& args);
int CliMain(int argc, char** argv);

} // namespace v2xsim
