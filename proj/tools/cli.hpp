#pragma once

#include <string>
#include <vector>

namespace uniformizer::cli {

/// Exit codes: 0 success, 1 a requested check failed, 2 input error.
int run(int argc, const char* const* argv);
/// `args` excludes the program name.
int run(const std::vector<std::string>& args);

}  // namespace uniformizer::cli
