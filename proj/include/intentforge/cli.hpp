#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace intentforge::cli {

// Exit codes.
constexpr int kOk = 0;
constexpr int kDomainError = 1;
constexpr int kUsageError = 2;

// `args` excludes the program name.
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

// Objective derived from a test method name, used until a description is
// synthesized: `create_withThreadPool` -> "Tests create with thread pool.".
std::string objective_from_test_name(const std::string& name);

}  // namespace intentforge::cli
