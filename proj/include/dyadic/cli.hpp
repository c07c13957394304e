#pragma once

#include <ostream>
#include <string>
#include <vector>

namespace dyadic {

// Process exit codes, one per error class.
namespace exit_code {
constexpr int ok = 0;
constexpr int verification_failed = 1;
constexpr int input = 2;
constexpr int data = 3;
constexpr int constraint = 4;
constexpr int construction = 5; // materialization aborts and internal invariants
} // namespace exit_code

// Subcommands: build, verify, query, inject, ledger. `args` excludes the
// program name.
int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

} // namespace dyadic
