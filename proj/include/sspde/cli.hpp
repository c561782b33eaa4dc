#pragma once

#include <string>

#include "sspde/config.hpp"

// Subcommand bodies, shared between the binary and the tests. Exit codes:
// 0 success, 1 condition/convergence failure, 2 config or schema error.
namespace sspde::cli {

int cmd_check_operator(const RunConfig& cfg);
int cmd_check_exponents(const RunConfig& cfg);
int cmd_verify_appendix(const RunConfig& cfg);
int cmd_solve(const RunConfig& cfg, int n);
int cmd_pipeline(const RunConfig& cfg);

// Full entry point used by main(); parses argv, loads the config, maps
// exceptions to exit codes.
int run(int argc, const char* const* argv);

}  // namespace sspde::cli
