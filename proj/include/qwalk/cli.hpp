#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace qwalk {

enum ExitCode : int { exit_ok = 0, exit_validation = 1, exit_computation = 2 };

/// Entry point of the qwalk tool. Subcommands: simulate, sweep, fit,
/// collapse, oracle.
int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace qwalk
