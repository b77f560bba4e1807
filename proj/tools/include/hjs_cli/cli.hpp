#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace hjs::cli {

/// Runs one subcommand (`args[0]`) with its flags. Returns the process exit
/// status: 0 on success, 1 on a runtime or validation error (reported as JSON
/// on `err`), 2 on a usage error.
int run_command(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

std::string usage();

} // namespace hjs::cli
