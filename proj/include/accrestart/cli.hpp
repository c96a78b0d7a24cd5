#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace accrestart::cli {

/// Exit codes: 0 success, 2 configuration error, 3 numeric failure, 4 IO failure.
enum ExitCode { ok = 0, config_error = 2, numeric_error = 3, io_error = 4 };

/// Entry point shared by the executable and the tests. args excludes the program name.
int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

/// "lo:hi:count" (log-spaced, inclusive) or a comma-separated list.
std::vector<double> parse_grid(const std::string& text);
/// Concatenation of the grids of each piece.
std::vector<double> parse_grid(const std::vector<std::string>& pieces);

} // namespace accrestart::cli
