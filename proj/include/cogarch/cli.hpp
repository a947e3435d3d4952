#pragma once

#include "cogarch/estimate.hpp"
#include "cogarch/io.hpp"
#include "cogarch/model.hpp"

#include <iosfwd>
#include <string>
#include <vector>

namespace cogarch {

/// Exit codes shared by every subcommand.
enum ExitCode : int { kExitOk = 0, kExitFailure = 1, kExitUnstable = 2, kExitNoConvergence = 3 };

/// Entry point of the command-line tool. argv[0] is the program name.
int run_cli(int argc, const char* const* argv);
int run_cli(const std::vector<std::string>& args);

[[nodiscard]] Json diagnostics_to_json(const DiagnosticsReport& rep);
[[nodiscard]] Json fit_to_json(const GmmFit& fit);

}  // namespace cogarch
