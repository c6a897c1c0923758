#pragma once

#include <iosfwd>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

namespace pilotq::cli {

enum ExitCode : int {
  kOk = 0,
  kPhysicsFailure = 1,
  kUsageError = 2,
  kIntegrationFailure = 3,
};

/// Runs one `pilotq` command. `args` excludes the program name.
int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

/// Throws std::invalid_argument naming the first violation of the summary
/// schema.
void validate_summary(const nlohmann::json& summary);

/// {"key": value, ...} -> {"--key=value", ...}; booleans become flags.
std::vector<std::string> config_arguments(const nlohmann::json& config);

}  // namespace pilotq::cli
