#pragma once

#include <iosfwd>
#include <json.hpp>
#include <optional>
#include <string>
#include <vector>

#include "svarwb/config.hpp"
#include "svarwb/errors.hpp"

namespace svarwb {

enum class Command { Identify, Estimate, Infer, Simulate };
const char* to_string(Command c);
std::optional<Command> parse_command(const std::string& name);

struct RunReport {
  std::string command;
  std::string outcome;  // one-line summary such as "identified (recursive route)"
  nlohmann::json details = nlohmann::json::object();
  std::vector<std::string> warnings;
  std::vector<std::string> artifacts;  // file names inside the output directory
};

// Each command writes its tables into config.output and returns the report;
// `log` receives the human-readable summary.
RunReport cmd_identify(const RunConfig& config, std::ostream& log);
RunReport cmd_estimate(const RunConfig& config, std::ostream& log);
RunReport cmd_infer(const RunConfig& config, std::ostream& log);
RunReport cmd_simulate(const RunConfig& config, std::ostream& log);

// Runs a command, echoing the config and writing report.json (seed, version,
// timing, artifacts) even when the command fails. Failures are rethrown.
RunReport run_command(Command command, const RunConfig& config, std::ostream& log);

// 0 success, 2 config error, 3 infeasible model, 4 solver budget exhausted, 1 anything else.
int exit_code(ErrorCode code);

const char* version();

}  // namespace svarwb
