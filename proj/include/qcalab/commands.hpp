#pragma once

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <string>

#include "qcalab/config.hpp"
#include "qcalab/index_value.hpp"

namespace qcalab {

struct CliOptions {
  std::string command;
  std::string config_path;
  std::optional<std::uint64_t> seed;
  std::optional<std::string> out;
  std::optional<std::size_t> max_dim;
  std::optional<double> tolerance;  // overrides tolerances.residual
};

enum ExitCode : int { kExitOk = 0, kExitConfig = 2, kExitDimension = 3, kExitNumerical = 4, kExitNonzeroIndex = 5 };
int exit_code_for(ErrorCode c);

struct CommandOutput {
  ojson report;
  std::string csv;  // tails only
};

// Applies the flag overrides and checks that the config matches the command.
ExperimentConfig resolve_config(const CliOptions& opt);

CommandOutput cmd_index(const ExperimentConfig& cfg);
CommandOutput cmd_tails(const ExperimentConfig& cfg);
CommandOutput cmd_approximate(const ExperimentConfig& cfg);
CommandOutput cmd_synthesize(const ExperimentConfig& cfg);
CommandOutput cmd_stability(const ExperimentConfig& cfg);
CommandOutput cmd_jw_demo(const ExperimentConfig& cfg);
CommandOutput run_command(const ExperimentConfig& cfg);

// Full CLI behavior: runs, writes the files (or prints the report) and
// returns the exit code; diagnostics go to `err`.
int run_cli(const CliOptions& opt, std::ostream& out, std::ostream& err);

ojson index_json(const IndexValue& v);

}  // namespace qcalab
