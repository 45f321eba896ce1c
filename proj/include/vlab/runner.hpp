// Experiment runner: schema-validated JSON configs dispatched to the
// classical and quantum pipelines.
#pragma once

#include "vlab/report.hpp"

#include <string>
#include <vector>

namespace vlab {

/// Known experiment names, mirrored by the CLI subcommands.
const std::vector<std::string>& experiment_names();

struct ExperimentConfig {
    Json raw; // validated, defaults not yet applied
};

/// Validate against the published schema: required "experiment", known keys
/// only (ConfigError names the offending key), typed values.
ExperimentConfig parse_config(const Json& j);

/// Apply a `--set key.path=value` style override (value parsed as JSON when
/// possible, else taken as a string).
void apply_override(Json& config, const std::string& assignment);

RunReport run(const ExperimentConfig& config);

/// CLI exit code classes: 0 ok, 1 tolerance failure, 2 config, 3
/// convergence, 4 domain.
int exit_code_for(const std::exception& error);

} // namespace vlab
