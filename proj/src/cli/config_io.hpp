#pragma once

#include "fracdeblur/solver.hpp"

#include <json.hpp>

#include <string>
#include <vector>

namespace fracdeblur::cli {

nlohmann::json config_to_json(const SolverConfig& cfg);

/// Fields present in `j` replace those of `base`. Unknown keys and values of
/// the wrong type raise UsageError.
SolverConfig config_from_json(const nlohmann::json& j, SolverConfig base = {});

/// Applies one "key=value" override.
void apply_override(SolverConfig& cfg, const std::string& assignment);

/// Reads a JSON config file (empty path gives the built-in defaults), applies
/// the overrides in order and validates the result.
SolverConfig load_config(const std::string& path, const std::vector<std::string>& overrides = {});

} // namespace fracdeblur::cli
