// Task orchestration: executes a validated RunConfig, writes every
// artifact and the report, and returns the process exit status
// (0 pass, 2 assertion failure, 3 divergence; usage errors throw
// ConfigError and map to 1 in the CLI).
#pragma once

#include <string>

#include "rns/config.hpp"

namespace rns::cli {

int run_task(const RunConfig& cfg);

/// Convenience: load, validate, run. ConfigError propagates.
int run_config_file(const std::string& path);

} // namespace rns::cli
