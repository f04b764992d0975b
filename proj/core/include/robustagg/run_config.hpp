#pragma once

#include "robustagg/lp.hpp"
#include "robustagg/solver.hpp"

#include <string>

namespace robustagg {

/// A fully resolved run: the problem, the training configuration, and the
/// normalized JSON document with every default made explicit.
struct RunConfig {
  ProblemSpec problem;
  SolveConfig solve;
  std::string output_dir = "out";
  std::string resolved_json;
};

/// Parse and validate a run configuration. Unknown keys are rejected at
/// every level; defaults are filled in and recorded in resolved_json so that
/// re-running the resolved document reproduces the run bit for bit.
RunConfig parse_run_config_string(const std::string& text);
RunConfig parse_run_config_file(const std::string& path);

/// Grid instance for the LP commands:
///   { "points": [[...],...], "pieces": [{"a":[...],"b":0}], "rho": r,
///     "cost": {...} }
lp::DiscreteInstance parse_instance_string(const std::string& text);
lp::DiscreteInstance parse_instance_file(const std::string& path);

}  // namespace robustagg
