#pragma once

#include "robustagg/solver.hpp"

#include <string>

namespace robustagg {

/// Trained potentials plus everything needed to rebuild the problem:
/// the resolved run configuration and the seed.
struct Checkpoint {
  DualPotentials potentials;
  std::string resolved_config_json;  // empty when saved without a config
  std::uint64_t seed = 0;
};

/// Versioned JSON checkpoint: layer shapes plus row-major parameter arrays.
void save_checkpoint(const std::string& path, const Checkpoint& ck);
Checkpoint load_checkpoint(const std::string& path);

}  // namespace robustagg
