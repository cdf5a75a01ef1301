#pragma once

#include <Eigen/Core>
#include <cstdint>
#include <functional>
#include <vector>

#include "sparsebo/optim.hpp"

namespace sparsebo {

struct NutsConfig {
  int warmup = 256;
  int num_samples = 128;
  int max_tree_depth = 6;
  double target_accept = 0.8;
  double init_step = 0.1;
  std::uint64_t seed = 0;
};

/// No-U-Turn sampler with dual-averaging step-size adaptation (identity mass
/// matrix). Non-finite leapfrog states terminate the trajectory as
/// divergences. Returns num_samples draws after warmup, deterministic given
/// the seed.
std::vector<Eigen::VectorXd> nuts_sample(const ObjectiveFn& log_density,
                                         Eigen::VectorXd init, const NutsConfig& config);

}  // namespace sparsebo
