#pragma once

#include <Eigen/Core>
#include <cstdint>

#include "sparsebo/gp.hpp"
#include "sparsebo/nuts.hpp"
#include "sparsebo/space.hpp"

namespace sparsebo {

/// Hyperpriors of the sparse axis-aligned subspace model: a global
/// half-Cauchy scale alpha on the shrinkage tau, with rho_i ~ HC(tau).
struct SaasConfig {
  double alpha = 0.1;
  double noise_scale = 0.1;      // half-Cauchy scale of the noise prior
  double log_outputscale_sd = 2.0;
  double mean_sd = 1.0;
};

struct McmcConfig {
  int warmup = 256;
  int num_samples = 128;
  int thin = 8;
  std::uint64_t seed = 0;
  int max_tree_depth = 6;
};

/// Number of unconstrained parameters for dimension d:
/// [log tau, log rho_0..d-1, log outputscale, log noise, mean].
inline int saas_num_params(int d) { return d + 4; }

/// Log posterior density of the SAAS model in unconstrained coordinates
/// (includes log-transform Jacobians), with analytic gradient.
/// X: n x d normalized inputs, y: standardized targets.
double saas_log_density(const Eigen::MatrixXd& X, const Eigen::VectorXd& y,
                        const Eigen::VectorXd& u, const SaasConfig& config,
                        Eigen::VectorXd* grad);

KernelParams saas_unpack(const Eigen::VectorXd& u, int d);

/// SAAS posterior ensemble via NUTS over the unconstrained parameters.
/// Returns num_samples / thin kernel samples; deterministic given the seed.
PosteriorEnsemble fit_saas(const ObservationLog& log, const McmcConfig& mcmc,
                           const SaasConfig& config = {});

}  // namespace sparsebo
