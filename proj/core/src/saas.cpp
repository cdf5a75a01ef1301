#include "sparsebo/saas.hpp"

#include <cmath>
#include <limits>
#include <stdexcept>

#include "sparsebo/math_util.hpp"

namespace sparsebo {

KernelParams saas_unpack(const Eigen::VectorXd& u, int d) {
  KernelParams p;
  p.inv_sq_lengthscales = u.segment(1, d).array().exp();
  p.outputscale = std::exp(u[d + 1]);
  p.noise = std::exp(u[d + 2]);
  p.mean = u[d + 3];
  return p;
}

double saas_log_density(const Eigen::MatrixXd& X, const Eigen::VectorXd& y,
                        const Eigen::VectorXd& u, const SaasConfig& config,
                        Eigen::VectorXd* grad) {
  const int d = static_cast<int>(X.cols());
  if (u.size() != saas_num_params(d)) {
    throw std::invalid_argument("saas_log_density: parameter vector size mismatch");
  }
  const double tau = std::exp(u[0]);
  KernelParams p = saas_unpack(u, d);

  LmlResult lml;
  try {
    lml = log_marginal_likelihood(X, y, p, grad != nullptr);
  } catch (const std::runtime_error&) {
    if (grad) grad->setZero(u.size());
    return -std::numeric_limits<double>::infinity();
  }

  double val = lml.value;
  if (grad) grad->setZero(u.size());

  // rho_i ~ HC(tau), plus Jacobian of rho = exp(log rho)
  double d_log_tau = 0.0;
  for (int i = 0; i < d; ++i) {
    double rho = p.inv_sq_lengthscales[i];
    double q = (rho / tau) * (rho / tau);
    val += log_half_cauchy(rho, tau) + u[1 + i];
    if (grad) (*grad)[1 + i] = lml.d_log_rho[i] + 1.0 - 2.0 * q / (1.0 + q);
    d_log_tau += 2.0 * q / (1.0 + q) - 1.0;
  }
  // tau ~ HC(alpha), plus Jacobian
  {
    double g = (tau / config.alpha) * (tau / config.alpha);
    val += log_half_cauchy(tau, config.alpha) + u[0];
    d_log_tau += 1.0 - 2.0 * g / (1.0 + g);
    if (grad) (*grad)[0] = d_log_tau;
  }
  // log outputscale ~ N(0, sd^2)
  {
    double sd2 = config.log_outputscale_sd * config.log_outputscale_sd;
    val += -0.5 * u[d + 1] * u[d + 1] / sd2;
    if (grad) (*grad)[d + 1] = lml.d_log_outputscale - u[d + 1] / sd2;
  }
  // noise ~ HC(noise_scale), plus Jacobian
  {
    double g = (p.noise / config.noise_scale) * (p.noise / config.noise_scale);
    val += log_half_cauchy(p.noise, config.noise_scale) + u[d + 2];
    if (grad) (*grad)[d + 2] = lml.d_log_noise + 1.0 - 2.0 * g / (1.0 + g);
  }
  // mean ~ N(0, sd^2)
  {
    double sd2 = config.mean_sd * config.mean_sd;
    val += -0.5 * u[d + 3] * u[d + 3] / sd2;
    if (grad) (*grad)[d + 3] = lml.d_mean - u[d + 3] / sd2;
  }
  return val;
}

PosteriorEnsemble fit_saas(const ObservationLog& log, const McmcConfig& mcmc,
                           const SaasConfig& config) {
  const int n = static_cast<int>(log.observations.size());
  if (n < 2) throw std::invalid_argument("fit_saas: need at least 2 observations");
  if (mcmc.thin < 1 || mcmc.num_samples < 1 || mcmc.num_samples % mcmc.thin != 0) {
    throw std::invalid_argument("fit_saas: num_samples must be a positive multiple of thin");
  }
  const int d = log.space.dims();
  Eigen::MatrixXd X(n, d);
  Eigen::VectorXd y_raw(n);
  for (int i = 0; i < n; ++i) {
    X.row(i) = log.observations[i].x;
    y_raw[i] = log.observations[i].y;
  }
  if (!y_raw.allFinite()) throw std::invalid_argument("fit_saas: non-finite objective values");

  double y_mean = y_raw.mean();
  double y_std = std::sqrt((y_raw.array() - y_mean).square().mean());
  if (y_std < 1e-12) y_std = 1e-12;
  Eigen::VectorXd y = (y_raw.array() - y_mean) / y_std;

  ObjectiveFn logp = [&X, &y, &config](const Eigen::VectorXd& u, Eigen::VectorXd* g) {
    return saas_log_density(X, y, u, config, g);
  };

  Eigen::VectorXd init(saas_num_params(d));
  init[0] = std::log(0.1);                                // tau
  init.segment(1, d).setConstant(std::log(0.1));          // rho
  init[d + 1] = 0.0;                                      // outputscale
  init[d + 2] = std::log(0.05);                           // noise
  init[d + 3] = 0.0;                                      // mean

  NutsConfig ncfg;
  ncfg.warmup = mcmc.warmup;
  ncfg.num_samples = mcmc.num_samples;
  ncfg.seed = mcmc.seed;
  ncfg.max_tree_depth = mcmc.max_tree_depth;
  std::vector<Eigen::VectorXd> draws = nuts_sample(logp, init, ncfg);

  std::vector<KernelParams> samples;
  samples.reserve(mcmc.num_samples / mcmc.thin);
  for (int i = mcmc.thin - 1; i < mcmc.num_samples; i += mcmc.thin) {
    samples.push_back(saas_unpack(draws[i], d));
  }
  return PosteriorEnsemble(std::move(samples), std::move(X), y_raw);
}

}  // namespace sparsebo
