#pragma once

#include <Eigen/Cholesky>
#include <Eigen/Core>
#include <cstdint>
#include <nlohmann/json_fwd.hpp>
#include <vector>

#include "sparsebo/space.hpp"

namespace sparsebo {

/// ARD Matern-5/2 hyperparameters. Lengthscales are stored as inverse-squared
/// values rho_i, so r^2 = sum_i rho_i (x_i - z_i)^2.
struct KernelParams {
  double outputscale = 1.0;
  Eigen::VectorXd inv_sq_lengthscales;
  double noise = 1e-2;  // observation noise variance, standardized units
  double mean = 0.0;    // constant prior mean, standardized units

  void validate() const;
};

double matern52(const Eigen::VectorXd& x, const Eigen::VectorXd& z,
                const KernelParams& params);

/// d k(x, z) / d x.
Eigen::VectorXd matern52_grad_x(const Eigen::VectorXd& x, const Eigen::VectorXd& z,
                                const KernelParams& params);

/// Log marginal likelihood of standardized targets under the kernel, with
/// gradients in the unconstrained parameterization (log outputscale,
/// log rho_i, log noise, mean).
struct LmlResult {
  double value = 0.0;
  double d_log_outputscale = 0.0;
  Eigen::VectorXd d_log_rho;
  double d_log_noise = 0.0;
  double d_mean = 0.0;
};
LmlResult log_marginal_likelihood(const Eigen::MatrixXd& X, const Eigen::VectorXd& y,
                                  const KernelParams& params, bool with_grad);

/// Posterior over the objective given one or more kernel hyperparameter
/// samples. Queries and training data live in the normalized unit cube;
/// predictions are in standardized units with (y_mean, y_std) for conversion.
class PosteriorEnsemble {
 public:
  /// Standardizes y_raw internally and caches one Cholesky factor per sample.
  PosteriorEnsemble(std::vector<KernelParams> samples, Eigen::MatrixXd train_x,
                    const Eigen::VectorXd& train_y_raw);

  /// Prior-only ensemble with no training data (n = 0).
  PosteriorEnsemble(std::vector<KernelParams> samples, int dim);

  int num_samples() const { return static_cast<int>(samples_.size()); }
  int dim() const { return dim_; }
  int num_train() const { return static_cast<int>(train_x_.rows()); }
  const std::vector<KernelParams>& samples() const { return samples_; }
  const Eigen::MatrixXd& train_x() const { return train_x_; }
  const Eigen::VectorXd& train_y_standardized() const { return train_y_std_; }
  double y_mean() const { return y_mean_; }
  double y_std() const { return y_std_; }
  bool degenerate_y() const { return degenerate_y_; }

  /// Marginal posterior at a single point, standardized units. Gradients of
  /// mean and variance with respect to x are filled when requested.
  struct PointPosterior {
    double mean = 0.0;
    double var = 0.0;  // includes observation noise, clamped at >= 0
    Eigen::VectorXd d_mean;
    Eigen::VectorXd d_var;
  };
  PointPosterior point_posterior(int sample, const Eigen::VectorXd& x,
                                 bool with_grad) const;

  /// Joint posterior over q query points, standardized units.
  void joint_posterior(int sample, const Eigen::MatrixXd& X, Eigen::VectorXd& mean,
                       Eigen::MatrixXd& cov) const;

  nlohmann::json to_json() const;

 private:
  void build_caches();

  std::vector<KernelParams> samples_;
  Eigen::MatrixXd train_x_;
  Eigen::VectorXd train_y_std_;
  double y_mean_ = 0.0;
  double y_std_ = 1.0;
  bool degenerate_y_ = false;
  int dim_ = 0;

  struct Cache {
    Eigen::LLT<Eigen::MatrixXd> llt;
    Eigen::VectorXd alpha;  // K^-1 (y - mean)
    double jitter = 0.0;
  };
  std::vector<Cache> caches_;
};

/// Builds the Gram matrix plus noise and factors it, escalating jitter from
/// 1e-8*outputscale by x10 up to 1e-4*outputscale. Throws if still singular.
Eigen::LLT<Eigen::MatrixXd> factor_gram(const Eigen::MatrixXd& K, double outputscale,
                                        double* jitter_used);

struct MapFitConfig {
  int num_restarts = 4;
  int max_iters = 200;
  std::uint64_t seed = 0;
};

/// MAP fit of a single kernel sample ("GPEI" surrogate): multi-start L-BFGS
/// ascent of the log marginal likelihood with weak priors.
PosteriorEnsemble fit_map(const ObservationLog& log, const MapFitConfig& config = {});

}  // namespace sparsebo
