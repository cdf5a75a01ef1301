#include "sparsebo/acquisition.hpp"

#include <cmath>
#include <stdexcept>

#include "sparsebo/math_util.hpp"

namespace sparsebo {

namespace {
constexpr double kSigmaFloor = 1e-12;

struct RawMarginal {
  double mu, sigma;            // raw units
  Eigen::VectorXd d_mu, d_sigma;
};

RawMarginal raw_marginal(const PosteriorEnsemble& ens, int sample,
                         const Eigen::VectorXd& x, bool with_grad) {
  auto post = ens.point_posterior(sample, x, with_grad);
  RawMarginal m;
  double sd = std::sqrt(std::max(post.var, 0.0));
  m.mu = ens.y_mean() + ens.y_std() * post.mean;
  m.sigma = ens.y_std() * sd;
  if (with_grad) {
    m.d_mu = ens.y_std() * post.d_mean;
    if (sd > kSigmaFloor) {
      m.d_sigma = ens.y_std() * post.d_var / (2.0 * sd);
    } else {
      m.d_sigma = Eigen::VectorXd::Zero(x.size());
    }
  }
  return m;
}
}  // namespace

double ei_analytic(double mu, double sigma, double incumbent) {
  if (std::isnan(mu) || std::isnan(sigma) || std::isnan(incumbent)) {
    throw std::invalid_argument("ei_analytic: NaN input");
  }
  if (sigma < 0.0) throw std::invalid_argument("ei_analytic: negative sigma");
  double diff = mu - incumbent;
  if (sigma <= kSigmaFloor) return std::max(diff, 0.0);
  double z = diff / sigma;
  return diff * normal_cdf(z) + sigma * normal_pdf(z);
}

void ei_analytic_grad(double mu, double sigma, double incumbent, double* d_mu,
                      double* d_sigma) {
  double diff = mu - incumbent;
  if (sigma <= kSigmaFloor) {
    if (d_mu) *d_mu = diff > 0.0 ? 1.0 : 0.0;
    if (d_sigma) *d_sigma = 0.0;
    return;
  }
  double z = diff / sigma;
  if (d_mu) *d_mu = normal_cdf(z);
  if (d_sigma) *d_sigma = normal_pdf(z);
}

double ucb(double mu, double sigma, double beta) {
  if (beta < 0.0) throw std::invalid_argument("ucb: beta must be >= 0");
  return mu + std::sqrt(beta) * sigma;
}

double chebyshev_scalarize(double f_val, double xi_val, const ChebyshevSpec& spec) {
  return spec.C * (f_val - spec.lambda * xi_val) -
         std::max(spec.f_star_estimate - f_val, spec.lambda * xi_val);
}

AcqFn make_ei(const PosteriorEnsemble& ensemble, double incumbent_raw) {
  return [&ensemble, incumbent_raw](const Eigen::VectorXd& x, Eigen::VectorXd* grad) {
    const int m = ensemble.num_samples();
    double total = 0.0;
    if (grad) grad->setZero(x.size());
    for (int s = 0; s < m; ++s) {
      RawMarginal mar = raw_marginal(ensemble, s, x, grad != nullptr);
      total += ei_analytic(mar.mu, mar.sigma, incumbent_raw);
      if (grad) {
        double dmu, dsig;
        ei_analytic_grad(mar.mu, mar.sigma, incumbent_raw, &dmu, &dsig);
        *grad += dmu * mar.d_mu + dsig * mar.d_sigma;
      }
    }
    if (grad) *grad /= m;
    return total / m;
  };
}

AcqFn make_ucb(const PosteriorEnsemble& ensemble, double beta) {
  return [&ensemble, beta](const Eigen::VectorXd& x, Eigen::VectorXd* grad) {
    const int m = ensemble.num_samples();
    double total = 0.0;
    if (grad) grad->setZero(x.size());
    double sqrt_beta = std::sqrt(beta);
    for (int s = 0; s < m; ++s) {
      RawMarginal mar = raw_marginal(ensemble, s, x, grad != nullptr);
      total += mar.mu + sqrt_beta * mar.sigma;
      if (grad) *grad += mar.d_mu + sqrt_beta * mar.d_sigma;
    }
    if (grad) *grad /= m;
    return total / m;
  };
}

AcqFn make_ei_er(const PosteriorEnsemble& ensemble, double incumbent_raw,
                 PenaltySpec smooth_penalty, double lambda) {
  AcqFn ei = make_ei(ensemble, incumbent_raw);
  return [ei, penalty = std::move(smooth_penalty), lambda](const Eigen::VectorXd& x,
                                                           Eigen::VectorXd* grad) {
    double value = ei(x, grad);
    if (lambda != 0.0) {
      Eigen::VectorXd pg;
      double xi = eval_smooth_grad(penalty, x, grad ? &pg : nullptr);
      value -= lambda * xi;
      if (grad) *grad -= lambda * pg;
    }
    return value;
  };
}

AcqFn make_ei_ir(const PosteriorEnsemble& ensemble, double incumbent_g_raw,
                 PenaltySpec smooth_penalty, double lambda,
                 std::vector<double> base_samples) {
  if (base_samples.empty()) {
    throw std::invalid_argument("make_ei_ir: need at least one base sample");
  }
  return [&ensemble, incumbent_g_raw, penalty = std::move(smooth_penalty), lambda,
          base = std::move(base_samples)](const Eigen::VectorXd& x,
                                          Eigen::VectorXd* grad) {
    const int m = ensemble.num_samples();
    if (grad) grad->setZero(x.size());
    Eigen::VectorXd pg;
    double xi = lambda != 0.0
                    ? eval_smooth_grad(penalty, x, grad ? &pg : nullptr)
                    : 0.0;
    double total = 0.0;
    for (int s = 0; s < m; ++s) {
      RawMarginal mar = raw_marginal(ensemble, s, x, grad != nullptr);
      for (double z : base) {
        double g = mar.mu + mar.sigma * z - lambda * xi - incumbent_g_raw;
        if (g > 0.0) {
          total += g;
          if (grad) {
            *grad += mar.d_mu + z * mar.d_sigma;
            if (lambda != 0.0) *grad -= lambda * pg;
          }
        }
      }
    }
    const double scale = static_cast<double>(m) * base.size();
    if (grad) *grad /= scale;
    return total / scale;
  };
}

AcqFn make_sebo(const PosteriorEnsemble& ensemble, Frontier frontier,
                PenaltySpec smooth_penalty, std::vector<double> base_samples) {
  if (base_samples.empty()) {
    throw std::invalid_argument("make_sebo: need at least one base sample");
  }
  return [&ensemble, front = std::move(frontier), penalty = std::move(smooth_penalty),
          base = std::move(base_samples)](const Eigen::VectorXd& x,
                                          Eigen::VectorXd* grad) {
    const int m = ensemble.num_samples();
    if (grad) grad->setZero(x.size());
    Eigen::VectorXd pg;
    double xi = eval_smooth_grad(penalty, x, grad ? &pg : nullptr);
    const double v = -xi;  // deterministic sparsity objective
    double total = 0.0;
    for (int s = 0; s < m; ++s) {
      RawMarginal mar = raw_marginal(ensemble, s, x, grad != nullptr);
      for (double z : base) {
        double u = mar.mu + mar.sigma * z;
        double du = 0.0, dv = 0.0;
        total += hvi_2d(front, u, v, grad ? &du : nullptr, grad ? &dv : nullptr);
        if (grad) {
          *grad += du * (mar.d_mu + z * mar.d_sigma);
          *grad -= dv * pg;
        }
      }
    }
    const double scale = static_cast<double>(m) * base.size();
    if (grad) *grad /= scale;
    return total / scale;
  };
}

AcqFn make_chebyshev_ei(const PosteriorEnsemble& ensemble, double incumbent_t_raw,
                        PenaltySpec smooth_penalty, ChebyshevSpec spec,
                        std::vector<double> base_samples) {
  if (base_samples.empty()) {
    throw std::invalid_argument("make_chebyshev_ei: need at least one base sample");
  }
  return [&ensemble, incumbent_t_raw, penalty = std::move(smooth_penalty), spec,
          base = std::move(base_samples)](const Eigen::VectorXd& x,
                                          Eigen::VectorXd* grad) {
    const int m = ensemble.num_samples();
    if (grad) grad->setZero(x.size());
    Eigen::VectorXd pg;
    double xi = eval_smooth_grad(penalty, x, grad ? &pg : nullptr);
    double total = 0.0;
    for (int s = 0; s < m; ++s) {
      RawMarginal mar = raw_marginal(ensemble, s, x, grad != nullptr);
      for (double z : base) {
        double f = mar.mu + mar.sigma * z;
        double t = chebyshev_scalarize(f, xi, spec);
        double imp = t - incumbent_t_raw;
        if (imp > 0.0) {
          total += imp;
          if (grad) {
            // dT/df and dT/dxi on the active branch of the max
            double df = spec.C;
            double dxi = -spec.C * spec.lambda;
            if (spec.f_star_estimate - f > spec.lambda * xi) {
              df += 1.0;
            } else {
              dxi -= spec.lambda;
            }
            *grad += df * (mar.d_mu + z * mar.d_sigma) + dxi * pg;
          }
        }
      }
    }
    const double scale = static_cast<double>(m) * base.size();
    if (grad) *grad /= scale;
    return total / scale;
  };
}

}  // namespace sparsebo
