#include "sparsebo/gp.hpp"

#include <cmath>
#include <limits>
#include <nlohmann/json.hpp>
#include <random>
#include <stdexcept>

#include "sparsebo/math_util.hpp"
#include "sparsebo/optim.hpp"

namespace sparsebo {

namespace {
constexpr double kSqrt5 = 2.2360679774997896964;
constexpr double kLog2Pi = 1.8378770664093454836;

// Pairwise weighted distance r_jk with r^2 = sum_i rho_i (x_j - x_k)^2.
Eigen::MatrixXd weighted_distances(const Eigen::MatrixXd& X, const Eigen::VectorXd& rho) {
  const Eigen::MatrixXd Xw = X * rho.cwiseSqrt().asDiagonal();
  const Eigen::VectorXd sq = Xw.rowwise().squaredNorm();
  Eigen::MatrixXd r2 = sq.replicate(1, X.rows()) + sq.transpose().replicate(X.rows(), 1) -
                       2.0 * Xw * Xw.transpose();
  return r2.cwiseMax(0.0).cwiseSqrt();
}

double matern52_from_r(double r) {
  return (1.0 + kSqrt5 * r + (5.0 / 3.0) * r * r) * std::exp(-kSqrt5 * r);
}
}  // namespace

void KernelParams::validate() const {
  auto ok = [](double v) { return std::isfinite(v) && v > 0.0; };
  if (!ok(outputscale) || !ok(noise) || !std::isfinite(mean)) {
    throw std::invalid_argument("KernelParams: non-positive or non-finite parameter");
  }
  for (int i = 0; i < inv_sq_lengthscales.size(); ++i) {
    if (!ok(inv_sq_lengthscales[i])) {
      throw std::invalid_argument("KernelParams: non-positive inverse-squared lengthscale");
    }
  }
}

double matern52(const Eigen::VectorXd& x, const Eigen::VectorXd& z,
                const KernelParams& params) {
  if (x.size() != z.size() || x.size() != params.inv_sq_lengthscales.size()) {
    throw std::invalid_argument("matern52: dimension mismatch");
  }
  const Eigen::VectorXd d = x - z;
  double r2 = (params.inv_sq_lengthscales.array() * d.array().square()).sum();
  return params.outputscale * matern52_from_r(std::sqrt(std::max(r2, 0.0)));
}

Eigen::VectorXd matern52_grad_x(const Eigen::VectorXd& x, const Eigen::VectorXd& z,
                                const KernelParams& params) {
  const Eigen::VectorXd d = x - z;
  double r = std::sqrt(
      std::max((params.inv_sq_lengthscales.array() * d.array().square()).sum(), 0.0));
  // dk/dx_i = -(5/3) s (1 + sqrt5 r) exp(-sqrt5 r) rho_i (x_i - z_i)
  double c = -(5.0 / 3.0) * params.outputscale * (1.0 + kSqrt5 * r) * std::exp(-kSqrt5 * r);
  return c * params.inv_sq_lengthscales.cwiseProduct(d);
}

Eigen::LLT<Eigen::MatrixXd> factor_gram(const Eigen::MatrixXd& K, double outputscale,
                                        double* jitter_used) {
  double jitter = 1e-8 * outputscale;
  const double max_jitter = 1e-4 * outputscale;
  Eigen::MatrixXd Kj = K;
  while (true) {
    Kj = K + jitter * Eigen::MatrixXd::Identity(K.rows(), K.cols());
    Eigen::LLT<Eigen::MatrixXd> llt(Kj);
    if (llt.info() == Eigen::Success) {
      if (jitter_used) *jitter_used = jitter;
      return llt;
    }
    if (jitter >= max_jitter) {
      throw std::runtime_error("factor_gram: Gram matrix singular even at maximal jitter");
    }
    jitter *= 10.0;
  }
}

LmlResult log_marginal_likelihood(const Eigen::MatrixXd& X, const Eigen::VectorXd& y,
                                  const KernelParams& params, bool with_grad) {
  params.validate();
  const int n = static_cast<int>(X.rows());
  const int d = static_cast<int>(X.cols());
  const Eigen::MatrixXd R = weighted_distances(X, params.inv_sq_lengthscales);
  Eigen::MatrixXd A(n, n);
  for (int j = 0; j < n; ++j) {
    for (int k = 0; k <= j; ++k) {
      A(j, k) = A(k, j) = matern52_from_r(R(j, k));
    }
  }
  Eigen::MatrixXd K = params.outputscale * A;
  K.diagonal().array() += params.noise;
  double jitter = 0.0;
  Eigen::LLT<Eigen::MatrixXd> llt = factor_gram(K, params.outputscale, &jitter);

  const Eigen::VectorXd resid = y.array() - params.mean;
  const Eigen::VectorXd alpha = llt.solve(resid);

  LmlResult res;
  double logdet = 0.0;
  for (int i = 0; i < n; ++i) logdet += std::log(llt.matrixLLT()(i, i));
  res.value = -0.5 * resid.dot(alpha) - logdet - 0.5 * n * kLog2Pi;

  if (!with_grad) return res;

  Eigen::MatrixXd Kinv = llt.solve(Eigen::MatrixXd::Identity(n, n));
  Eigen::MatrixXd M = alpha * alpha.transpose() - Kinv;

  // d/d log outputscale: dK = outputscale * A
  res.d_log_outputscale =
      0.5 * params.outputscale * (M.array() * A.array()).sum();
  // d/d log noise: dK = noise * I
  res.d_log_noise = 0.5 * params.noise * M.trace();
  res.d_mean = alpha.sum();

  // d/d rho_i via C_jk = -(5/6) s (1 + sqrt5 r) exp(-sqrt5 r) applied to
  // squared coordinate differences; contracted as 2(sum_j u_j x_ji^2 - x_i' W x_i).
  Eigen::MatrixXd C(n, n);
  for (int j = 0; j < n; ++j) {
    for (int k = 0; k <= j; ++k) {
      double r = R(j, k);
      C(j, k) = C(k, j) =
          -(5.0 / 6.0) * params.outputscale * (1.0 + kSqrt5 * r) * std::exp(-kSqrt5 * r);
    }
  }
  Eigen::MatrixXd W = M.cwiseProduct(C);
  Eigen::VectorXd u = W.rowwise().sum();
  Eigen::MatrixXd V = W * X;  // n x d
  res.d_log_rho.resize(d);
  for (int i = 0; i < d; ++i) {
    double s1 = X.col(i).array().square().matrix().dot(u);
    double s2 = X.col(i).dot(V.col(i));
    res.d_log_rho[i] = 0.5 * params.inv_sq_lengthscales[i] * 2.0 * (s1 - s2);
  }
  return res;
}

PosteriorEnsemble::PosteriorEnsemble(std::vector<KernelParams> samples,
                                     Eigen::MatrixXd train_x,
                                     const Eigen::VectorXd& train_y_raw)
    : samples_(std::move(samples)), train_x_(std::move(train_x)) {
  if (samples_.empty()) throw std::invalid_argument("PosteriorEnsemble: no samples");
  dim_ = static_cast<int>(train_x_.cols());
  const int n = static_cast<int>(train_x_.rows());
  if (train_y_raw.size() != n) {
    throw std::invalid_argument("PosteriorEnsemble: x/y size mismatch");
  }
  if (!train_y_raw.allFinite()) {
    throw std::invalid_argument("PosteriorEnsemble: non-finite objective values");
  }
  y_mean_ = train_y_raw.mean();
  double var = (train_y_raw.array() - y_mean_).square().mean();
  y_std_ = std::sqrt(var);
  if (y_std_ < 1e-12) {
    y_std_ = 1e-12;
    degenerate_y_ = true;
  }
  train_y_std_ = (train_y_raw.array() - y_mean_) / y_std_;
  build_caches();
}

PosteriorEnsemble::PosteriorEnsemble(std::vector<KernelParams> samples, int dim)
    : samples_(std::move(samples)), dim_(dim) {
  if (samples_.empty()) throw std::invalid_argument("PosteriorEnsemble: no samples");
  train_x_.resize(0, dim);
  train_y_std_.resize(0);
  build_caches();
}

void PosteriorEnsemble::build_caches() {
  const int n = num_train();
  caches_.resize(samples_.size());
  for (std::size_t m = 0; m < samples_.size(); ++m) {
    samples_[m].validate();
    if (n == 0) continue;
    const KernelParams& p = samples_[m];
    const Eigen::MatrixXd R = weighted_distances(train_x_, p.inv_sq_lengthscales);
    Eigen::MatrixXd K(n, n);
    for (int j = 0; j < n; ++j) {
      for (int k = 0; k <= j; ++k) {
        K(j, k) = K(k, j) = p.outputscale * matern52_from_r(R(j, k));
      }
    }
    K.diagonal().array() += p.noise;
    caches_[m].llt = factor_gram(K, p.outputscale, &caches_[m].jitter);
    caches_[m].alpha = caches_[m].llt.solve((train_y_std_.array() - p.mean).matrix());
  }
}

PosteriorEnsemble::PointPosterior PosteriorEnsemble::point_posterior(
    int sample, const Eigen::VectorXd& x, bool with_grad) const {
  const KernelParams& p = samples_.at(sample);
  const int n = num_train();
  PointPosterior out;
  if (n == 0) {
    out.mean = p.mean;
    out.var = p.outputscale + p.noise;
    if (with_grad) {
      out.d_mean = Eigen::VectorXd::Zero(dim_);
      out.d_var = Eigen::VectorXd::Zero(dim_);
    }
    return out;
  }
  const Cache& cache = caches_[sample];
  Eigen::VectorXd kstar(n);
  for (int j = 0; j < n; ++j) kstar[j] = matern52(x, train_x_.row(j), p);
  out.mean = p.mean + kstar.dot(cache.alpha);
  Eigen::VectorXd kinv_kstar = cache.llt.solve(kstar);
  out.var = std::max(p.outputscale + p.noise - kstar.dot(kinv_kstar), 0.0);
  if (with_grad) {
    Eigen::MatrixXd J(n, dim_);  // d kstar / d x
    for (int j = 0; j < n; ++j) J.row(j) = matern52_grad_x(x, train_x_.row(j), p);
    out.d_mean = J.transpose() * cache.alpha;
    out.d_var = -2.0 * (J.transpose() * kinv_kstar);
  }
  return out;
}

void PosteriorEnsemble::joint_posterior(int sample, const Eigen::MatrixXd& X,
                                        Eigen::VectorXd& mean, Eigen::MatrixXd& cov) const {
  const KernelParams& p = samples_.at(sample);
  const int q = static_cast<int>(X.rows());
  const int n = num_train();
  Eigen::MatrixXd Kss(q, q);
  for (int a = 0; a < q; ++a) {
    for (int b = 0; b <= a; ++b) {
      Kss(a, b) = Kss(b, a) = matern52(X.row(a), X.row(b), p);
    }
  }
  if (n == 0) {
    mean = Eigen::VectorXd::Constant(q, p.mean);
    cov = Kss + p.noise * Eigen::MatrixXd::Identity(q, q);
    return;
  }
  const Cache& cache = caches_[sample];
  Eigen::MatrixXd Ksn(q, n);
  for (int a = 0; a < q; ++a) {
    for (int j = 0; j < n; ++j) Ksn(a, j) = matern52(X.row(a), train_x_.row(j), p);
  }
  mean = Eigen::VectorXd::Constant(q, p.mean) + Ksn * cache.alpha;
  cov = Kss - Ksn * cache.llt.solve(Ksn.transpose());
  cov = 0.5 * (cov + cov.transpose());  // symmetrize
  cov.diagonal() = cov.diagonal().cwiseMax(0.0);
  cov.diagonal().array() += p.noise;
}

nlohmann::json PosteriorEnsemble::to_json() const {
  nlohmann::json j;
  j["y_mean"] = y_mean_;
  j["y_std"] = y_std_;
  j["degenerate_y"] = degenerate_y_;
  nlohmann::json arr = nlohmann::json::array();
  for (const auto& p : samples_) {
    nlohmann::json jp;
    jp["outputscale"] = p.outputscale;
    jp["inv_sq_lengthscales"] =
        std::vector<double>(p.inv_sq_lengthscales.begin(), p.inv_sq_lengthscales.end());
    jp["noise"] = p.noise;
    jp["mean"] = p.mean;
    arr.push_back(std::move(jp));
  }
  j["samples"] = std::move(arr);
  return j;
}

namespace {

// Unconstrained packing for MAP: [log s, log rho (D), log noise, mean].
KernelParams unpack_map(const Eigen::VectorXd& u, int d) {
  KernelParams p;
  p.outputscale = std::exp(u[0]);
  p.inv_sq_lengthscales = u.segment(1, d).array().exp();
  p.noise = std::exp(u[d + 1]);
  p.mean = u[d + 2];
  return p;
}

}  // namespace

PosteriorEnsemble fit_map(const ObservationLog& log, const MapFitConfig& config) {
  const int n = static_cast<int>(log.observations.size());
  if (n < 2) throw std::invalid_argument("fit_map: need at least 2 observations");
  const int d = log.space.dims();
  Eigen::MatrixXd X(n, d);
  Eigen::VectorXd y_raw(n);
  for (int i = 0; i < n; ++i) {
    X.row(i) = log.observations[i].x;
    y_raw[i] = log.observations[i].y;
  }
  if (!y_raw.allFinite()) throw std::invalid_argument("fit_map: non-finite objective values");

  double y_mean = y_raw.mean();
  double y_std = std::sqrt((y_raw.array() - y_mean).square().mean());
  if (y_std < 1e-12) y_std = 1e-12;
  Eigen::VectorXd y = (y_raw.array() - y_mean) / y_std;

  // Penalized log marginal likelihood with weak priors:
  // log s ~ N(0, 2^2), log rho ~ N(0, 3^2), noise ~ HC(0.1), mean ~ N(0, 1).
  ObjectiveFn objective = [&](const Eigen::VectorXd& u, Eigen::VectorXd* grad) {
    KernelParams p = unpack_map(u, d);
    LmlResult lml;
    try {
      lml = log_marginal_likelihood(X, y, p, grad != nullptr);
    } catch (const std::runtime_error&) {
      if (grad) grad->setZero(u.size());
      return -std::numeric_limits<double>::infinity();
    }
    double val = lml.value;
    val += -u[0] * u[0] / 8.0;
    val += -(u.segment(1, d).array().square() / 18.0).sum();
    double g_noise = (p.noise / 0.1) * (p.noise / 0.1);
    val += log_half_cauchy(p.noise, 0.1) + u[d + 1];
    val += -0.5 * u[d + 2] * u[d + 2];
    if (grad) {
      grad->resize(u.size());
      (*grad)[0] = lml.d_log_outputscale - u[0] / 4.0;
      grad->segment(1, d) = lml.d_log_rho - u.segment(1, d) / 9.0;
      (*grad)[d + 1] = lml.d_log_noise + 1.0 - 2.0 * g_noise / (1.0 + g_noise);
      (*grad)[d + 2] = lml.d_mean - u[d + 2];
    }
    return val;
  };

  const Eigen::VectorXd lo = Eigen::VectorXd::Constant(d + 3, -20.0);
  const Eigen::VectorXd hi = Eigen::VectorXd::Constant(d + 3, 20.0);

  std::vector<Eigen::VectorXd> starts;
  Eigen::VectorXd u0 = Eigen::VectorXd::Zero(d + 3);
  u0[d + 1] = std::log(1e-2);
  starts.push_back(u0);
  Eigen::VectorXd u1 = u0;
  u1.segment(1, d).setConstant(std::log(1.0 / d));
  starts.push_back(u1);
  std::mt19937_64 rng(config.seed);
  std::normal_distribution<double> gauss(0.0, 1.0);
  while (static_cast<int>(starts.size()) < config.num_restarts) {
    Eigen::VectorXd u = u0;
    for (int i = 0; i <= d; ++i) u[i] += gauss(rng);
    u[d + 1] += gauss(rng);
    starts.push_back(u);
  }

  LbfgsConfig lcfg;
  lcfg.max_iters = config.max_iters;
  double best_val = -std::numeric_limits<double>::infinity();
  Eigen::VectorXd best_u;
  for (const auto& s : starts) {
    LbfgsResult r = maximize_box(objective, s, lo, hi, lcfg);
    if (!r.failed && std::isfinite(r.f) && r.f > best_val) {
      best_val = r.f;
      best_u = r.x;
    }
  }
  if (!best_u.size()) throw std::runtime_error("fit_map: all restarts failed");

  return PosteriorEnsemble({unpack_map(best_u, d)}, X, y_raw);
}

}  // namespace sparsebo
