#include <doctest.h>

#include <Eigen/Dense>
#include <cmath>
#include <nlohmann/json.hpp>
#include <random>

#include "sparsebo/gp.hpp"
#include "sparsebo/math_util.hpp"
#include "sparsebo/nuts.hpp"
#include "sparsebo/saas.hpp"
#include "sparsebo/sobol.hpp"
#include "test_util.hpp"

using namespace sparsebo;

namespace {

KernelParams unit_params(int d) {
  KernelParams p;
  p.outputscale = 1.0;
  p.inv_sq_lengthscales = Eigen::VectorXd::Ones(d);
  p.noise = 1e-2;
  p.mean = 0.0;
  return p;
}

ObservationLog make_log(int n, int d, std::uint64_t seed,
                        const std::function<double(const Eigen::VectorXd&)>& f) {
  ObservationLog log;
  log.space = SearchSpace::unit_cube(d);
  log.seed = seed;
  for (const auto& x : sobol_init(log.space, n, seed)) log.append(x, f(x), 0.0);
  return log;
}

}  // namespace

TEST_CASE("matern52 closed-form values") {
  KernelParams p = unit_params(3);
  Eigen::VectorXd x = Eigen::VectorXd::Constant(3, 0.4);
  CHECK(matern52(x, x, p) == doctest::Approx(1.0).epsilon(1e-14));

  Eigen::VectorXd z = x;
  z[0] += 1.0;  // unit distance
  double r5 = std::sqrt(5.0);
  double expect = (1.0 + r5 + 5.0 / 3.0) * std::exp(-r5);
  CHECK(matern52(x, z, p) == doctest::Approx(expect).epsilon(1e-12));
  CHECK(expect == doctest::Approx(0.52400).epsilon(1e-4));
  CHECK(matern52(x, z, p) == matern52(z, x, p));
}

TEST_CASE("matern52 gradient matches finite differences") {
  std::mt19937_64 rng(3);
  std::uniform_real_distribution<double> unif(0.05, 0.95);
  KernelParams p = unit_params(4);
  p.inv_sq_lengthscales << 1.0, 4.0, 0.25, 2.0;
  for (int t = 0; t < 20; ++t) {
    Eigen::VectorXd x(4), z(4);
    for (int i = 0; i < 4; ++i) {
      x[i] = unif(rng);
      z[i] = unif(rng);
    }
    ObjectiveFn f = [&](const Eigen::VectorXd& q, Eigen::VectorXd* g) {
      if (g) *g = matern52_grad_x(q, z, p);
      return matern52(q, z, p);
    };
    CHECK(testutil::grad_rel_err(f, x) <= 1e-6);
  }
}

TEST_CASE("half-Cauchy log density") {
  CHECK(log_half_cauchy(1.0, 1.0) == doctest::Approx(-std::log(M_PI)).epsilon(1e-12));
  CHECK(log_half_cauchy(1e8, 1.0) < -30.0);
  CHECK(std::isinf(log_half_cauchy(-1.0, 1.0)));
  CHECK(log_half_cauchy(-1.0, 1.0) < 0.0);
}

TEST_CASE("log marginal likelihood gradients match finite differences") {
  auto log = make_log(12, 3, 5, [](const Eigen::VectorXd& x) {
    return std::sin(3.0 * x[0]) + x[1] * x[1];
  });
  Eigen::MatrixXd X(12, 3);
  Eigen::VectorXd y(12);
  for (int i = 0; i < 12; ++i) {
    X.row(i) = log.observations[i].x;
    y[i] = log.observations[i].y;
  }
  y = (y.array() - y.mean()) / std::sqrt((y.array() - y.mean()).square().mean());

  // unconstrained packing: [log s, log rho x3, log noise, mean]
  ObjectiveFn lml = [&](const Eigen::VectorXd& u, Eigen::VectorXd* g) {
    KernelParams p;
    p.outputscale = std::exp(u[0]);
    p.inv_sq_lengthscales = u.segment(1, 3).array().exp();
    p.noise = std::exp(u[4]);
    p.mean = u[5];
    auto r = log_marginal_likelihood(X, y, p, g != nullptr);
    if (g) {
      g->resize(6);
      (*g)[0] = r.d_log_outputscale;
      g->segment(1, 3) = r.d_log_rho;
      (*g)[4] = r.d_log_noise;
      (*g)[5] = r.d_mean;
    }
    return r.value;
  };
  Eigen::VectorXd u(6);
  u << 0.3, -0.2, 0.5, -1.0, -3.0, 0.1;
  CHECK(testutil::grad_rel_err(lml, u) <= 1e-5);
}

TEST_CASE("posterior matches a dense-matrix oracle on 3 points") {
  Eigen::MatrixXd X(3, 2);
  X << 0.1, 0.2, 0.5, 0.7, 0.9, 0.4;
  Eigen::VectorXd y(3);
  y << 0.3, -1.1, 0.8;
  KernelParams p = unit_params(2);
  p.outputscale = 1.7;
  p.inv_sq_lengthscales << 2.0, 0.5;
  p.noise = 0.05;
  p.mean = 0.2;

  PosteriorEnsemble ens({p}, X, y);
  Eigen::VectorXd ys = ens.train_y_standardized();

  Eigen::MatrixXd K(3, 3);
  for (int i = 0; i < 3; ++i)
    for (int j = 0; j < 3; ++j) K(i, j) = matern52(X.row(i), X.row(j), p);
  K.diagonal().array() += p.noise + 1e-8 * p.outputscale;  // base factorization jitter

  Eigen::VectorXd q(2);
  q << 0.33, 0.66;
  Eigen::VectorXd kq(3);
  for (int i = 0; i < 3; ++i) kq[i] = matern52(q, X.row(i), p);
  Eigen::VectorXd alpha = K.ldlt().solve((ys.array() - p.mean).matrix());
  double mean_oracle = p.mean + kq.dot(alpha);
  double var_oracle =
      p.outputscale - kq.dot(K.ldlt().solve(kq)) + p.noise;

  auto post = ens.point_posterior(0, q, false);
  CHECK(post.mean == doctest::Approx(mean_oracle).epsilon(1e-8));
  CHECK(post.var == doctest::Approx(var_oracle).epsilon(1e-8));
}

TEST_CASE("prior ensemble predicts the prior") {
  KernelParams p = unit_params(2);
  p.mean = 0.7;
  PosteriorEnsemble ens({p}, 2);
  auto post = ens.point_posterior(0, Eigen::Vector2d(0.3, 0.3), false);
  CHECK(post.mean == doctest::Approx(0.7).epsilon(1e-12));
  CHECK(post.var == doctest::Approx(p.outputscale + p.noise).epsilon(1e-12));
}

TEST_CASE("posterior mean and variance gradients match finite differences") {
  auto log = make_log(10, 2, 11, [](const Eigen::VectorXd& x) {
    return x[0] - 0.5 * x[1];
  });
  Eigen::MatrixXd X(10, 2);
  Eigen::VectorXd y(10);
  for (int i = 0; i < 10; ++i) {
    X.row(i) = log.observations[i].x;
    y[i] = log.observations[i].y;
  }
  KernelParams p = unit_params(2);
  p.inv_sq_lengthscales << 3.0, 1.5;
  PosteriorEnsemble ens({p}, X, y);

  std::mt19937_64 rng(13);
  std::uniform_real_distribution<double> unif(0.05, 0.95);
  for (int t = 0; t < 20; ++t) {
    Eigen::VectorXd q(2);
    q << unif(rng), unif(rng);
    ObjectiveFn mean_fn = [&](const Eigen::VectorXd& xx, Eigen::VectorXd* g) {
      auto post = ens.point_posterior(0, xx, g != nullptr);
      if (g) *g = post.d_mean;
      return post.mean;
    };
    ObjectiveFn var_fn = [&](const Eigen::VectorXd& xx, Eigen::VectorXd* g) {
      auto post = ens.point_posterior(0, xx, g != nullptr);
      if (g) *g = post.d_var;
      return post.var;
    };
    CHECK(testutil::grad_rel_err(mean_fn, q) <= 1e-4);
    CHECK(testutil::grad_rel_err(var_fn, q) <= 1e-4);
  }
}

TEST_CASE("fit_map handles constant labels") {
  ObservationLog log;
  log.space = SearchSpace::unit_cube(2);
  log.append(Eigen::Vector2d(0.1, 0.9), 3.5, 0.0);
  log.append(Eigen::Vector2d(0.8, 0.3), 3.5, 0.0);
  log.append(Eigen::Vector2d(0.4, 0.5), 3.5, 0.0);
  PosteriorEnsemble ens = fit_map(log);
  CHECK(ens.degenerate_y());
  auto post = ens.point_posterior(0, Eigen::Vector2d(0.6, 0.6), false);
  double raw_mean = ens.y_mean() + ens.y_std() * post.mean;
  CHECK(raw_mean == doctest::Approx(3.5).epsilon(1e-6));
}

TEST_CASE("fit_map interpolates noiseless smooth data") {
  auto log = make_log(9, 1, 17, [](const Eigen::VectorXd& x) { return 2.0 * x[0] - 1.0; });
  PosteriorEnsemble ens = fit_map(log);
  for (const auto& obs : log.observations) {
    auto post = ens.point_posterior(0, obs.x, false);
    double raw = ens.y_mean() + ens.y_std() * post.mean;
    // the fitted noise floor leaves a small residual at the training points
    CHECK(std::abs(raw - obs.y) <= 1e-3);
  }
}

TEST_CASE("saas log density gradient matches finite differences") {
  auto log = make_log(8, 3, 23, [](const Eigen::VectorXd& x) {
    return x[0] + std::cos(4.0 * x[2]);
  });
  Eigen::MatrixXd X(8, 3);
  Eigen::VectorXd y(8);
  for (int i = 0; i < 8; ++i) {
    X.row(i) = log.observations[i].x;
    y[i] = log.observations[i].y;
  }
  y = (y.array() - y.mean()) / std::sqrt((y.array() - y.mean()).square().mean());

  SaasConfig cfg;
  ObjectiveFn density = [&](const Eigen::VectorXd& u, Eigen::VectorXd* g) {
    return saas_log_density(X, y, u, cfg, g);
  };
  Eigen::VectorXd u(saas_num_params(3));
  u << -1.0, -0.5, 0.3, -2.0, 0.1, -2.5, 0.05;
  CHECK(testutil::grad_rel_err(density, u) <= 1e-5);
}

TEST_CASE("nuts samples a gaussian and is deterministic") {
  ObjectiveFn logp = [](const Eigen::VectorXd& x, Eigen::VectorXd* g) {
    if (g) *g = -x;
    return -0.5 * x.squaredNorm();
  };
  NutsConfig cfg;
  cfg.warmup = 300;
  cfg.num_samples = 600;
  cfg.seed = 5;
  auto draws = nuts_sample(logp, Eigen::VectorXd::Constant(2, 1.5), cfg);
  REQUIRE(draws.size() == 600);
  Eigen::Vector2d mean = Eigen::Vector2d::Zero();
  for (const auto& d : draws) mean += d;
  mean /= draws.size();
  double var = 0.0;
  for (const auto& d : draws) var += (d - mean).squaredNorm();
  var /= 2.0 * draws.size();
  CHECK(std::abs(mean[0]) < 0.25);
  CHECK(std::abs(mean[1]) < 0.25);
  CHECK(var == doctest::Approx(1.0).epsilon(0.3));

  auto again = nuts_sample(logp, Eigen::VectorXd::Constant(2, 1.5), cfg);
  for (std::size_t i = 0; i < draws.size(); ++i) CHECK(draws[i] == again[i]);
}

TEST_CASE("fit_saas determinism and sample count") {
  auto log = make_log(10, 4, 31, [](const Eigen::VectorXd& x) { return x[0]; });
  McmcConfig mcmc;
  mcmc.warmup = 64;
  mcmc.num_samples = 32;
  mcmc.thin = 8;
  mcmc.seed = 2;
  PosteriorEnsemble a = fit_saas(log, mcmc);
  PosteriorEnsemble b = fit_saas(log, mcmc);
  REQUIRE(a.num_samples() == 4);
  for (int s = 0; s < a.num_samples(); ++s) {
    CHECK(a.samples()[s].inv_sq_lengthscales == b.samples()[s].inv_sq_lengthscales);
    CHECK(a.samples()[s].outputscale == b.samples()[s].outputscale);
    CHECK(a.samples()[s].noise == b.samples()[s].noise);
  }
}

TEST_CASE("ensemble serializes to json") {
  auto log = make_log(6, 2, 37, [](const Eigen::VectorXd& x) { return x.sum(); });
  PosteriorEnsemble ens = fit_map(log);
  auto j = ens.to_json();
  CHECK(j.contains("samples"));
  CHECK(j.contains("y_mean"));
}
