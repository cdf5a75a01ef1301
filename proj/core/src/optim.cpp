#include "sparsebo/optim.hpp"

#include <cmath>
#include <deque>
#include <limits>

namespace sparsebo {

namespace {

Eigen::VectorXd project(const Eigen::VectorXd& x, const Eigen::VectorXd& lo,
                        const Eigen::VectorXd& hi) {
  return x.cwiseMax(lo).cwiseMin(hi);
}

double projected_grad_norm(const Eigen::VectorXd& x, const Eigen::VectorXd& g,
                           const Eigen::VectorXd& lo, const Eigen::VectorXd& hi) {
  // ascent: step along +g, measure how far the projected step can move
  return (project(x + g, lo, hi) - x).lpNorm<Eigen::Infinity>();
}

}  // namespace

LbfgsResult maximize_box(const ObjectiveFn& f, Eigen::VectorXd x0,
                         const Eigen::VectorXd& lower, const Eigen::VectorXd& upper,
                         const LbfgsConfig& config) {
  const int d = static_cast<int>(x0.size());
  LbfgsResult res;
  res.x = project(x0, lower, upper);

  Eigen::VectorXd g(d);
  double fx = f(res.x, &g);
  if (!std::isfinite(fx) || !g.allFinite()) {
    res.f = fx;
    res.failed = true;
    return res;
  }

  std::deque<Eigen::VectorXd> s_hist, y_hist;
  std::deque<double> rho_hist;

  for (int iter = 0; iter < config.max_iters; ++iter) {
    res.iters = iter;
    if (projected_grad_norm(res.x, g, lower, upper) <= config.grad_tol) {
      res.converged = true;
      break;
    }

    // two-loop recursion on the ascent gradient
    Eigen::VectorXd q = g;
    const int m = static_cast<int>(s_hist.size());
    std::vector<double> alpha(m);
    for (int i = m - 1; i >= 0; --i) {
      alpha[i] = rho_hist[i] * s_hist[i].dot(q);
      q -= alpha[i] * y_hist[i];
    }
    if (m > 0) {
      double gamma = s_hist.back().dot(y_hist.back()) / y_hist.back().squaredNorm();
      q *= gamma;
    }
    for (int i = 0; i < m; ++i) {
      double beta = rho_hist[i] * y_hist[i].dot(q);
      q += (alpha[i] - beta) * s_hist[i];
    }
    Eigen::VectorXd dir = q;
    if (dir.dot(g) <= 0.0) dir = g;  // not an ascent direction, fall back

    // backtracking along the projected path
    double t = 1.0;
    const double c1 = 1e-4;
    Eigen::VectorXd x_new;
    double f_new = -std::numeric_limits<double>::infinity();
    Eigen::VectorXd g_new(d);
    bool accepted = false;
    for (int ls = 0; ls < 40; ++ls) {
      x_new = project(res.x + t * dir, lower, upper);
      Eigen::VectorXd step = x_new - res.x;
      if (step.lpNorm<Eigen::Infinity>() < 1e-16) break;
      f_new = f(x_new, &g_new);
      if (std::isfinite(f_new) && g_new.allFinite() &&
          f_new >= fx + c1 * g.dot(step)) {
        accepted = true;
        break;
      }
      t *= 0.5;
    }
    if (!accepted) {
      res.converged = true;  // no admissible progress along the projected path
      break;
    }

    Eigen::VectorXd s = x_new - res.x;
    Eigen::VectorXd yv = g - g_new;  // curvature of -f: (-g_new) - (-g)
    double sy = s.dot(yv);
    if (sy > 1e-10 * s.norm() * yv.norm()) {
      s_hist.push_back(s);
      y_hist.push_back(yv);
      rho_hist.push_back(1.0 / sy);
      if (static_cast<int>(s_hist.size()) > config.memory) {
        s_hist.pop_front();
        y_hist.pop_front();
        rho_hist.pop_front();
      }
    }
    res.x = x_new;
    fx = f_new;
    g = g_new;
  }
  res.f = fx;
  return res;
}

}  // namespace sparsebo
