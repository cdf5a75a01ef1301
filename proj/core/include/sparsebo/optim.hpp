#pragma once

#include <Eigen/Core>
#include <functional>

namespace sparsebo {

/// Differentiable scalar field: returns the value at x and, when grad is
/// non-null, writes the gradient into it.
using ObjectiveFn = std::function<double(const Eigen::VectorXd& x, Eigen::VectorXd* grad)>;

struct LbfgsConfig {
  int max_iters = 200;
  double grad_tol = 1e-8;  // on the projected gradient, infinity norm
  int memory = 8;
};

struct LbfgsResult {
  Eigen::VectorXd x;
  double f = 0.0;
  int iters = 0;
  bool converged = false;
  bool failed = false;  // non-finite objective at the start point
};

/// Maximizes f over the box [lower, upper] by projected L-BFGS ascent with
/// Armijo backtracking along the projected path. Deterministic.
LbfgsResult maximize_box(const ObjectiveFn& f, Eigen::VectorXd x0,
                         const Eigen::VectorXd& lower, const Eigen::VectorXd& upper,
                         const LbfgsConfig& config = {});

}  // namespace sparsebo
