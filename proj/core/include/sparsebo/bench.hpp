#pragma once

#include <Eigen/Core>
#include <functional>
#include <string>
#include <vector>

#include "sparsebo/penalty.hpp"
#include "sparsebo/space.hpp"

namespace sparsebo {

/// Branin on its standard domain [-5,10] x [0,15]; global minimum ~0.397887.
double branin(double x1, double x2);
/// -log(10 + Branin), a maximization-friendly transform on the same domain.
double log_branin(double x1, double x2);
/// Hartmann-6 on [0,1]^6 in its standard (negative-valued) form.
double hartmann6(const Eigen::VectorXd& x6);

enum class BaseFunction { Branin, Hartmann6, LogBranin };

/// Low-dimensional test function embedded in a higher-dimensional unit cube;
/// the value depends only on the active coordinates.
struct EmbeddedSynthetic {
  BaseFunction base = BaseFunction::Branin;
  int ambient_dim = 50;
  std::vector<int> active_dims;  // defaults to the first arity coords
  bool negate = true;

  static EmbeddedSynthetic make(BaseFunction base, int ambient_dim);
  int arity() const;
  /// Unit cube with baseline at the normalized origin.
  SearchSpace space() const;
};

double eval_synthetic(const EmbeddedSynthetic& problem, const Eigen::VectorXd& x_unit);

/// One point of the objective-vs-sparsity trade-off h(theta).
struct TradeoffPoint {
  double theta = 0.0;
  double h = 0.0;
  bool feasible = false;
};

/// Brute-force h(theta) = max f subject to xi(x) ~= theta on a regular grid
/// over [0,1]^dim (dim <= 3). xi_scale converts the normalized penalty to the
/// units of theta; slack defaults to half the grid-induced penalty spacing.
std::vector<TradeoffPoint> tradeoff_oracle(
    const std::function<double(const Eigen::VectorXd&)>& f, const PenaltySpec& penalty,
    int dim, const std::vector<double>& theta_grid, int resolution,
    double xi_scale = 1.0, double slack = -1.0);

}  // namespace sparsebo
