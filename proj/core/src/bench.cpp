#include "sparsebo/bench.hpp"

#include <cmath>
#include <limits>
#include <stdexcept>

namespace sparsebo {

double branin(double x1, double x2) {
  constexpr double pi = 3.14159265358979323846;
  const double b = 5.1 / (4.0 * pi * pi);
  const double c = 5.0 / pi;
  const double t = 1.0 / (8.0 * pi);
  double term = x2 - b * x1 * x1 + c * x1 - 6.0;
  return term * term + 10.0 * (1.0 - t) * std::cos(x1) + 10.0;
}

double log_branin(double x1, double x2) { return -std::log(10.0 + branin(x1, x2)); }

double hartmann6(const Eigen::VectorXd& x6) {
  if (x6.size() != 6) throw std::invalid_argument("hartmann6: need 6 coordinates");
  static const double alpha[4] = {1.0, 1.2, 3.0, 3.2};
  static const double A[4][6] = {{10, 3, 17, 3.5, 1.7, 8},
                                 {0.05, 10, 17, 0.1, 8, 14},
                                 {3, 3.5, 1.7, 10, 17, 8},
                                 {17, 8, 0.05, 10, 0.1, 14}};
  static const double P[4][6] = {
      {0.1312, 0.1696, 0.5569, 0.0124, 0.8283, 0.5886},
      {0.2329, 0.4135, 0.8307, 0.3736, 0.1004, 0.9991},
      {0.2348, 0.1451, 0.3522, 0.2883, 0.3047, 0.6650},
      {0.4047, 0.8828, 0.8732, 0.5743, 0.1091, 0.0381}};
  double outer = 0.0;
  for (int i = 0; i < 4; ++i) {
    double inner = 0.0;
    for (int j = 0; j < 6; ++j) {
      double d = x6[j] - P[i][j];
      inner += A[i][j] * d * d;
    }
    outer += alpha[i] * std::exp(-inner);
  }
  return -outer;
}

EmbeddedSynthetic EmbeddedSynthetic::make(BaseFunction base, int ambient_dim) {
  EmbeddedSynthetic p;
  p.base = base;
  p.ambient_dim = ambient_dim;
  p.negate = base != BaseFunction::LogBranin;
  for (int i = 0; i < p.arity(); ++i) p.active_dims.push_back(i);
  return p;
}

int EmbeddedSynthetic::arity() const {
  switch (base) {
    case BaseFunction::Branin:
    case BaseFunction::LogBranin:
      return 2;
    case BaseFunction::Hartmann6:
      return 6;
  }
  throw std::logic_error("EmbeddedSynthetic: bad base");
}

SearchSpace EmbeddedSynthetic::space() const { return SearchSpace::unit_cube(ambient_dim); }

double eval_synthetic(const EmbeddedSynthetic& problem, const Eigen::VectorXd& x_unit) {
  if (x_unit.size() != problem.ambient_dim) {
    throw std::invalid_argument("eval_synthetic: dimension mismatch");
  }
  if (static_cast<int>(problem.active_dims.size()) != problem.arity()) {
    throw std::invalid_argument("eval_synthetic: active dim count must match arity");
  }
  double value = 0.0;
  switch (problem.base) {
    case BaseFunction::Branin:
    case BaseFunction::LogBranin: {
      double u = x_unit[problem.active_dims[0]];
      double v = x_unit[problem.active_dims[1]];
      double x1 = -5.0 + 15.0 * u;
      double x2 = 15.0 * v;
      value = problem.base == BaseFunction::Branin ? branin(x1, x2) : log_branin(x1, x2);
      break;
    }
    case BaseFunction::Hartmann6: {
      Eigen::VectorXd x6(6);
      for (int j = 0; j < 6; ++j) x6[j] = x_unit[problem.active_dims[j]];
      value = hartmann6(x6);
      break;
    }
  }
  return problem.negate ? -value : value;
}

std::vector<TradeoffPoint> tradeoff_oracle(
    const std::function<double(const Eigen::VectorXd&)>& f, const PenaltySpec& penalty,
    int dim, const std::vector<double>& theta_grid, int resolution, double xi_scale,
    double slack) {
  if (dim < 1 || dim > 3) {
    throw std::invalid_argument("tradeoff_oracle: dim must be in [1,3]");
  }
  if (resolution < 2) throw std::invalid_argument("tradeoff_oracle: resolution < 2");
  const double step = 1.0 / (resolution - 1);
  if (slack < 0.0) slack = 0.5 * xi_scale * step * dim;

  std::vector<TradeoffPoint> out;
  for (double theta : theta_grid) {
    out.push_back({theta, -std::numeric_limits<double>::infinity(), false});
  }

  const long total = static_cast<long>(std::pow(resolution, dim));
  Eigen::VectorXd x(dim);
  for (long idx = 0; idx < total; ++idx) {
    long rem = idx;
    for (int i = 0; i < dim; ++i) {
      x[i] = (rem % resolution) * step;
      rem /= resolution;
    }
    double xi = xi_scale * eval_exact(penalty, x);
    double val = f(x);
    for (auto& pt : out) {
      if (std::abs(xi - pt.theta) <= slack && val > pt.h) {
        pt.h = val;
        pt.feasible = true;
      }
    }
  }
  return out;
}

}  // namespace sparsebo
