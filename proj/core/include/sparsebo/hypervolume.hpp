#pragma once

#include <string>
#include <utility>
#include <vector>

namespace sparsebo {

/// Non-dominated set of bi-objective points under (maximize first, maximize
/// second), together with the worst-case reference point. For sparse BO the
/// coordinates are (objective value f, negated penalty -xi).
struct Frontier {
  // sorted by first coordinate descending; second strictly increasing
  std::vector<std::pair<double, double>> points;
  std::pair<double, double> ref{0.0, 0.0};

  /// Prunes dominated points and points that do not strictly dominate the
  /// reference (the latter are dropped with a warning).
  static Frontier build(std::vector<std::pair<double, double>> raw,
                        std::pair<double, double> ref,
                        std::vector<std::string>* warnings = nullptr);
};

/// Exact dominated area between ref and the frontier (maximize/maximize).
double hypervolume_2d(const Frontier& frontier);

/// Exact hypervolume improvement of adding the point (u, v), with optional
/// partial derivatives with respect to u and v.
double hvi_2d(const Frontier& frontier, double u, double v, double* du = nullptr,
              double* dv = nullptr);

}  // namespace sparsebo
