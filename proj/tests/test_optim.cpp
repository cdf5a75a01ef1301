#include <doctest.h>

#include <cmath>

#include "sparsebo/optim.hpp"

using namespace sparsebo;

TEST_CASE("projected lbfgs finds an interior concave maximum") {
  ObjectiveFn f = [](const Eigen::VectorXd& x, Eigen::VectorXd* g) {
    Eigen::VectorXd c = Eigen::VectorXd::Constant(x.size(), 0.3);
    if (g) *g = -2.0 * (x - c);
    return -(x - c).squaredNorm();
  };
  auto r = maximize_box(f, Eigen::VectorXd::Constant(3, 0.9),
                        Eigen::VectorXd::Zero(3), Eigen::VectorXd::Ones(3));
  CHECK(r.converged);
  CHECK((r.x.array() - 0.3).abs().maxCoeff() <= 1e-6);
}

TEST_CASE("projected lbfgs respects the box") {
  // maximum of the unconstrained problem sits outside the box
  ObjectiveFn f = [](const Eigen::VectorXd& x, Eigen::VectorXd* g) {
    if (g) *g = Eigen::VectorXd::Ones(x.size());
    return x.sum();
  };
  auto r = maximize_box(f, Eigen::VectorXd::Constant(2, 0.2),
                        Eigen::VectorXd::Zero(2), Eigen::VectorXd::Ones(2));
  CHECK(r.x[0] == doctest::Approx(1.0));
  CHECK(r.x[1] == doctest::Approx(1.0));
}

TEST_CASE("ascent never decreases the objective") {
  ObjectiveFn f = [](const Eigen::VectorXd& x, Eigen::VectorXd* g) {
    double v = std::sin(5.0 * x[0]) + 0.3 * x[1];
    if (g) {
      g->resize(2);
      (*g)[0] = 5.0 * std::cos(5.0 * x[0]);
      (*g)[1] = 0.3;
    }
    return v;
  };
  Eigen::VectorXd x0(2);
  x0 << 0.1, 0.4;
  double f0 = f(x0, nullptr);
  auto r = maximize_box(f, x0, Eigen::VectorXd::Zero(2), Eigen::VectorXd::Ones(2));
  CHECK(r.f >= f0);
}

TEST_CASE("non-finite start is reported as failure") {
  ObjectiveFn f = [](const Eigen::VectorXd&, Eigen::VectorXd* g) {
    if (g) g->setZero(1);
    return std::nan("");
  };
  auto r = maximize_box(f, Eigen::VectorXd::Constant(1, 0.5),
                        Eigen::VectorXd::Zero(1), Eigen::VectorXd::Ones(1));
  CHECK(r.failed);
}
