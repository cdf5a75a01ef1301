#include <doctest.h>

#include <cmath>
#include <nlohmann/json.hpp>

#include "sparsebo/penalty.hpp"
#include "test_util.hpp"

using namespace sparsebo;

namespace {
PenaltySpec make_spec(PenaltyKind kind, int d, double a = 0.0) {
  PenaltySpec spec;
  spec.kind = kind;
  spec.baseline = Eigen::VectorXd::Zero(d);
  spec.a = a;
  if (kind == PenaltyKind::GroupLasso) {
    for (int i = 0; i < d; ++i) spec.groups.push_back({i});
  }
  return spec;
}
}  // namespace

TEST_CASE("baseline evaluates to zero for every kind") {
  for (auto kind : {PenaltyKind::L0Exact, PenaltyKind::L0Smoothed, PenaltyKind::L1,
                    PenaltyKind::GroupLasso}) {
    PenaltySpec spec = make_spec(kind, 4, 0.1);
    CHECK(eval_exact(spec, Eigen::VectorXd::Zero(4)) == doctest::Approx(0.0));
  }
}

TEST_CASE("exact L0 counts displaced coordinates") {
  PenaltySpec spec = make_spec(PenaltyKind::L0Exact, 50);
  Eigen::VectorXd x = Eigen::VectorXd::Zero(50);
  x[3] = 0.3;
  x[17] = 0.3;
  x[42] = 0.3;
  CHECK(eval_exact(spec, x) == 3.0);
  x[8] = 1e-9;  // below zero_tol
  CHECK(eval_exact(spec, x) == 3.0);
}

TEST_CASE("smoothed L0 at displacement a") {
  PenaltySpec spec = make_spec(PenaltyKind::L0Smoothed, 1, 0.2);
  Eigen::VectorXd x = Eigen::VectorXd::Constant(1, 0.2);
  CHECK(eval_exact(spec, x) == doctest::Approx(1.0 - std::exp(-0.5)).epsilon(1e-12));
}

TEST_CASE("smoothed L0 gradient formula and edge constants") {
  // |phi'_a(1)| = (1/a^2) exp(-1/(2 a^2))
  auto edge_grad = [](double a) {
    PenaltySpec spec = make_spec(PenaltyKind::L0Smoothed, 1, a);
    Eigen::VectorXd g(1);
    eval_smooth_grad(spec, Eigen::VectorXd::Constant(1, 1.0), &g);
    return std::abs(g[0]);
  };
  CHECK(edge_grad(std::pow(10.0, -0.5)) == doctest::Approx(10.0 * std::exp(-5.0)).epsilon(1e-12));
  CHECK(edge_grad(0.1) == doctest::Approx(100.0 * std::exp(-50.0)).epsilon(1e-12));
}

TEST_CASE("gradient vanishes at the baseline") {
  for (auto kind : {PenaltyKind::L0Smoothed, PenaltyKind::L1, PenaltyKind::GroupLasso}) {
    PenaltySpec spec = make_spec(kind, 3, 0.1);
    Eigen::VectorXd g(3);
    eval_smooth_grad(spec, Eigen::VectorXd::Zero(3), &g);
    CHECK(g.norm() == 0.0);
  }
}

TEST_CASE("eval_smooth_grad rejects exact L0") {
  PenaltySpec spec = make_spec(PenaltyKind::L0Exact, 2);
  Eigen::VectorXd g;
  CHECK_THROWS(eval_smooth_grad(spec, Eigen::VectorXd::Zero(2), &g));
}

TEST_CASE("smooth gradients match finite differences away from kinks") {
  Eigen::VectorXd x(4);
  x << 0.31, 0.72, 0.15, 0.9;
  for (auto kind : {PenaltyKind::L0Smoothed, PenaltyKind::L1, PenaltyKind::GroupLasso}) {
    PenaltySpec spec = make_spec(kind, 4, 0.25);
    ObjectiveFn f = [&spec](const Eigen::VectorXd& p, Eigen::VectorXd* g) {
      return eval_smooth_grad(spec, p, g);
    };
    CHECK(testutil::grad_rel_err(f, x, 1e-6) <= 1e-6);
  }
}

TEST_CASE("a_schedule endpoints, monotonicity, and log-linearity") {
  auto sched = a_schedule(30, std::pow(10.0, -0.5), 1e-3);
  REQUIRE(sched.size() == 30);
  CHECK(sched.front() == std::pow(10.0, -0.5));
  CHECK(sched.back() == 1e-3);
  double ratio = sched[1] / sched[0];
  for (std::size_t i = 1; i < sched.size(); ++i) {
    CHECK(sched[i] < sched[i - 1]);
    CHECK(sched[i] / sched[i - 1] == doctest::Approx(ratio).epsilon(1e-12));
  }
  auto two = a_schedule(2, 1.0, 0.5);
  CHECK(two == std::vector<double>{1.0, 0.5});
  CHECK_THROWS(a_schedule(1, 1.0, 0.5));
  CHECK_THROWS(a_schedule(5, 0.5, 1.0));
}

TEST_CASE("smoothed L0 converges pointwise to exact L0") {
  PenaltySpec exact = make_spec(PenaltyKind::L0Exact, 3);
  exact.zero_tol = 0.0;
  Eigen::VectorXd x(3);
  x << 0.4, 0.0, 0.05;
  double delta_min = 0.05;
  for (double a : {1e-1, 1e-2, 1e-3, 1e-4}) {
    PenaltySpec sm = exact.smoothed(a);
    double bound = 3.0 * std::exp(-0.5 * (delta_min / a) * (delta_min / a));
    CHECK(std::abs(eval_exact(sm, x) - eval_exact(exact, x)) <= bound + 1e-15);
  }
}

TEST_CASE("smoothed L0 is bounded in [0, D] and zero only at baseline") {
  PenaltySpec spec = make_spec(PenaltyKind::L0Smoothed, 5, 0.3);
  for (int i = 0; i < 100; ++i) {
    Eigen::VectorXd x = 0.5 * (Eigen::VectorXd::Random(5).array() + 1.0);
    double v = eval_exact(spec, x);
    CHECK(v >= 0.0);
    CHECK(v <= 5.0);
    if ((x - spec.baseline).norm() > 1e-3) CHECK(v > 0.0);
  }
}

TEST_CASE("group lasso with singleton groups reduces to L1") {
  PenaltySpec gl = make_spec(PenaltyKind::GroupLasso, 4);
  PenaltySpec l1 = make_spec(PenaltyKind::L1, 4);
  for (int i = 0; i < 20; ++i) {
    Eigen::VectorXd x = 0.5 * (Eigen::VectorXd::Random(4).array() + 1.0);
    CHECK(eval_exact(gl, x) == doctest::Approx(eval_exact(l1, x)).epsilon(1e-14));
  }
}

TEST_CASE("group lasso groups must partition the dims") {
  PenaltySpec spec = make_spec(PenaltyKind::GroupLasso, 4);
  spec.groups = {{0, 1}, {1, 2, 3}};  // overlap
  CHECK_THROWS(spec.validate());
  spec.groups = {{0, 1}};  // missing dims
  CHECK_THROWS(spec.validate());
}

TEST_CASE("penalty json round trip") {
  PenaltySpec spec = make_spec(PenaltyKind::GroupLasso, 4);
  PenaltySpec back = penalty_from_json(penalty_to_json(spec));
  CHECK(back.kind == spec.kind);
  CHECK(back.groups == spec.groups);
  CHECK(back.baseline == spec.baseline);
}
