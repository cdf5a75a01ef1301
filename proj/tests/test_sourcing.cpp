#include <doctest.h>

#include <nlohmann/json.hpp>

#include "sparsebo/sourcing.hpp"

using namespace sparsebo;

TEST_CASE("generated model has the expected dimensions and simplex rows") {
  SourcingModel m = sourcing_generate(4);
  CHECK(m.theta.rows() == 25);
  CHECK(m.theta.cols() == 8);
  CHECK(m.phi.rows() == 8);
  CHECK(m.phi.cols() == 1000);
  for (int s = 0; s < 25; ++s) {
    CHECK(m.theta.row(s).sum() == doctest::Approx(1.0).epsilon(1e-12));
    CHECK(m.theta.row(s).minCoeff() >= 0.0);
  }
  for (int t = 0; t < 8; ++t) {
    CHECK(m.phi.row(t).sum() == doctest::Approx(1.0).epsilon(1e-12));
  }
  CHECK(m.item_scores.minCoeff() > 0.0);
  CHECK(m.costs.minCoeff() >= 0.0);
}

TEST_CASE("generation is deterministic") {
  SourcingModel a = sourcing_generate(9);
  SourcingModel b = sourcing_generate(9);
  CHECK(a.theta == b.theta);
  CHECK(a.phi == b.phi);
  CHECK(a.costs == b.costs);
  SourcingModel c = sourcing_generate(10);
  CHECK(a.theta != c.theta);
}

TEST_CASE("all-zero policy scores exactly zero") {
  SourcingModel m = sourcing_generate(1);
  auto r = sourcing_evaluate(m, std::vector<int>(25, 0), 50, 3);
  CHECK(r.mean_quality == 0.0);
  CHECK(r.std_err == 0.0);
}

TEST_CASE("evaluation is deterministic and the cost term exact") {
  SourcingModel m = sourcing_generate(2);
  std::vector<int> policy(25, 10);
  auto a = sourcing_evaluate(m, policy, 100, 7);
  auto b = sourcing_evaluate(m, policy, 100, 7);
  CHECK(a.mean_quality == b.mean_quality);
  CHECK(a.std_err == b.std_err);

  // relevance is bounded, so quality + 0.6*C <= sum of item scores always
  double cost = 0.0;
  for (int s = 0; s < 25; ++s) cost += m.costs[s] * policy[s];
  CHECK(a.mean_quality + 0.6 * cost <= m.item_scores.sum() + 1e-9);
}

TEST_CASE("policy bounds are enforced") {
  SourcingModel m = sourcing_generate(3);
  std::vector<int> bad(25, 0);
  bad[0] = 51;
  CHECK_THROWS(sourcing_evaluate(m, bad, 10, 0));
  bad[0] = -1;
  CHECK_THROWS(sourcing_evaluate(m, bad, 10, 0));
  CHECK_THROWS(sourcing_evaluate(m, std::vector<int>(24, 0), 10, 0));
}

TEST_CASE("higher cost lowers quality holding draws fixed") {
  SourcingModel m = sourcing_generate(5);
  std::vector<int> policy(25, 5);
  auto base = sourcing_evaluate(m, policy, 50, 11);
  SourcingModel pricier = m;
  pricier.costs.array() += 0.2;
  auto worse = sourcing_evaluate(pricier, policy, 50, 11);
  CHECK(worse.mean_quality < base.mean_quality);
}

TEST_CASE("model json round trip") {
  SourcingModel m = sourcing_generate(6);
  SourcingModel back = SourcingModel::from_json(m.to_json());
  CHECK(back.theta == m.theta);
  CHECK(back.phi == m.phi);
  CHECK(back.topic_scores == m.topic_scores);
  CHECK(back.item_scores == m.item_scores);
  CHECK(back.costs == m.costs);
  CHECK(back.seed == m.seed);
}
