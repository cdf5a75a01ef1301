#include "sparsebo/sourcing.hpp"

#include <algorithm>
#include <cmath>
#include <nlohmann/json.hpp>
#include <random>
#include <stdexcept>

namespace sparsebo {

namespace {

Eigen::VectorXd dirichlet_row(std::mt19937_64& rng, int n, double concentration) {
  std::gamma_distribution<double> gamma(concentration, 1.0);
  Eigen::VectorXd row(n);
  double sum = 0.0;
  for (int i = 0; i < n; ++i) {
    row[i] = gamma(rng);
    sum += row[i];
  }
  row /= sum;
  return row;
}

// cumulative row for inverse-CDF multinomial sampling
std::vector<double> cumulative(const Eigen::VectorXd& probs) {
  std::vector<double> cdf(probs.size());
  double acc = 0.0;
  for (int i = 0; i < probs.size(); ++i) {
    acc += probs[i];
    cdf[i] = acc;
  }
  cdf.back() = 1.0;
  return cdf;
}

int sample_index(const std::vector<double>& cdf, double u) {
  auto it = std::lower_bound(cdf.begin(), cdf.end(), u);
  return static_cast<int>(it - cdf.begin());
}

}  // namespace

SourcingModel sourcing_generate(std::uint64_t seed) {
  SourcingModel m;
  m.seed = seed;
  std::mt19937_64 rng(seed);

  m.theta.resize(SourcingModel::kSources, SourcingModel::kTopics);
  for (int s = 0; s < SourcingModel::kSources; ++s) {
    m.theta.row(s) = dirichlet_row(rng, SourcingModel::kTopics, 0.2);
  }
  m.phi.resize(SourcingModel::kTopics, SourcingModel::kItems);
  for (int t = 0; t < SourcingModel::kTopics; ++t) {
    m.phi.row(t) = dirichlet_row(rng, SourcingModel::kItems, 0.5);
  }
  // topic relevance: log-normal with log-scale location 0.25, scale 1.5
  std::lognormal_distribution<double> lognorm(0.25, 1.5);
  m.topic_scores.resize(SourcingModel::kTopics);
  for (int t = 0; t < SourcingModel::kTopics; ++t) m.topic_scores[t] = lognorm(rng);

  m.item_scores = m.phi.transpose() * m.topic_scores;

  Eigen::VectorXd source_scores = m.theta * m.topic_scores;  // q_s
  double q_total = source_scores.sum();
  std::normal_distribution<double> gauss(0.0, 1.0);
  m.costs.resize(SourcingModel::kSources);
  for (int s = 0; s < SourcingModel::kSources; ++s) {
    double c = source_scores[s] / (2.0 * q_total) + 0.1 * gauss(rng);
    m.costs[s] = std::max(c, 0.0);  // Gaussian draw truncated at zero
  }
  return m;
}

SourcingResult sourcing_evaluate(const SourcingModel& model,
                                 const std::vector<int>& policy, int reps,
                                 std::uint64_t seed) {
  if (static_cast<int>(policy.size()) != SourcingModel::kSources) {
    throw std::invalid_argument("sourcing_evaluate: policy must have one entry per source");
  }
  for (int v : policy) {
    if (v < 0 || v > SourcingModel::kMaxPerSource) {
      throw std::invalid_argument("sourcing_evaluate: policy entry out of [0,50]");
    }
  }
  if (reps < 1) throw std::invalid_argument("sourcing_evaluate: reps must be >= 1");

  std::vector<std::vector<double>> theta_cdf(SourcingModel::kSources);
  for (int s = 0; s < SourcingModel::kSources; ++s) {
    theta_cdf[s] = cumulative(model.theta.row(s));
  }
  std::vector<std::vector<double>> phi_cdf(SourcingModel::kTopics);
  for (int t = 0; t < SourcingModel::kTopics; ++t) {
    phi_cdf[t] = cumulative(model.phi.row(t));
  }

  // deterministic infrastructure cost
  double cost = 0.0;
  for (int s = 0; s < SourcingModel::kSources; ++s) cost += model.costs[s] * policy[s];

  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> unif(0.0, 1.0);
  std::vector<int> counts(SourcingModel::kItems);

  double sum = 0.0, sum_sq = 0.0;
  for (int rep = 0; rep < reps; ++rep) {
    std::fill(counts.begin(), counts.end(), 0);
    for (int s = 0; s < SourcingModel::kSources; ++s) {
      for (int draw = 0; draw < policy[s]; ++draw) {
        int topic = sample_index(theta_cdf[s], unif(rng));
        int item = sample_index(phi_cdf[topic], unif(rng));
        ++counts[item];
      }
    }
    double relevance = 0.0;
    for (int k = 0; k < SourcingModel::kItems; ++k) {
      if (counts[k] > 0) relevance += model.item_scores[k];
    }
    double q = relevance - SourcingModel::kCostWeight * cost;
    sum += q;
    sum_sq += q * q;
  }
  SourcingResult res;
  res.mean_quality = sum / reps;
  if (reps > 1) {
    double var = (sum_sq - sum * sum / reps) / (reps - 1);
    res.std_err = std::sqrt(std::max(var, 0.0) / reps);
  }
  return res;
}

nlohmann::json SourcingModel::to_json() const {
  nlohmann::json j;
  j["seed"] = seed;
  auto mat = [](const Eigen::MatrixXd& m) {
    std::vector<std::vector<double>> rows;
    for (int r = 0; r < m.rows(); ++r) {
      rows.emplace_back(m.row(r).begin(), m.row(r).end());
    }
    return rows;
  };
  j["theta"] = mat(theta);
  j["phi"] = mat(phi);
  j["topic_scores"] = std::vector<double>(topic_scores.begin(), topic_scores.end());
  j["item_scores"] = std::vector<double>(item_scores.begin(), item_scores.end());
  j["costs"] = std::vector<double>(costs.begin(), costs.end());
  return j;
}

SourcingModel SourcingModel::from_json(const nlohmann::json& j) {
  SourcingModel m;
  m.seed = j.at("seed").get<std::uint64_t>();
  auto mat = [](const nlohmann::json& rows) {
    Eigen::MatrixXd out(rows.size(), rows.at(0).size());
    for (int r = 0; r < out.rows(); ++r) {
      auto row = rows.at(r).get<std::vector<double>>();
      out.row(r) = Eigen::Map<const Eigen::VectorXd>(row.data(), row.size());
    }
    return out;
  };
  m.theta = mat(j.at("theta"));
  m.phi = mat(j.at("phi"));
  auto vec = [](const nlohmann::json& v) {
    auto data = v.get<std::vector<double>>();
    return Eigen::VectorXd(Eigen::Map<const Eigen::VectorXd>(data.data(), data.size()));
  };
  m.topic_scores = vec(j.at("topic_scores"));
  m.item_scores = vec(j.at("item_scores"));
  m.costs = vec(j.at("costs"));
  return m;
}

}  // namespace sparsebo
