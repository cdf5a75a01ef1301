#pragma once

#include <Eigen/Core>
#include <cstdint>
#include <nlohmann/json_fwd.hpp>
#include <vector>

namespace sparsebo {

/// Topic-model simulator of a recommender sourcing system: sources draw
/// items through latent topics, retrieved items are de-duplicated, and each
/// retrieval pays a per-source infrastructure cost.
struct SourcingModel {
  static constexpr int kTopics = 8;
  static constexpr int kItems = 1000;
  static constexpr int kSources = 25;
  static constexpr int kMaxPerSource = 50;
  static constexpr double kCostWeight = 0.6;

  Eigen::MatrixXd theta;        // kSources x kTopics, rows on the simplex
  Eigen::MatrixXd phi;          // kTopics x kItems, rows on the simplex
  Eigen::VectorXd topic_scores; // Q, kTopics
  Eigen::VectorXd item_scores;  // m_k = sum_i phi(i,k) Q_i
  Eigen::VectorXd costs;        // c_s, truncated at 0
  std::uint64_t seed = 0;

  nlohmann::json to_json() const;
  static SourcingModel from_json(const nlohmann::json& j);
};

SourcingModel sourcing_generate(std::uint64_t seed);

struct SourcingResult {
  double mean_quality = 0.0;
  double std_err = 0.0;
};

/// Runs the retrieval simulation `reps` times for the integer policy
/// (items fetched per source) and returns the mean quality score
/// RS - 0.6*C with its standard error. Deterministic given the seed.
SourcingResult sourcing_evaluate(const SourcingModel& model,
                                 const std::vector<int>& policy, int reps,
                                 std::uint64_t seed);

}  // namespace sparsebo
