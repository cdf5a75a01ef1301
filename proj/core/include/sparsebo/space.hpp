#pragma once

#include <Eigen/Core>
#include <cstdint>
#include <nlohmann/json_fwd.hpp>
#include <set>
#include <string>
#include <vector>

namespace sparsebo {

/// Box-bounded search space with a designated "sparse" baseline point.
/// All optimization happens on the normalized unit hypercube [0,1]^D;
/// raw units only appear at evaluation and reporting boundaries.
struct SearchSpace {
  Eigen::VectorXd lower;
  Eigen::VectorXd upper;
  Eigen::VectorXd baseline_raw;
  std::set<int> integer_dims;

  int dims() const { return static_cast<int>(lower.size()); }
  void validate() const;
  Eigen::VectorXd baseline_normalized() const;

  /// Unit cube of dimension d with baseline at the origin.
  static SearchSpace unit_cube(int d);
};

Eigen::VectorXd normalize(const Eigen::VectorXd& raw, const SearchSpace& space);
Eigen::VectorXd denormalize(const Eigen::VectorXd& unit, const SearchSpace& space);

/// n scrambled-Sobol points in [0,1]^D, deterministic given seed.
std::vector<Eigen::VectorXd> sobol_init(const SearchSpace& space, int n,
                                        std::uint64_t seed);

struct Observation {
  Eigen::VectorXd x;  // normalized, in [0,1]^D
  double y = 0.0;     // raw objective, maximization convention
  double xi = 0.0;    // exact penalty value at x
  int trial = 0;
};

struct ObservationLog {
  SearchSpace space;
  std::vector<Observation> observations;
  std::uint64_t seed = 0;

  void append(Eigen::VectorXd x, double y, double xi);
  double best_y() const;  // throws if empty

  nlohmann::json to_json() const;
  static ObservationLog from_json(const nlohmann::json& j);
  std::string to_csv() const;
};

nlohmann::json space_to_json(const SearchSpace& space);
SearchSpace space_from_json(const nlohmann::json& j);

}  // namespace sparsebo
