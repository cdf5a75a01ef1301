#pragma once

#include <Eigen/Core>
#include <cstdint>
#include <functional>
#include <nlohmann/json_fwd.hpp>
#include <optional>
#include <string>
#include <vector>

#include "sparsebo/acqopt.hpp"
#include "sparsebo/hypervolume.hpp"
#include "sparsebo/penalty.hpp"
#include "sparsebo/saas.hpp"
#include "sparsebo/space.hpp"

namespace sparsebo {

enum class Method { Sobol, GPEI, SAASBO, EI_ER, EI_IR, SEBO };
std::string method_name(Method m);
Method method_from_name(const std::string& name);

/// Objective resolved from the problem registry; eval_seed feeds stochastic
/// simulators and is ignored by deterministic problems.
struct Problem {
  SearchSpace space;
  std::function<double(const Eigen::VectorXd& x_unit, std::uint64_t eval_seed)> objective;
};

/// Names: "branin_embedded", "hartmann6_embedded", "logbranin2", "quad1d",
/// "sourcing". Parameters vary per problem (ambient_dim, model_seed, ...).
Problem make_problem(const std::string& name, const nlohmann::json& params);

struct AcqSettings {
  int num_base_samples = 128;
  double beta = 0.0;                       // UCB only (not a Method here)
  double chebyshev_c = 0.05;
  std::optional<std::pair<double, double>> ref_point;  // (r_f, r_xi) raw units
};

struct OptSettings {
  int num_restarts = 10;
  int raw_candidates = 512;
  int max_inner_iters = 200;
  double grad_tol = 1e-8;
  int schedule_len = 30;
  double a_start = 0.31622776601683794;  // 10^-0.5
  double a_end = 1e-3;
  double clamp_delta = 1e-2;
  bool include_default_seeds = true;
};

struct ExperimentConfig {
  std::string problem = "branin_embedded";
  std::string problem_params = "{}";  // JSON object, forwarded to make_problem
  Method method = Method::Sobol;
  std::string penalty_kind = "L0";  // "L0" | "L1" | "group_lasso"
  std::vector<std::vector<int>> groups;
  double zero_tol = 1e-6;
  double lambda = 0.0;
  int num_init = 8;
  int num_trials = 50;
  int replications = 1;
  std::uint64_t seed_base = 0;
  std::vector<std::uint64_t> seeds;  // explicit; overrides seed_base
  McmcConfig mcmc;
  OptSettings opt;
  AcqSettings acq;
  double impute_value = 0.0;
  std::vector<int> metrics_k = {};
  std::vector<Eigen::VectorXd> preseed;  // normalized points evaluated first
  double trial_timeout_s = 0.0;          // 0 = no guard

  std::vector<std::uint64_t> resolved_seeds() const;
  void validate() const;
};

nlohmann::json config_to_json(const ExperimentConfig& c);
ExperimentConfig config_from_json(const nlohmann::json& j);

struct ReplicationResult {
  ObservationLog log;
  std::vector<double> trial_seconds;
  std::vector<int> fallback_trials;  // surrogate-fit failures, served by Sobol
  bool complete = true;
};

struct RunReport {
  ExperimentConfig config;
  std::vector<ReplicationResult> replications;

  nlohmann::json to_json() const;
  static RunReport from_json(const nlohmann::json& j);
};

RunReport run_experiment(const ExperimentConfig& config, int threads = 1);

/// Reporting penalty of the experiment (exact kind, baseline from the space).
PenaltySpec report_penalty(const ExperimentConfig& config, const SearchSpace& space);

/// Active-dimension count of a normalized point against the space baseline.
int active_dims(const Eigen::VectorXd& x, const Eigen::VectorXd& baseline,
                double zero_tol);

/// Best observed y among points with at most k active dimensions, or
/// impute_value when no observation qualifies.
double best_at_sparsity(const ObservationLog& log, int k, double impute_value,
                        double zero_tol = 1e-6);

struct FrontierReport {
  Frontier frontier;                 // (y, -xi) non-dominated set
  std::vector<double> staircase;     // best y per active-dim level 0..D (NaN if none)
};
FrontierReport extract_frontier(const ObservationLog& log, double zero_tol = 1e-6);

void emit_reports(const RunReport& report, const std::string& out_dir);

}  // namespace sparsebo
