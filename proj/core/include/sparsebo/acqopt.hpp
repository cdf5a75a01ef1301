#pragma once

#include <Eigen/Core>
#include <cstdint>
#include <nlohmann/json_fwd.hpp>
#include <set>
#include <vector>

#include "sparsebo/acquisition.hpp"

namespace sparsebo {

struct OptimizerConfig {
  int num_restarts = 10;
  int raw_candidates = 512;
  int max_inner_iters = 200;
  double grad_tol = 1e-8;
  std::vector<double> schedule;  // strictly decreasing a values (homotopy)
  double clamp_delta = 1e-2;
  double clamp_acq_slack_rel = 1e-6;
  double clamp_acq_slack_abs = 1e-12;
  std::uint64_t seed = 0;
  /// When true the baseline and any extra seeds (incumbent best) join the
  /// raw candidates; when false the restarts are screened random points only.
  bool include_default_seeds = true;
  Eigen::VectorXd baseline;  // required for homotopy clamping
  std::vector<Eigen::VectorXd> extra_seeds;

  void validate_schedule() const;
};

struct HomotopyStage {
  double a = 0.0;
  Eigen::VectorXd x;
  double acq = 0.0;
};

struct CandidateResult {
  Eigen::VectorXd x;
  double acq_value = 0.0;
  std::vector<HomotopyStage> homotopy_trace;
  std::set<int> clamped_dims;
};

/// Multi-start projected quasi-Newton ascent of a fixed acquisition over
/// [0,1]^D. Deterministic given the seed; ties broken by lowest restart index.
CandidateResult optimize_fixed(const AcqFn& acq, int dim, const OptimizerConfig& config);

/// Homotopy continuation over the a-schedule: full multi-start at the first
/// stage, then warm-started single ascents, then clamp-to-baseline.
CandidateResult optimize_homotopy(const AcqFamily& family, int dim,
                                  const OptimizerConfig& config);

/// Snaps coordinates within clamp_delta of the baseline exactly onto it,
/// jointly if the acquisition allows, otherwise greedily by displacement.
std::pair<Eigen::VectorXd, std::set<int>> clamp_to_baseline(const Eigen::VectorXd& x,
                                                            const AcqFn& acq,
                                                            const OptimizerConfig& config);

nlohmann::json trace_to_json(const CandidateResult& result);

}  // namespace sparsebo
