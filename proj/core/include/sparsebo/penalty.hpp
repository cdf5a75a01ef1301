#pragma once

#include <Eigen/Core>
#include <nlohmann/json_fwd.hpp>
#include <string>
#include <vector>

namespace sparsebo {

enum class PenaltyKind { L0Exact, L0Smoothed, L1, GroupLasso };

std::string penalty_kind_name(PenaltyKind kind);
PenaltyKind penalty_kind_from_name(const std::string& name);

/// Sparsity penalty xi(x), always measured relative to the baseline point.
struct PenaltySpec {
  PenaltyKind kind = PenaltyKind::L0Exact;
  Eigen::VectorXd baseline;              // normalized sparse point
  std::vector<std::vector<int>> groups;  // GroupLasso only, must partition dims
  double a = 0.0;                        // L0Smoothed smoothing width
  double zero_tol = 1e-6;                // exact-L0 counting tolerance

  void validate() const;

  /// Same penalty with the smoothed-L0 kind and smoothing width a.
  PenaltySpec smoothed(double a_value) const;
  /// Same penalty with the exact-L0 kind (for reporting).
  PenaltySpec exact_l0() const;
};

/// Penalty value; handles every kind (L0Smoothed evaluates the relaxation).
double eval_exact(const PenaltySpec& spec, const Eigen::VectorXd& x);

/// Value and (sub)gradient for the smooth/subdifferentiable kinds.
/// Throws for L0Exact.
double eval_smooth_grad(const PenaltySpec& spec, const Eigen::VectorXd& x,
                        Eigen::VectorXd* grad);

/// k smoothing widths from a_start down to a_end, log10-uniformly spaced.
std::vector<double> a_schedule(int k, double a_start, double a_end);

nlohmann::json penalty_to_json(const PenaltySpec& spec);
PenaltySpec penalty_from_json(const nlohmann::json& j);

}  // namespace sparsebo
