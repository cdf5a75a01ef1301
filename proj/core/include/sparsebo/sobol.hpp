#pragma once

#include <Eigen/Core>
#include <cstdint>
#include <memory>
#include <vector>

namespace sparsebo {

/// Scrambled low-discrepancy Sobol sequence on [0,1)^dim.
///
/// Points come from a standard Sobol generator whose output bits are XORed
/// with a per-dimension random digital shift derived from the seed, so the
/// sequence is deterministic given (dim, seed) and never emits the all-zeros
/// point.
class SobolSampler {
 public:
  SobolSampler(int dim, std::uint64_t seed);
  ~SobolSampler();
  SobolSampler(SobolSampler&&) noexcept;
  SobolSampler& operator=(SobolSampler&&) noexcept;

  int dim() const { return dim_; }
  Eigen::VectorXd next();
  std::vector<Eigen::VectorXd> draw(int n);

 private:
  struct Impl;
  int dim_;
  std::unique_ptr<Impl> impl_;
};

/// n standard-normal draws from a scrambled 1-D Sobol sequence through the
/// inverse normal CDF. Used as fixed base samples for quasi-MC acquisitions.
std::vector<double> qmc_normal_samples(int n, std::uint64_t seed);

}  // namespace sparsebo
