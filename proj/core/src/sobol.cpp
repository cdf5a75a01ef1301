#include "sparsebo/sobol.hpp"

#include <boost/random/sobol.hpp>
#include <random>
#include <stdexcept>

#include "sparsebo/math_util.hpp"

namespace sparsebo {

namespace {
constexpr double kInv2Pow64 = 5.421010862427522e-20;  // 2^-64
}

struct SobolSampler::Impl {
  boost::random::sobol engine;
  std::vector<std::uint64_t> shift;
  explicit Impl(int dim) : engine(static_cast<std::size_t>(dim)) {}
};

SobolSampler::SobolSampler(int dim, std::uint64_t seed) : dim_(dim) {
  if (dim < 1) throw std::invalid_argument("SobolSampler: dim must be >= 1");
  impl_ = std::make_unique<Impl>(dim);
  std::mt19937_64 rng(seed);
  impl_->shift.resize(dim);
  for (auto& s : impl_->shift) s = rng();
}

SobolSampler::~SobolSampler() = default;
SobolSampler::SobolSampler(SobolSampler&&) noexcept = default;
SobolSampler& SobolSampler::operator=(SobolSampler&&) noexcept = default;

Eigen::VectorXd SobolSampler::next() {
  Eigen::VectorXd p(dim_);
  for (int i = 0; i < dim_; ++i) {
    std::uint64_t v = impl_->engine() ^ impl_->shift[i];
    p[i] = static_cast<double>(v) * kInv2Pow64;
  }
  return p;
}

std::vector<Eigen::VectorXd> SobolSampler::draw(int n) {
  if (n < 0) throw std::invalid_argument("SobolSampler: n must be >= 0");
  std::vector<Eigen::VectorXd> out;
  out.reserve(n);
  for (int i = 0; i < n; ++i) out.push_back(next());
  return out;
}

std::vector<double> qmc_normal_samples(int n, std::uint64_t seed) {
  SobolSampler sampler(1, seed);
  std::vector<double> out;
  out.reserve(n);
  for (int i = 0; i < n; ++i) {
    double u = sampler.next()[0];
    // keep strictly inside (0,1) for the quantile
    u = std::min(std::max(u, 1e-16), 1.0 - 1e-16);
    out.push_back(normal_quantile(u));
  }
  return out;
}

}  // namespace sparsebo
