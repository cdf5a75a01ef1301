#pragma once

namespace sparsebo {

/// Standard normal density.
double normal_pdf(double z);

/// Standard normal CDF, accurate in both tails (erfc based).
double normal_cdf(double z);

/// Inverse standard normal CDF. Valid for p in (0, 1).
double normal_quantile(double p);

/// log density of the half-Cauchy distribution with scale s at t > 0.
/// Returns -inf for t <= 0.
double log_half_cauchy(double t, double s);

}  // namespace sparsebo
