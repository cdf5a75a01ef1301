#pragma once

#include <Eigen/Core>
#include <functional>
#include <vector>

#include "sparsebo/gp.hpp"
#include "sparsebo/hypervolume.hpp"
#include "sparsebo/optim.hpp"
#include "sparsebo/penalty.hpp"

namespace sparsebo {

/// Differentiable acquisition over the normalized unit cube.
using AcqFn = ObjectiveFn;
/// Smoothing-parameter-indexed family for the homotopy loop.
using AcqFamily = std::function<AcqFn(double a)>;

/// Analytic expected improvement of N(mu, sigma^2) over the incumbent.
double ei_analytic(double mu, double sigma, double incumbent);
/// Partials of analytic EI with respect to mu and sigma.
void ei_analytic_grad(double mu, double sigma, double incumbent, double* d_mu,
                      double* d_sigma);

double ucb(double mu, double sigma, double beta);

struct ChebyshevSpec {
  double lambda = 0.0;
  double C = 0.05;
  double f_star_estimate = 0.0;
};
/// Augmented Chebyshev scalarization of (objective, penalty); the baseline
/// penalty is 0 by convention.
double chebyshev_scalarize(double f_val, double xi_val, const ChebyshevSpec& spec);

/// All factories below average over the ensemble samples and work in raw
/// objective units. The returned closures reference the ensemble (and
/// penalty/base samples by value); the ensemble must outlive them.

/// Ensemble-averaged analytic EI; incumbent in raw units.
AcqFn make_ei(const PosteriorEnsemble& ensemble, double incumbent_raw);

/// Ensemble-averaged UCB.
AcqFn make_ucb(const PosteriorEnsemble& ensemble, double beta);

/// External regularization: analytic EI minus lambda times the smooth penalty.
AcqFn make_ei_er(const PosteriorEnsemble& ensemble, double incumbent_raw,
                 PenaltySpec smooth_penalty, double lambda);

/// Internal regularization: quasi-MC EI of g = f - lambda*xi against the
/// incumbent best of g, with pathwise gradients through the fixed base
/// normal samples.
AcqFn make_ei_ir(const PosteriorEnsemble& ensemble, double incumbent_g_raw,
                 PenaltySpec smooth_penalty, double lambda,
                 std::vector<double> base_samples);

/// SEBO: quasi-MC expected hypervolume improvement of adding
/// (f_sample(x), -xi_smooth(x)) to the frontier of observed (y, -xi_exact).
AcqFn make_sebo(const PosteriorEnsemble& ensemble, Frontier frontier,
                PenaltySpec smooth_penalty, std::vector<double> base_samples);

/// ParEGO-style quasi-MC EI on the augmented Chebyshev scalarization.
/// incumbent_t_raw is the best scalarized value among observations.
AcqFn make_chebyshev_ei(const PosteriorEnsemble& ensemble, double incumbent_t_raw,
                        PenaltySpec smooth_penalty, ChebyshevSpec spec,
                        std::vector<double> base_samples);

}  // namespace sparsebo
