#include <benchmark/benchmark.h>

#include <Eigen/Core>
#include <cmath>

#include "sparsebo/gp.hpp"
#include "sparsebo/hypervolume.hpp"
#include "sparsebo/penalty.hpp"
#include "sparsebo/sobol.hpp"
#include "sparsebo/space.hpp"

namespace {

using namespace sparsebo;

KernelParams make_params(int d) {
  KernelParams p;
  p.outputscale = 1.2;
  p.inv_sq_lengthscales = Eigen::VectorXd::Constant(d, 3.0);
  p.noise = 1e-2;
  return p;
}

PosteriorEnsemble make_ensemble(int n, int d) {
  SobolSampler sampler(d, 1);
  Eigen::MatrixXd X(n, d);
  Eigen::VectorXd y(n);
  for (int i = 0; i < n; ++i) {
    X.row(i) = sampler.next();
    y[i] = std::sin(3.0 * X(i, 0)) - X.row(i).squaredNorm();
  }
  return PosteriorEnsemble({make_params(d)}, X, y);
}

void BM_Matern52Gram(benchmark::State& state) {
  const int n = static_cast<int>(state.range(0)), d = 50;
  SobolSampler sampler(d, 2);
  std::vector<Eigen::VectorXd> pts = sampler.draw(n);
  KernelParams p = make_params(d);
  Eigen::MatrixXd K(n, n);
  for (auto _ : state) {
    for (int i = 0; i < n; ++i) {
      for (int j = 0; j <= i; ++j) K(i, j) = matern52(pts[i], pts[j], p);
    }
    benchmark::DoNotOptimize(K.data());
  }
}
BENCHMARK(BM_Matern52Gram)->Arg(25)->Arg(50);

void BM_PosteriorQuery(benchmark::State& state) {
  const int d = 50;
  PosteriorEnsemble ens = make_ensemble(static_cast<int>(state.range(0)), d);
  Eigen::VectorXd x = Eigen::VectorXd::Constant(d, 0.37);
  for (auto _ : state) {
    auto post = ens.point_posterior(0, x, true);
    benchmark::DoNotOptimize(post.mean);
  }
}
BENCHMARK(BM_PosteriorQuery)->Arg(25)->Arg(50);

void BM_SmoothedPenalty(benchmark::State& state) {
  const int d = static_cast<int>(state.range(0));
  PenaltySpec pen;
  pen.kind = PenaltyKind::L0Smoothed;
  pen.baseline = Eigen::VectorXd::Zero(d);
  pen.a = 0.1;
  Eigen::VectorXd x = Eigen::VectorXd::Constant(d, 0.2);
  Eigen::VectorXd g(d);
  for (auto _ : state) {
    benchmark::DoNotOptimize(eval_smooth_grad(pen, x, &g));
  }
}
BENCHMARK(BM_SmoothedPenalty)->Arg(50)->Arg(200);

void BM_Hvi2d(benchmark::State& state) {
  std::vector<std::pair<double, double>> pts;
  const int n = static_cast<int>(state.range(0));
  for (int i = 0; i < n; ++i) {
    double t = (i + 1.0) / (n + 1.0);
    pts.push_back({t, 1.0 - t});
  }
  Frontier front = Frontier::build(pts, {0.0, 0.0});
  double du, dv;
  for (auto _ : state) {
    benchmark::DoNotOptimize(hvi_2d(front, 0.53, 0.61, &du, &dv));
  }
}
BENCHMARK(BM_Hvi2d)->Arg(10)->Arg(100);

void BM_SobolDraw(benchmark::State& state) {
  const int d = static_cast<int>(state.range(0));
  SobolSampler sampler(d, 3);
  for (auto _ : state) {
    benchmark::DoNotOptimize(sampler.next());
  }
}
BENCHMARK(BM_SobolDraw)->Arg(10)->Arg(50);

}  // namespace

BENCHMARK_MAIN();
