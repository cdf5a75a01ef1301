#include <CLI11.hpp>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <nlohmann/json.hpp>
#include <string>

#include "sparsebo/acquisition.hpp"
#include "sparsebo/harness.hpp"
#include "sparsebo/penalty.hpp"
#include "sparsebo/saas.hpp"
#include "sparsebo/sobol.hpp"

namespace {

int env_threads(int cli_threads) {
  if (const char* env = std::getenv("SPARSEBO_THREADS")) {
    int v = std::atoi(env);
    if (v > 0) return v;
  }
  return cli_threads;
}

int cmd_run(const std::string& config_path, const std::string& out_dir, int reps,
            long long seed_base, int threads) {
  std::ifstream in(config_path);
  if (!in) {
    std::cerr << "cannot open config: " << config_path << "\n";
    return 1;
  }
  auto cfg = sparsebo::config_from_json(nlohmann::json::parse(in));
  if (reps > 0) {
    cfg.replications = reps;
    cfg.seeds.clear();
  }
  if (seed_base >= 0) {
    cfg.seed_base = static_cast<std::uint64_t>(seed_base);
    cfg.seeds.clear();
  }
  auto report = sparsebo::run_experiment(cfg, env_threads(threads));
  sparsebo::emit_reports(report, out_dir);
  std::cout << "wrote " << report.replications.size() << " replications to " << out_dir
            << "\n";
  return 0;
}

int cmd_report(const std::string& dir) {
  auto path = std::filesystem::path(dir) / "report.json";
  std::ifstream in(path);
  if (!in) {
    std::cerr << "cannot open " << path.string() << "\n";
    return 1;
  }
  auto report = sparsebo::RunReport::from_json(nlohmann::json::parse(in));
  sparsebo::emit_reports(report, dir);
  std::cout << "regenerated reports in " << dir << "\n";
  return 0;
}

// One-dimensional walkthrough of the homotopy: four observations of
// f(x) = -x^2 around the baseline 1/2, then a single SEBO proposal whose
// stage-by-stage trace is written out.
int cmd_demo(const std::string& out_path) {
  using namespace sparsebo;
  SearchSpace space = SearchSpace::unit_cube(1);
  space.baseline_raw = Eigen::VectorXd::Constant(1, 0.5);

  ObservationLog log;
  log.space = space;
  PenaltySpec penalty;
  penalty.kind = PenaltyKind::L0Exact;
  penalty.baseline = space.baseline_normalized();
  for (double x0 : {0.0, 0.25, 0.75, 1.0}) {
    Eigen::VectorXd x = Eigen::VectorXd::Constant(1, x0);
    log.append(x, -x0 * x0, eval_exact(penalty, x));
  }

  McmcConfig mcmc;
  mcmc.seed = 7;
  PosteriorEnsemble ensemble = fit_saas(log, mcmc);

  std::pair<double, double> ref{log.best_y() - 1.0, -1.5};
  std::vector<std::pair<double, double>> raw;
  for (const auto& obs : log.observations) raw.emplace_back(obs.y, -obs.xi);
  Frontier frontier = Frontier::build(std::move(raw), ref);
  auto base = qmc_normal_samples(128, 11);

  OptimizerConfig oc;
  oc.schedule = a_schedule(30, std::pow(10.0, -0.5), 1e-3);
  oc.baseline = penalty.baseline;
  oc.seed = 3;
  AcqFamily family = [&](double a) {
    return make_sebo(ensemble, frontier, penalty.smoothed(a), base);
  };
  CandidateResult result = optimize_homotopy(family, 1, oc);

  nlohmann::json j = trace_to_json(result);
  if (out_path.empty()) {
    std::cout << j.dump(2) << "\n";
  } else {
    std::ofstream out(out_path);
    out << j.dump(2) << "\n";
    std::cout << "candidate " << result.x[0] << ", trace written to " << out_path << "\n";
  }
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"sparse Bayesian optimization experiments"};
  app.require_subcommand(1);

  std::string config_path, out_dir, report_dir, demo_out;
  int reps = 0, threads = 1;
  long long seed_base = -1;

  auto* run = app.add_subcommand("run", "run an experiment from a JSON config");
  run->add_option("--config", config_path, "experiment config JSON")->required();
  run->add_option("--out", out_dir, "output directory")->required();
  run->add_option("--reps", reps, "override replication count");
  run->add_option("--seed-base", seed_base, "override base seed");
  run->add_option("--threads", threads, "parallel replications");

  auto* report = app.add_subcommand("report", "regenerate reports from report.json");
  report->add_option("--in", report_dir, "directory holding report.json")->required();

  auto* demo = app.add_subcommand("demo-homotopy", "1-D homotopy trace demo");
  demo->add_option("--out", demo_out, "trace JSON path (stdout if omitted)");

  CLI11_PARSE(app, argc, argv);

  try {
    if (run->parsed()) return cmd_run(config_path, out_dir, reps, seed_base, threads);
    if (report->parsed()) return cmd_report(report_dir);
    if (demo->parsed()) return cmd_demo(demo_out);
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  return 0;
}
