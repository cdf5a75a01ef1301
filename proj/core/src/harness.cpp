#include "sparsebo/harness.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <future>
#include <limits>
#include <nlohmann/json.hpp>
#include <stdexcept>

#include "sparsebo/acquisition.hpp"
#include "sparsebo/bench.hpp"
#include "sparsebo/sobol.hpp"
#include "sparsebo/sourcing.hpp"

namespace sparsebo {

namespace {

// splitmix64; decorrelates the per-trial seed streams
std::uint64_t mix_seed(std::uint64_t a, std::uint64_t b, std::uint64_t c) {
  std::uint64_t z = a * 0x9e3779b97f4a7c15ull + b * 0xbf58476d1ce4e5b9ull + c + 1;
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ull;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebull;
  return z ^ (z >> 31);
}

std::string fmt_double(double v) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

}  // namespace

std::string method_name(Method m) {
  switch (m) {
    case Method::Sobol: return "sobol";
    case Method::GPEI: return "gpei";
    case Method::SAASBO: return "saasbo";
    case Method::EI_ER: return "ei_er";
    case Method::EI_IR: return "ei_ir";
    case Method::SEBO: return "sebo";
  }
  throw std::logic_error("method_name: bad enum");
}

Method method_from_name(const std::string& name) {
  if (name == "sobol") return Method::Sobol;
  if (name == "gpei") return Method::GPEI;
  if (name == "saasbo") return Method::SAASBO;
  if (name == "ei_er") return Method::EI_ER;
  if (name == "ei_ir") return Method::EI_IR;
  if (name == "sebo") return Method::SEBO;
  throw std::invalid_argument("unknown method: " + name);
}

Problem make_problem(const std::string& name, const nlohmann::json& params) {
  Problem p;
  if (name == "branin_embedded" || name == "hartmann6_embedded" ||
      name == "logbranin_embedded") {
    BaseFunction base = name == "branin_embedded" ? BaseFunction::Branin
                        : name == "hartmann6_embedded" ? BaseFunction::Hartmann6
                                                       : BaseFunction::LogBranin;
    int ambient = params.value("ambient_dim", 50);
    auto problem = EmbeddedSynthetic::make(base, ambient);
    if (params.contains("active_dims")) {
      problem.active_dims = params.at("active_dims").get<std::vector<int>>();
    }
    p.space = problem.space();
    p.objective = [problem](const Eigen::VectorXd& x, std::uint64_t) {
      return eval_synthetic(problem, x);
    };
  } else if (name == "logbranin2") {
    // raw Branin box with the baseline at the raw origin
    p.space.lower = Eigen::Vector2d(-5.0, 0.0);
    p.space.upper = Eigen::Vector2d(10.0, 15.0);
    p.space.baseline_raw = Eigen::Vector2d(0.0, 0.0);
    p.objective = [](const Eigen::VectorXd& x, std::uint64_t) {
      double x1 = -5.0 + 15.0 * x[0];
      double x2 = 15.0 * x[1];
      return log_branin(x1, x2);
    };
  } else if (name == "quad1d") {
    // f(x) = -(x - center)^2 on [0,1]; the baseline need not be the optimum
    double center = params.value("center", 0.0);
    double baseline = params.value("baseline", 0.5);
    p.space = SearchSpace::unit_cube(1);
    p.space.baseline_raw = Eigen::VectorXd::Constant(1, baseline);
    p.objective = [center](const Eigen::VectorXd& x, std::uint64_t) {
      double d = x[0] - center;
      return -d * d;
    };
  } else if (name == "sourcing") {
    auto model = sourcing_generate(params.value("model_seed", std::uint64_t{0}));
    int sim_reps = params.value("sim_reps", 100);
    int d = SourcingModel::kSources;
    p.space.lower = Eigen::VectorXd::Zero(d);
    p.space.upper = Eigen::VectorXd::Constant(d, double(SourcingModel::kMaxPerSource));
    p.space.baseline_raw = Eigen::VectorXd::Zero(d);
    for (int i = 0; i < d; ++i) p.space.integer_dims.insert(i);
    p.objective = [model, sim_reps](const Eigen::VectorXd& x, std::uint64_t eval_seed) {
      std::vector<int> policy(SourcingModel::kSources);
      for (int i = 0; i < SourcingModel::kSources; ++i) {
        policy[i] = int(std::lround(x[i] * SourcingModel::kMaxPerSource));
      }
      return sourcing_evaluate(model, policy, sim_reps, eval_seed).mean_quality;
    };
  } else {
    throw std::invalid_argument("unknown problem: " + name);
  }
  p.space.validate();
  return p;
}

std::vector<std::uint64_t> ExperimentConfig::resolved_seeds() const {
  if (!seeds.empty()) {
    if (static_cast<int>(seeds.size()) != replications) {
      throw std::invalid_argument("config: seeds length must equal replications");
    }
    return seeds;
  }
  std::vector<std::uint64_t> out(replications);
  for (int r = 0; r < replications; ++r) out[r] = seed_base + r;
  return out;
}

void ExperimentConfig::validate() const {
  if (num_trials < 0 || num_init < 0 || replications < 0) {
    throw std::invalid_argument("config: counts must be nonnegative");
  }
  if (static_cast<int>(preseed.size()) + num_init > num_trials && num_trials > 0) {
    throw std::invalid_argument("config: preseed + num_init exceeds num_trials");
  }
  if (lambda < 0.0) throw std::invalid_argument("config: lambda must be >= 0");
  penalty_kind_from_name(penalty_kind);
  resolved_seeds();
}

PenaltySpec report_penalty(const ExperimentConfig& config, const SearchSpace& space) {
  PenaltySpec spec;
  spec.kind = penalty_kind_from_name(config.penalty_kind);
  if (spec.kind == PenaltyKind::L0Smoothed) {
    throw std::invalid_argument("config: reporting penalty cannot be L0_smoothed");
  }
  spec.baseline = space.baseline_normalized();
  spec.groups = config.groups;
  spec.zero_tol = config.zero_tol;
  spec.validate();
  return spec;
}

int active_dims(const Eigen::VectorXd& x, const Eigen::VectorXd& baseline,
                double zero_tol) {
  int count = 0;
  for (int i = 0; i < x.size(); ++i) {
    if (std::abs(x[i] - baseline[i]) > zero_tol) ++count;
  }
  return count;
}

double best_at_sparsity(const ObservationLog& log, int k, double impute_value,
                        double zero_tol) {
  Eigen::VectorXd baseline = log.space.baseline_normalized();
  double best = impute_value;
  bool found = false;
  for (const auto& obs : log.observations) {
    if (active_dims(obs.x, baseline, zero_tol) <= k) {
      if (!found || obs.y > best) best = obs.y;
      found = true;
    }
  }
  return best;
}

FrontierReport extract_frontier(const ObservationLog& log, double zero_tol) {
  FrontierReport rep;
  const int d = log.space.dims();
  Eigen::VectorXd baseline = log.space.baseline_normalized();
  constexpr double nan = std::numeric_limits<double>::quiet_NaN();
  rep.staircase.assign(d + 1, nan);
  std::vector<std::pair<double, double>> pts;
  double min_y = std::numeric_limits<double>::infinity();
  double max_y = -min_y;
  for (const auto& obs : log.observations) {
    pts.emplace_back(obs.y, -obs.xi);
    min_y = std::min(min_y, obs.y);
    max_y = std::max(max_y, obs.y);
    int level = active_dims(obs.x, baseline, zero_tol);
    double& slot = rep.staircase[level];
    if (std::isnan(slot) || obs.y > slot) slot = obs.y;
  }
  // cumulative: level k admits anything at most k-sparse
  for (int level = 1; level <= d; ++level) {
    double below = rep.staircase[level - 1];
    double& here = rep.staircase[level];
    if (std::isnan(here) || (!std::isnan(below) && below > here)) here = below;
  }
  double range = max_y > min_y ? max_y - min_y : 1.0;
  std::pair<double, double> ref{min_y - 0.1 * range, -(d + 0.5)};
  if (!pts.empty()) rep.frontier = Frontier::build(std::move(pts), ref);
  return rep;
}

namespace {

struct TrialContext {
  const ExperimentConfig& config;
  const Problem& problem;
  PenaltySpec exact_penalty;  // reporting penalty
  std::uint64_t rep_seed = 0;
};

OptimizerConfig make_opt_config(const TrialContext& ctx, int trial, bool homotopy) {
  const OptSettings& o = ctx.config.opt;
  OptimizerConfig oc;
  oc.num_restarts = o.num_restarts;
  oc.raw_candidates = o.raw_candidates;
  oc.max_inner_iters = o.max_inner_iters;
  oc.grad_tol = o.grad_tol;
  oc.clamp_delta = o.clamp_delta;
  oc.include_default_seeds = o.include_default_seeds;
  oc.seed = mix_seed(ctx.rep_seed, trial, 2);
  oc.baseline = ctx.problem.space.baseline_normalized();
  if (homotopy) oc.schedule = a_schedule(o.schedule_len, o.a_start, o.a_end);
  return oc;
}

// (r_f, r_s) in maximize/maximize (f, -xi) coordinates
std::pair<double, double> resolve_ref_point(const TrialContext& ctx,
                                            const ObservationLog& log) {
  if (ctx.config.acq.ref_point) {
    return {ctx.config.acq.ref_point->first, -ctx.config.acq.ref_point->second};
  }
  double min_y = std::numeric_limits<double>::infinity();
  double max_y = -min_y;
  for (const auto& obs : log.observations) {
    min_y = std::min(min_y, obs.y);
    max_y = std::max(max_y, obs.y);
  }
  double range = max_y > min_y ? max_y - min_y : 1.0;
  return {min_y - 0.1 * range, -(log.space.dims() + 0.5)};
}

// One model-based proposal. Throws on surrogate-fit failure; the caller
// falls back to Sobol.
Eigen::VectorXd propose(const TrialContext& ctx, const ObservationLog& log, int trial) {
  const ExperimentConfig& cfg = ctx.config;
  const int d = log.space.dims();

  PosteriorEnsemble ensemble = [&] {
    if (cfg.method == Method::GPEI) {
      MapFitConfig mc;
      mc.seed = mix_seed(ctx.rep_seed, trial, 1);
      return fit_map(log, mc);
    }
    McmcConfig mc = cfg.mcmc;
    mc.seed = mix_seed(ctx.rep_seed, trial, 1);
    return fit_saas(log, mc);
  }();

  auto base = qmc_normal_samples(cfg.acq.num_base_samples,
                                 mix_seed(ctx.rep_seed, trial, 3));
  const bool homotopy = (cfg.method == Method::EI_ER || cfg.method == Method::EI_IR ||
                         cfg.method == Method::SEBO) &&
                        ctx.exact_penalty.kind == PenaltyKind::L0Exact;
  OptimizerConfig oc = make_opt_config(ctx, trial, homotopy);

  // incumbent-best observation joins the restart seeds
  double best_y = -std::numeric_limits<double>::infinity();
  double best_g = best_y;
  Eigen::VectorXd best_y_x, best_g_x;
  for (const auto& obs : log.observations) {
    if (obs.y > best_y) {
      best_y = obs.y;
      best_y_x = obs.x;
    }
    double g = obs.y - cfg.lambda * obs.xi;
    if (g > best_g) {
      best_g = g;
      best_g_x = obs.x;
    }
  }
  const Eigen::VectorXd& inc_x = cfg.method == Method::EI_IR ? best_g_x : best_y_x;
  if (inc_x.size() == d) oc.extra_seeds.push_back(inc_x);

  // SEBO additionally restarts from the observed (y, -xi) frontier: the best
  // point at each sparsity level is the natural place to refine
  if (cfg.method == Method::SEBO) {
    auto ref = resolve_ref_point(ctx, log);
    std::vector<std::pair<double, double>> raw;
    for (const auto& obs : log.observations) raw.emplace_back(obs.y, -obs.xi);
    Frontier frontier = Frontier::build(raw, ref);
    for (const auto& obs : log.observations) {
      for (const auto& p : frontier.points) {
        if (obs.y == p.first && -obs.xi == p.second) {
          oc.extra_seeds.push_back(obs.x);
          break;
        }
      }
    }
  }

  if (cfg.method == Method::GPEI || cfg.method == Method::SAASBO) {
    AcqFn acq = make_ei(ensemble, best_y);
    return optimize_fixed(acq, d, oc).x;
  }

  if (homotopy) {
    AcqFamily family;
    switch (cfg.method) {
      case Method::EI_ER:
        family = [&](double a) {
          return make_ei_er(ensemble, best_y, ctx.exact_penalty.smoothed(a), cfg.lambda);
        };
        break;
      case Method::EI_IR:
        family = [&](double a) {
          return make_ei_ir(ensemble, best_g, ctx.exact_penalty.smoothed(a), cfg.lambda,
                            base);
        };
        break;
      default: {  // SEBO
        auto ref = resolve_ref_point(ctx, log);
        std::vector<std::pair<double, double>> raw;
        for (const auto& obs : log.observations) raw.emplace_back(obs.y, -obs.xi);
        Frontier frontier = Frontier::build(std::move(raw), ref);
        family = [&, frontier](double a) {
          return make_sebo(ensemble, frontier, ctx.exact_penalty.smoothed(a), base);
        };
        break;
      }
    }
    CandidateResult hom = optimize_homotopy(family, d, oc);
    if (cfg.method != Method::SEBO) return hom.x;

    // refinement pass: fixed ascents at the final smoothing width from the
    // frontier seeds keep their sparsity pattern (inactive dims see no
    // gradient) and compete with the homotopy winner on acquisition value
    AcqFn acq_end = family(oc.schedule.back());
    Eigen::VectorXd lower = Eigen::VectorXd::Zero(d);
    Eigen::VectorXd upper = Eigen::VectorXd::Ones(d);
    Eigen::VectorXd best_x = hom.x;
    double best_acq = acq_end(hom.x, nullptr);
    LbfgsConfig lc;
    lc.max_iters = oc.max_inner_iters;
    lc.grad_tol = oc.grad_tol;
    for (const auto& s : oc.extra_seeds) {
      LbfgsResult r = maximize_box(acq_end, s, lower, upper, lc);
      if (r.failed) continue;
      auto [xc, clamped] = clamp_to_baseline(r.x, acq_end, oc);
      double a = acq_end(xc, nullptr);
      if (a > best_acq) {
        best_acq = a;
        best_x = xc;
      }
    }
    return best_x;
  }

  // L1 / group-lasso penalties: no smoothing schedule, single fixed solve
  AcqFn acq;
  switch (cfg.method) {
    case Method::EI_ER:
      acq = make_ei_er(ensemble, best_y, ctx.exact_penalty, cfg.lambda);
      break;
    case Method::EI_IR:
      acq = make_ei_ir(ensemble, best_g, ctx.exact_penalty, cfg.lambda, base);
      break;
    default: {
      auto ref = resolve_ref_point(ctx, log);
      std::vector<std::pair<double, double>> raw;
      for (const auto& obs : log.observations) raw.emplace_back(obs.y, -obs.xi);
      acq = make_sebo(ensemble, Frontier::build(std::move(raw), ref),
                      ctx.exact_penalty, base);
      break;
    }
  }
  return optimize_fixed(acq, d, oc).x;
}

ReplicationResult run_replication(const ExperimentConfig& cfg, const Problem& problem,
                                  std::uint64_t seed) {
  ReplicationResult rep;
  rep.log.space = problem.space;
  rep.log.seed = seed;
  const int d = problem.space.dims();

  TrialContext ctx{cfg, problem, report_penalty(cfg, problem.space), seed};
  SobolSampler sobol(d, mix_seed(seed, 0, 0));

  const int n_pre = static_cast<int>(cfg.preseed.size());

  for (int trial = 0; trial < cfg.num_trials; ++trial) {
    auto t0 = std::chrono::steady_clock::now();
    Eigen::VectorXd x;
    if (trial < n_pre) {
      x = cfg.preseed[trial];
    } else if (trial < n_pre + cfg.num_init || cfg.method == Method::Sobol) {
      x = sobol.next();
    } else {
      try {
        x = propose(ctx, rep.log, trial);
      } catch (const std::exception&) {
        rep.fallback_trials.push_back(trial);
        x = sobol.next();
      }
    }
    // snap integer dims so the logged point is the one actually evaluated
    Eigen::VectorXd x_eval = normalize(denormalize(x, problem.space), problem.space);
    double y = problem.objective(x_eval, mix_seed(seed, trial, 4));
    double xi = eval_exact(ctx.exact_penalty, x_eval);
    rep.log.append(x_eval, y, xi);

    auto t1 = std::chrono::steady_clock::now();
    double elapsed = std::chrono::duration<double>(t1 - t0).count();
    rep.trial_seconds.push_back(elapsed);
    if (cfg.trial_timeout_s > 0.0 && elapsed > cfg.trial_timeout_s &&
        trial + 1 < cfg.num_trials) {
      rep.complete = false;
      break;
    }
  }
  return rep;
}

}  // namespace

RunReport run_experiment(const ExperimentConfig& config, int threads) {
  config.validate();
  Problem problem = make_problem(config.problem, nlohmann::json::parse(config.problem_params));
  for (const auto& p : config.preseed) {
    if (p.size() != problem.space.dims()) {
      throw std::invalid_argument("run_experiment: preseed dimension mismatch");
    }
  }
  auto seeds = config.resolved_seeds();

  RunReport report;
  report.config = config;
  report.replications.resize(seeds.size());

  if (threads <= 1 || seeds.size() <= 1) {
    for (size_t r = 0; r < seeds.size(); ++r) {
      report.replications[r] = run_replication(config, problem, seeds[r]);
    }
  } else {
    // waves of at most `threads` replications; results reduced in seed order
    for (size_t start = 0; start < seeds.size(); start += threads) {
      size_t end = std::min(start + threads, seeds.size());
      std::vector<std::future<ReplicationResult>> wave;
      for (size_t r = start; r < end; ++r) {
        wave.push_back(std::async(std::launch::async, run_replication,
                                  std::cref(config), std::cref(problem), seeds[r]));
      }
      for (size_t r = start; r < end; ++r) {
        report.replications[r] = wave[r - start].get();
      }
    }
  }
  return report;
}

nlohmann::json config_to_json(const ExperimentConfig& c) {
  nlohmann::json j;
  j["problem"] = c.problem;
  j["problem_params"] = nlohmann::json::parse(c.problem_params);
  j["method"] = method_name(c.method);
  j["penalty_kind"] = c.penalty_kind;
  j["groups"] = c.groups;
  j["zero_tol"] = c.zero_tol;
  j["lambda"] = c.lambda;
  j["num_init"] = c.num_init;
  j["num_trials"] = c.num_trials;
  j["replications"] = c.replications;
  j["seed_base"] = c.seed_base;
  j["seeds"] = c.seeds;
  j["mcmc"] = {{"warmup", c.mcmc.warmup},
               {"num_samples", c.mcmc.num_samples},
               {"thin", c.mcmc.thin},
               {"max_tree_depth", c.mcmc.max_tree_depth}};
  j["optimizer"] = {{"num_restarts", c.opt.num_restarts},
                    {"raw_candidates", c.opt.raw_candidates},
                    {"max_inner_iters", c.opt.max_inner_iters},
                    {"grad_tol", c.opt.grad_tol},
                    {"schedule_len", c.opt.schedule_len},
                    {"a_start", c.opt.a_start},
                    {"a_end", c.opt.a_end},
                    {"clamp_delta", c.opt.clamp_delta},
                    {"include_default_seeds", c.opt.include_default_seeds}};
  j["acquisition"] = {{"num_base_samples", c.acq.num_base_samples},
                      {"beta", c.acq.beta},
                      {"chebyshev_c", c.acq.chebyshev_c}};
  if (c.acq.ref_point) {
    j["acquisition"]["ref_point"] = {c.acq.ref_point->first, c.acq.ref_point->second};
  }
  j["impute_value"] = c.impute_value;
  j["metrics_k"] = c.metrics_k;
  nlohmann::json pre = nlohmann::json::array();
  for (const auto& p : c.preseed) pre.push_back(std::vector<double>(p.begin(), p.end()));
  j["preseed"] = pre;
  j["trial_timeout_s"] = c.trial_timeout_s;
  return j;
}

ExperimentConfig config_from_json(const nlohmann::json& j) {
  ExperimentConfig c;
  c.problem = j.value("problem", c.problem);
  c.problem_params = j.value("problem_params", nlohmann::json::object()).dump();
  if (j.contains("method")) c.method = method_from_name(j.at("method"));
  c.penalty_kind = j.value("penalty_kind", c.penalty_kind);
  c.groups = j.value("groups", c.groups);
  c.zero_tol = j.value("zero_tol", c.zero_tol);
  c.lambda = j.value("lambda", c.lambda);
  c.num_init = j.value("num_init", c.num_init);
  c.num_trials = j.value("num_trials", c.num_trials);
  c.replications = j.value("replications", c.replications);
  c.seed_base = j.value("seed_base", c.seed_base);
  c.seeds = j.value("seeds", c.seeds);
  if (j.contains("mcmc")) {
    const auto& m = j.at("mcmc");
    c.mcmc.warmup = m.value("warmup", c.mcmc.warmup);
    c.mcmc.num_samples = m.value("num_samples", c.mcmc.num_samples);
    c.mcmc.thin = m.value("thin", c.mcmc.thin);
    c.mcmc.max_tree_depth = m.value("max_tree_depth", c.mcmc.max_tree_depth);
  }
  if (j.contains("optimizer")) {
    const auto& o = j.at("optimizer");
    c.opt.num_restarts = o.value("num_restarts", c.opt.num_restarts);
    c.opt.raw_candidates = o.value("raw_candidates", c.opt.raw_candidates);
    c.opt.max_inner_iters = o.value("max_inner_iters", c.opt.max_inner_iters);
    c.opt.grad_tol = o.value("grad_tol", c.opt.grad_tol);
    c.opt.schedule_len = o.value("schedule_len", c.opt.schedule_len);
    c.opt.a_start = o.value("a_start", c.opt.a_start);
    c.opt.a_end = o.value("a_end", c.opt.a_end);
    c.opt.clamp_delta = o.value("clamp_delta", c.opt.clamp_delta);
    c.opt.include_default_seeds =
        o.value("include_default_seeds", c.opt.include_default_seeds);
  }
  if (j.contains("acquisition")) {
    const auto& a = j.at("acquisition");
    c.acq.num_base_samples = a.value("num_base_samples", c.acq.num_base_samples);
    c.acq.beta = a.value("beta", c.acq.beta);
    c.acq.chebyshev_c = a.value("chebyshev_c", c.acq.chebyshev_c);
    if (a.contains("ref_point") && !a.at("ref_point").is_null()) {
      auto rp = a.at("ref_point").get<std::vector<double>>();
      if (rp.size() != 2) throw std::invalid_argument("ref_point needs 2 entries");
      c.acq.ref_point = {rp[0], rp[1]};
    }
  }
  c.impute_value = j.value("impute_value", c.impute_value);
  c.metrics_k = j.value("metrics_k", c.metrics_k);
  if (j.contains("preseed")) {
    for (const auto& row : j.at("preseed")) {
      auto v = row.get<std::vector<double>>();
      c.preseed.push_back(Eigen::Map<const Eigen::VectorXd>(v.data(), v.size()));
    }
  }
  c.trial_timeout_s = j.value("trial_timeout_s", c.trial_timeout_s);
  return c;
}

nlohmann::json RunReport::to_json() const {
  nlohmann::json j;
  j["config"] = config_to_json(config);
  nlohmann::json reps = nlohmann::json::array();
  for (const auto& rep : replications) {
    nlohmann::json r;
    r["log"] = rep.log.to_json();
    r["trial_seconds"] = rep.trial_seconds;
    r["fallback_trials"] = rep.fallback_trials;
    r["complete"] = rep.complete;
    reps.push_back(std::move(r));
  }
  j["replications"] = reps;
  return j;
}

RunReport RunReport::from_json(const nlohmann::json& j) {
  RunReport out;
  out.config = config_from_json(j.at("config"));
  for (const auto& r : j.at("replications")) {
    ReplicationResult rep;
    rep.log = ObservationLog::from_json(r.at("log"));
    rep.trial_seconds = r.value("trial_seconds", rep.trial_seconds);
    rep.fallback_trials = r.value("fallback_trials", rep.fallback_trials);
    rep.complete = r.value("complete", true);
    out.replications.push_back(std::move(rep));
  }
  return out;
}

void emit_reports(const RunReport& report, const std::string& out_dir) {
  namespace fs = std::filesystem;
  fs::create_directories(out_dir);
  const auto& cfg = report.config;

  {
    std::ofstream f(fs::path(out_dir) / "config.json");
    f << config_to_json(cfg).dump(2) << "\n";
  }
  {
    std::ofstream f(fs::path(out_dir) / "report.json");
    f << report.to_json().dump(2) << "\n";
  }
  for (size_t r = 0; r < report.replications.size(); ++r) {
    std::ofstream f(fs::path(out_dir) / ("rep" + std::to_string(r) + "_observations.csv"));
    f << report.replications[r].log.to_csv();
  }

  std::vector<int> ks = cfg.metrics_k;
  if (ks.empty()) ks = {std::numeric_limits<int>::max()};

  // cumulative best-at-sparsity per (k, trial), one column per replication
  const int reps = static_cast<int>(report.replications.size());
  std::ofstream mf(fs::path(out_dir) / "metrics.csv");
  mf << "k,trial,mean,two_se";
  for (int r = 0; r < reps; ++r) mf << ",rep_" << r;
  mf << "\n";

  nlohmann::json plot;
  plot["k_values"] = ks;
  plot["num_trials"] = cfg.num_trials;
  nlohmann::json curves = nlohmann::json::array();

  for (int k : ks) {
    nlohmann::json curve;
    curve["k"] = k;
    std::vector<double> means, two_ses;
    for (int trial = 0; trial < cfg.num_trials; ++trial) {
      std::vector<double> vals;
      for (const auto& rep : report.replications) {
        ObservationLog prefix;
        prefix.space = rep.log.space;
        prefix.seed = rep.log.seed;
        for (const auto& obs : rep.log.observations) {
          if (obs.trial <= trial) prefix.observations.push_back(obs);
        }
        vals.push_back(best_at_sparsity(prefix, k, cfg.impute_value, cfg.zero_tol));
      }
      double mean = 0.0;
      for (double v : vals) mean += v;
      if (!vals.empty()) mean /= vals.size();
      double se = 0.0;
      if (vals.size() > 1) {
        double ss = 0.0;
        for (double v : vals) ss += (v - mean) * (v - mean);
        se = std::sqrt(ss / (vals.size() - 1) / vals.size());
      }
      mf << k << "," << trial << "," << fmt_double(mean) << "," << fmt_double(2 * se);
      for (double v : vals) mf << "," << fmt_double(v);
      mf << "\n";
      means.push_back(mean);
      two_ses.push_back(2 * se);
    }
    curve["mean"] = means;
    curve["two_se"] = two_ses;
    curves.push_back(std::move(curve));
  }
  plot["curves"] = curves;

  nlohmann::json frontiers = nlohmann::json::array();
  for (const auto& rep : report.replications) {
    FrontierReport fr = extract_frontier(rep.log, cfg.zero_tol);
    nlohmann::json fj;
    nlohmann::json pts = nlohmann::json::array();
    for (const auto& [f_val, s_val] : fr.frontier.points) {
      pts.push_back({{"y", f_val}, {"xi", -s_val}});
    }
    fj["points"] = pts;
    fj["ref"] = {{"y", fr.frontier.ref.first}, {"xi", -fr.frontier.ref.second}};
    nlohmann::json stair = nlohmann::json::array();
    for (double v : fr.staircase) {
      stair.push_back(std::isnan(v) ? nlohmann::json(cfg.impute_value) : nlohmann::json(v));
    }
    fj["staircase"] = stair;
    fj["seed"] = rep.log.seed;
    frontiers.push_back(std::move(fj));
  }
  {
    std::ofstream f(fs::path(out_dir) / "frontier.json");
    f << frontiers.dump(2) << "\n";
  }
  {
    std::ofstream f(fs::path(out_dir) / "plotdata.json");
    f << plot.dump(2) << "\n";
  }
}

}  // namespace sparsebo
