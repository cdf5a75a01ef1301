#include "sparsebo/acqopt.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <nlohmann/json.hpp>
#include <stdexcept>

#include "sparsebo/optim.hpp"
#include "sparsebo/sobol.hpp"

namespace sparsebo {

void OptimizerConfig::validate_schedule() const {
  if (schedule.empty()) throw std::invalid_argument("OptimizerConfig: empty schedule");
  for (std::size_t i = 1; i < schedule.size(); ++i) {
    if (!(schedule[i] < schedule[i - 1])) {
      throw std::invalid_argument("OptimizerConfig: schedule must be strictly decreasing");
    }
  }
}

namespace {

struct Seeded {
  Eigen::VectorXd x;
  double acq = 0.0;
};

std::vector<Seeded> screen_candidates(const AcqFn& acq, int dim,
                                      const OptimizerConfig& config) {
  SobolSampler sampler(dim, config.seed);
  std::vector<Seeded> cands;
  cands.reserve(config.raw_candidates + 4);
  for (int i = 0; i < config.raw_candidates; ++i) {
    Seeded s;
    s.x = sampler.next();
    s.acq = acq(s.x, nullptr);
    cands.push_back(std::move(s));
  }
  if (config.include_default_seeds) {
    if (config.baseline.size() == dim) {
      cands.push_back({config.baseline, acq(config.baseline, nullptr)});
    }
    for (const auto& e : config.extra_seeds) {
      if (e.size() == dim) cands.push_back({e, acq(e, nullptr)});
    }
  }
  // stable: equal values keep candidate order for deterministic tie-breaks
  std::stable_sort(cands.begin(), cands.end(),
                   [](const Seeded& a, const Seeded& b) { return a.acq > b.acq; });
  return cands;
}

}  // namespace

CandidateResult optimize_fixed(const AcqFn& acq, int dim, const OptimizerConfig& config) {
  if (config.num_restarts < 1) {
    throw std::invalid_argument("optimize_fixed: num_restarts must be >= 1");
  }
  const Eigen::VectorXd lo = Eigen::VectorXd::Zero(dim);
  const Eigen::VectorXd hi = Eigen::VectorXd::Ones(dim);
  std::vector<Seeded> cands = screen_candidates(acq, dim, config);

  LbfgsConfig lcfg;
  lcfg.max_iters = config.max_inner_iters;
  lcfg.grad_tol = config.grad_tol;

  CandidateResult best;
  best.acq_value = -std::numeric_limits<double>::infinity();
  bool any = false;
  const int restarts = std::min<int>(config.num_restarts, cands.size());
  for (int i = 0; i < restarts; ++i) {
    if (std::isnan(cands[i].acq)) continue;  // discard NaN seeds
    LbfgsResult r = maximize_box(acq, cands[i].x, lo, hi, lcfg);
    if (r.failed || std::isnan(r.f)) continue;
    if (!any || r.f > best.acq_value) {
      best.x = r.x;
      best.acq_value = r.f;
      any = true;
    }
  }
  if (!any) throw std::runtime_error("optimize_fixed: all restarts failed");
  return best;
}

CandidateResult optimize_homotopy(const AcqFamily& family, int dim,
                                  const OptimizerConfig& config) {
  config.validate_schedule();
  const Eigen::VectorXd lo = Eigen::VectorXd::Zero(dim);
  const Eigen::VectorXd hi = Eigen::VectorXd::Ones(dim);

  AcqFn acq = family(config.schedule.front());
  CandidateResult result = optimize_fixed(acq, dim, config);
  result.homotopy_trace.push_back({config.schedule.front(), result.x, result.acq_value});

  LbfgsConfig lcfg;
  lcfg.max_iters = config.max_inner_iters;
  lcfg.grad_tol = config.grad_tol;

  for (std::size_t i = 1; i < config.schedule.size(); ++i) {
    acq = family(config.schedule[i]);
    LbfgsResult r = maximize_box(acq, result.x, lo, hi, lcfg);
    if (!r.failed && std::isfinite(r.f)) {
      result.x = r.x;
      result.acq_value = r.f;
    } else {
      // keep the previous iterate, re-scored at the new a
      result.acq_value = acq(result.x, nullptr);
    }
    result.homotopy_trace.push_back({config.schedule[i], result.x, result.acq_value});
  }

  auto [clamped, dims] = clamp_to_baseline(result.x, acq, config);
  result.x = clamped;
  result.clamped_dims = std::move(dims);
  result.acq_value = acq(result.x, nullptr);
  return result;
}

std::pair<Eigen::VectorXd, std::set<int>> clamp_to_baseline(const Eigen::VectorXd& x,
                                                            const AcqFn& acq,
                                                            const OptimizerConfig& config) {
  if (config.baseline.size() != x.size()) {
    throw std::invalid_argument("clamp_to_baseline: baseline dimension mismatch");
  }
  std::vector<int> within;
  for (int i = 0; i < x.size(); ++i) {
    if (std::abs(x[i] - config.baseline[i]) <= config.clamp_delta) within.push_back(i);
  }
  if (within.empty()) return {x, {}};

  const double base_val = acq(x, nullptr);
  const double slack = config.clamp_acq_slack_rel * std::abs(base_val) +
                       config.clamp_acq_slack_abs;

  Eigen::VectorXd joint = x;
  for (int i : within) joint[i] = config.baseline[i];
  if (acq(joint, nullptr) >= base_val - slack) {
    return {joint, std::set<int>(within.begin(), within.end())};
  }

  // greedy, smallest displacement first
  std::sort(within.begin(), within.end(), [&](int a, int b) {
    return std::abs(x[a] - config.baseline[a]) < std::abs(x[b] - config.baseline[b]);
  });
  Eigen::VectorXd cur = x;
  double cur_val = base_val;
  std::set<int> clamped;
  for (int i : within) {
    Eigen::VectorXd trial = cur;
    trial[i] = config.baseline[i];
    double v = acq(trial, nullptr);
    if (v >= cur_val - slack) {
      cur = trial;
      cur_val = v;
      clamped.insert(i);
    }
  }
  return {cur, clamped};
}

nlohmann::json trace_to_json(const CandidateResult& result) {
  nlohmann::json j;
  j["x"] = std::vector<double>(result.x.begin(), result.x.end());
  j["acq_value"] = result.acq_value;
  j["clamped_dims"] = std::vector<int>(result.clamped_dims.begin(), result.clamped_dims.end());
  nlohmann::json stages = nlohmann::json::array();
  for (const auto& s : result.homotopy_trace) {
    nlohmann::json js;
    js["a"] = s.a;
    js["x"] = std::vector<double>(s.x.begin(), s.x.end());
    js["acq"] = s.acq;
    stages.push_back(std::move(js));
  }
  j["homotopy_trace"] = std::move(stages);
  return j;
}

}  // namespace sparsebo
