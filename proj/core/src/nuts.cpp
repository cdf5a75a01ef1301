#include "sparsebo/nuts.hpp"

#include <cmath>
#include <limits>
#include <random>
#include <stdexcept>

namespace sparsebo {

namespace {

constexpr double kDeltaMax = 1000.0;  // divergence threshold on the joint log density

struct State {
  Eigen::VectorXd theta;
  Eigen::VectorXd r;
  Eigen::VectorXd grad;
  double logp = 0.0;

  double joint() const { return logp - 0.5 * r.squaredNorm(); }
};

struct Tree {
  State minus, plus;
  Eigen::VectorXd sample;  // proposal from this subtree
  int n_valid = 0;
  bool stop = false;
  double alpha_sum = 0.0;
  int n_alpha = 0;
};

class Nuts {
 public:
  Nuts(const ObjectiveFn& logp, const NutsConfig& cfg)
      : logp_(logp), cfg_(cfg), rng_(cfg.seed), unif_(0.0, 1.0), gauss_(0.0, 1.0) {}

  std::vector<Eigen::VectorXd> run(Eigen::VectorXd init) {
    const int d = static_cast<int>(init.size());
    State cur;
    cur.theta = std::move(init);
    cur.grad.resize(d);
    cur.logp = logp_(cur.theta, &cur.grad);
    if (!std::isfinite(cur.logp) || !cur.grad.allFinite()) {
      throw std::runtime_error("nuts_sample: non-finite log density at the initial point");
    }

    double log_eps = std::log(find_reasonable_epsilon(cur));
    const double mu = std::log(10.0) + log_eps;
    double log_eps_bar = 0.0;
    double h_bar = 0.0;
    const double gamma = 0.05, t0 = 10.0, kappa = 0.75;

    std::vector<Eigen::VectorXd> draws;
    draws.reserve(cfg_.num_samples);
    const int total = cfg_.warmup + cfg_.num_samples;
    int accepted_any = 0;
    for (int it = 1; it <= total; ++it) {
      double eps = std::exp(it <= cfg_.warmup ? log_eps : log_eps_bar);
      double alpha_stat = 0.0;
      transition(cur, eps, &alpha_stat);
      if (std::isfinite(alpha_stat)) ++accepted_any;
      if (it <= cfg_.warmup) {
        double m = static_cast<double>(it);
        h_bar = (1.0 - 1.0 / (m + t0)) * h_bar +
                (cfg_.target_accept - alpha_stat) / (m + t0);
        log_eps = mu - std::sqrt(m) / gamma * h_bar;
        double w = std::pow(m, -kappa);
        log_eps_bar = w * log_eps + (1.0 - w) * log_eps_bar;
      } else {
        draws.push_back(cur.theta);
      }
    }
    if (accepted_any == 0) {
      throw std::runtime_error("nuts_sample: every proposal was invalid");
    }
    return draws;
  }

 private:
  // One leapfrog step; returns false when the state goes non-finite.
  bool leapfrog(State& s, double v_eps) {
    s.r += 0.5 * v_eps * s.grad;
    s.theta += v_eps * s.r;
    s.logp = logp_(s.theta, &s.grad);
    if (!std::isfinite(s.logp) || !s.grad.allFinite()) return false;
    s.r += 0.5 * v_eps * s.grad;
    return true;
  }

  double find_reasonable_epsilon(const State& start) {
    double eps = cfg_.init_step;
    State s = start;
    s.r.resize(s.theta.size());
    for (int i = 0; i < s.r.size(); ++i) s.r[i] = gauss_(rng_);
    double joint0 = s.joint();
    State probe = s;
    bool ok = leapfrog(probe, eps);
    double log_ratio = ok ? probe.joint() - joint0
                          : -std::numeric_limits<double>::infinity();
    double direction = log_ratio > std::log(0.5) ? 1.0 : -1.0;
    for (int i = 0; i < 50; ++i) {
      if (direction > 0 && log_ratio <= std::log(0.5)) break;
      if (direction < 0 && log_ratio >= std::log(0.5)) break;
      eps *= std::pow(2.0, direction);
      probe = s;
      ok = leapfrog(probe, eps);
      log_ratio = ok ? probe.joint() - joint0 : -std::numeric_limits<double>::infinity();
      if (eps < 1e-10 || eps > 1e7) break;
    }
    return eps;
  }

  static bool no_u_turn(const Tree& t) {
    Eigen::VectorXd dtheta = t.plus.theta - t.minus.theta;
    return dtheta.dot(t.minus.r) >= 0.0 && dtheta.dot(t.plus.r) >= 0.0;
  }

  Tree build_tree(const State& s, double log_u, int dir, int depth, double eps,
                  double joint0) {
    Tree t;
    if (depth == 0) {
      State next = s;
      bool ok = leapfrog(next, dir * eps);
      double joint = ok ? next.joint() : -std::numeric_limits<double>::infinity();
      t.minus = t.plus = next;
      t.sample = next.theta;
      t.n_valid = (ok && log_u <= joint) ? 1 : 0;
      t.stop = !ok || (log_u >= kDeltaMax + joint);
      t.alpha_sum = ok ? std::min(1.0, std::exp(joint - joint0)) : 0.0;
      t.n_alpha = 1;
      return t;
    }
    Tree first = build_tree(s, log_u, dir, depth - 1, eps, joint0);
    if (first.stop) return first;
    Tree second = build_tree(dir > 0 ? first.plus : first.minus, log_u, dir, depth - 1,
                             eps, joint0);
    Tree t2;
    t2.minus = dir > 0 ? first.minus : second.minus;
    t2.plus = dir > 0 ? second.plus : first.plus;
    int n_total = first.n_valid + second.n_valid;
    if (n_total > 0 && unif_(rng_) < static_cast<double>(second.n_valid) / n_total) {
      t2.sample = second.sample;
    } else {
      t2.sample = first.sample;
    }
    t2.n_valid = n_total;
    t2.alpha_sum = first.alpha_sum + second.alpha_sum;
    t2.n_alpha = first.n_alpha + second.n_alpha;
    t2.stop = second.stop || !no_u_turn(t2);
    return t2;
  }

  void transition(State& cur, double eps, double* alpha_stat) {
    const int d = static_cast<int>(cur.theta.size());
    cur.r.resize(d);
    for (int i = 0; i < d; ++i) cur.r[i] = gauss_(rng_);
    double joint0 = cur.joint();
    double log_u = joint0 + std::log(unif_(rng_));

    Tree whole;
    whole.minus = whole.plus = cur;
    whole.sample = cur.theta;
    whole.n_valid = 1;
    double alpha_sum = 0.0;
    int n_alpha = 0;

    Eigen::VectorXd chosen = cur.theta;
    for (int depth = 0; depth < cfg_.max_tree_depth; ++depth) {
      int dir = unif_(rng_) < 0.5 ? -1 : 1;
      Tree sub = build_tree(dir > 0 ? whole.plus : whole.minus, log_u, dir, depth, eps,
                            joint0);
      alpha_sum += sub.alpha_sum;
      n_alpha += sub.n_alpha;
      if (!sub.stop && sub.n_valid > 0) {
        if (unif_(rng_) <
            std::min(1.0, static_cast<double>(sub.n_valid) / whole.n_valid)) {
          chosen = sub.sample;
        }
      }
      whole.n_valid += sub.n_valid;
      if (dir > 0) {
        whole.plus = sub.plus;
      } else {
        whole.minus = sub.minus;
      }
      if (sub.stop || !no_u_turn(whole)) break;
    }
    *alpha_stat = n_alpha > 0 ? alpha_sum / n_alpha : 0.0;
    if (chosen != cur.theta) {
      cur.theta = chosen;
      cur.logp = logp_(cur.theta, &cur.grad);
    }
  }

  const ObjectiveFn& logp_;
  NutsConfig cfg_;
  std::mt19937_64 rng_;
  std::uniform_real_distribution<double> unif_;
  std::normal_distribution<double> gauss_;
};

}  // namespace

std::vector<Eigen::VectorXd> nuts_sample(const ObjectiveFn& log_density,
                                         Eigen::VectorXd init, const NutsConfig& config) {
  Nuts sampler(log_density, config);
  return sampler.run(std::move(init));
}

}  // namespace sparsebo
