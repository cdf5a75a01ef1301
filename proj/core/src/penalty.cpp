#include "sparsebo/penalty.hpp"

#include <cmath>
#include <nlohmann/json.hpp>
#include <stdexcept>

namespace sparsebo {

std::string penalty_kind_name(PenaltyKind kind) {
  switch (kind) {
    case PenaltyKind::L0Exact: return "L0_exact";
    case PenaltyKind::L0Smoothed: return "L0_smoothed";
    case PenaltyKind::L1: return "L1";
    case PenaltyKind::GroupLasso: return "group_lasso";
  }
  throw std::logic_error("penalty_kind_name: bad kind");
}

PenaltyKind penalty_kind_from_name(const std::string& name) {
  if (name == "L0_exact" || name == "L0") return PenaltyKind::L0Exact;
  if (name == "L0_smoothed") return PenaltyKind::L0Smoothed;
  if (name == "L1") return PenaltyKind::L1;
  if (name == "group_lasso" || name == "GL") return PenaltyKind::GroupLasso;
  throw std::invalid_argument("unknown penalty kind: " + name);
}

void PenaltySpec::validate() const {
  const int d = static_cast<int>(baseline.size());
  if (d < 1) throw std::invalid_argument("PenaltySpec: empty baseline");
  if (zero_tol < 0) throw std::invalid_argument("PenaltySpec: zero_tol must be >= 0");
  if (kind == PenaltyKind::L0Smoothed && !(a > 0)) {
    throw std::invalid_argument("PenaltySpec: smoothing width a must be positive");
  }
  if (kind == PenaltyKind::GroupLasso) {
    std::vector<int> seen(d, 0);
    for (const auto& g : groups) {
      for (int i : g) {
        if (i < 0 || i >= d || seen[i]++) {
          throw std::invalid_argument("PenaltySpec: groups must partition dims");
        }
      }
    }
    for (int i = 0; i < d; ++i) {
      if (!seen[i]) throw std::invalid_argument("PenaltySpec: groups must cover all dims");
    }
  }
}

PenaltySpec PenaltySpec::smoothed(double a_value) const {
  PenaltySpec s = *this;
  s.kind = PenaltyKind::L0Smoothed;
  s.a = a_value;
  return s;
}

PenaltySpec PenaltySpec::exact_l0() const {
  PenaltySpec s = *this;
  s.kind = PenaltyKind::L0Exact;
  return s;
}

double eval_exact(const PenaltySpec& spec, const Eigen::VectorXd& x) {
  if (x.size() != spec.baseline.size()) {
    throw std::invalid_argument("eval_exact: dimension mismatch");
  }
  const Eigen::VectorXd r = x - spec.baseline;
  switch (spec.kind) {
    case PenaltyKind::L0Exact: {
      int count = 0;
      for (int i = 0; i < r.size(); ++i) {
        if (std::abs(r[i]) > spec.zero_tol) ++count;
      }
      return count;
    }
    case PenaltyKind::L0Smoothed: {
      double sum = 0.0;
      for (int i = 0; i < r.size(); ++i) {
        double t = r[i] / spec.a;
        sum += std::exp(-0.5 * t * t);
      }
      return static_cast<double>(r.size()) - sum;
    }
    case PenaltyKind::L1:
      return r.cwiseAbs().sum();
    case PenaltyKind::GroupLasso: {
      double sum = 0.0;
      for (const auto& g : spec.groups) {
        double sq = 0.0;
        for (int i : g) sq += r[i] * r[i];
        sum += std::sqrt(sq);
      }
      return sum;
    }
  }
  throw std::logic_error("eval_exact: bad kind");
}

double eval_smooth_grad(const PenaltySpec& spec, const Eigen::VectorXd& x,
                        Eigen::VectorXd* grad) {
  if (x.size() != spec.baseline.size()) {
    throw std::invalid_argument("eval_smooth_grad: dimension mismatch");
  }
  if (spec.kind == PenaltyKind::L0Exact) {
    throw std::invalid_argument(
        "eval_smooth_grad: exact L0 is non-differentiable; use the homotopy relaxation");
  }
  const Eigen::VectorXd r = x - spec.baseline;
  if (grad) grad->setZero(r.size());
  switch (spec.kind) {
    case PenaltyKind::L0Smoothed: {
      double sum = 0.0;
      const double a2 = spec.a * spec.a;
      for (int i = 0; i < r.size(); ++i) {
        double phi = std::exp(-0.5 * r[i] * r[i] / a2);
        sum += phi;
        if (grad) (*grad)[i] = (r[i] / a2) * phi;
      }
      return static_cast<double>(r.size()) - sum;
    }
    case PenaltyKind::L1: {
      double sum = 0.0;
      for (int i = 0; i < r.size(); ++i) {
        sum += std::abs(r[i]);
        // subgradient 0 at the kink
        if (grad && r[i] != 0.0) (*grad)[i] = r[i] > 0 ? 1.0 : -1.0;
      }
      return sum;
    }
    case PenaltyKind::GroupLasso: {
      double sum = 0.0;
      for (const auto& g : spec.groups) {
        double sq = 0.0;
        for (int i : g) sq += r[i] * r[i];
        double norm = std::sqrt(sq);
        sum += norm;
        if (grad && norm > 0.0) {
          for (int i : g) (*grad)[i] = r[i] / norm;
        }
      }
      return sum;
    }
    default:
      throw std::logic_error("eval_smooth_grad: bad kind");
  }
}

std::vector<double> a_schedule(int k, double a_start, double a_end) {
  if (k < 2) throw std::invalid_argument("a_schedule: need k >= 2");
  if (!(a_start > a_end) || !(a_end > 0)) {
    throw std::invalid_argument("a_schedule: need a_start > a_end > 0");
  }
  std::vector<double> out(k);
  const double l0 = std::log10(a_start);
  const double l1 = std::log10(a_end);
  for (int i = 0; i < k; ++i) {
    out[i] = std::pow(10.0, l0 + (l1 - l0) * static_cast<double>(i) / (k - 1));
  }
  out.front() = a_start;
  out.back() = a_end;
  return out;
}

nlohmann::json penalty_to_json(const PenaltySpec& spec) {
  nlohmann::json j;
  j["kind"] = penalty_kind_name(spec.kind);
  j["baseline"] = std::vector<double>(spec.baseline.begin(), spec.baseline.end());
  j["groups"] = spec.groups;
  j["a"] = spec.a;
  j["zero_tol"] = spec.zero_tol;
  return j;
}

PenaltySpec penalty_from_json(const nlohmann::json& j) {
  PenaltySpec spec;
  spec.kind = penalty_kind_from_name(j.at("kind").get<std::string>());
  auto base = j.at("baseline").get<std::vector<double>>();
  spec.baseline = Eigen::Map<const Eigen::VectorXd>(base.data(), base.size());
  spec.groups = j.value("groups", std::vector<std::vector<int>>{});
  spec.a = j.value("a", 0.0);
  spec.zero_tol = j.value("zero_tol", 1e-6);
  spec.validate();
  return spec;
}

}  // namespace sparsebo
