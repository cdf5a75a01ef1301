#include "sparsebo/space.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <nlohmann/json.hpp>
#include <stdexcept>

#include "sparsebo/sobol.hpp"

namespace sparsebo {

void SearchSpace::validate() const {
  const int d = dims();
  if (d < 1) throw std::invalid_argument("SearchSpace: dims must be positive");
  if (upper.size() != d || baseline_raw.size() != d) {
    throw std::invalid_argument("SearchSpace: bound/baseline dimension mismatch");
  }
  for (int i = 0; i < d; ++i) {
    if (!(lower[i] < upper[i])) {
      throw std::invalid_argument("SearchSpace: lower must be < upper in every dim");
    }
    if (baseline_raw[i] < lower[i] || baseline_raw[i] > upper[i]) {
      throw std::invalid_argument("SearchSpace: baseline outside bounds");
    }
  }
  for (int i : integer_dims) {
    if (i < 0 || i >= d) throw std::invalid_argument("SearchSpace: bad integer dim index");
  }
}

Eigen::VectorXd SearchSpace::baseline_normalized() const {
  return normalize(baseline_raw, *this);
}

SearchSpace SearchSpace::unit_cube(int d) {
  SearchSpace s;
  s.lower = Eigen::VectorXd::Zero(d);
  s.upper = Eigen::VectorXd::Ones(d);
  s.baseline_raw = Eigen::VectorXd::Zero(d);
  return s;
}

Eigen::VectorXd normalize(const Eigen::VectorXd& raw, const SearchSpace& space) {
  if (raw.size() != space.dims()) {
    throw std::invalid_argument("normalize: dimension mismatch");
  }
  const int d = space.dims();
  Eigen::VectorXd u(d);
  for (int i = 0; i < d; ++i) {
    if (raw[i] < space.lower[i] || raw[i] > space.upper[i]) {
      throw std::invalid_argument("normalize: point outside bounds");
    }
    u[i] = (raw[i] - space.lower[i]) / (space.upper[i] - space.lower[i]);
  }
  return u;
}

Eigen::VectorXd denormalize(const Eigen::VectorXd& unit, const SearchSpace& space) {
  if (unit.size() != space.dims()) {
    throw std::invalid_argument("denormalize: dimension mismatch");
  }
  const int d = space.dims();
  Eigen::VectorXd raw(d);
  for (int i = 0; i < d; ++i) {
    raw[i] = space.lower[i] + unit[i] * (space.upper[i] - space.lower[i]);
  }
  for (int i : space.integer_dims) {
    raw[i] = std::clamp(std::round(raw[i]), space.lower[i], space.upper[i]);
  }
  return raw;
}

std::vector<Eigen::VectorXd> sobol_init(const SearchSpace& space, int n,
                                        std::uint64_t seed) {
  if (n < 0) throw std::invalid_argument("sobol_init: n must be >= 0");
  if (n == 0) return {};
  SobolSampler sampler(space.dims(), seed);
  return sampler.draw(n);
}

void ObservationLog::append(Eigen::VectorXd x, double y, double xi) {
  Observation obs;
  obs.x = std::move(x);
  obs.y = y;
  obs.xi = xi;
  obs.trial = static_cast<int>(observations.size());
  observations.push_back(std::move(obs));
}

double ObservationLog::best_y() const {
  if (observations.empty()) throw std::runtime_error("ObservationLog: empty log");
  double best = observations.front().y;
  for (const auto& o : observations) best = std::max(best, o.y);
  return best;
}

nlohmann::json space_to_json(const SearchSpace& space) {
  nlohmann::json j;
  j["lower"] = std::vector<double>(space.lower.begin(), space.lower.end());
  j["upper"] = std::vector<double>(space.upper.begin(), space.upper.end());
  j["baseline_raw"] =
      std::vector<double>(space.baseline_raw.begin(), space.baseline_raw.end());
  j["integer_dims"] = std::vector<int>(space.integer_dims.begin(), space.integer_dims.end());
  return j;
}

SearchSpace space_from_json(const nlohmann::json& j) {
  SearchSpace s;
  auto lo = j.at("lower").get<std::vector<double>>();
  auto hi = j.at("upper").get<std::vector<double>>();
  auto base = j.at("baseline_raw").get<std::vector<double>>();
  s.lower = Eigen::Map<const Eigen::VectorXd>(lo.data(), lo.size());
  s.upper = Eigen::Map<const Eigen::VectorXd>(hi.data(), hi.size());
  s.baseline_raw = Eigen::Map<const Eigen::VectorXd>(base.data(), base.size());
  for (int i : j.value("integer_dims", std::vector<int>{})) s.integer_dims.insert(i);
  s.validate();
  return s;
}

nlohmann::json ObservationLog::to_json() const {
  nlohmann::json j;
  j["space"] = space_to_json(space);
  j["seed"] = seed;
  nlohmann::json arr = nlohmann::json::array();
  for (const auto& o : observations) {
    nlohmann::json jo;
    jo["trial"] = o.trial;
    jo["x"] = std::vector<double>(o.x.begin(), o.x.end());
    jo["y"] = o.y;
    jo["xi"] = o.xi;
    arr.push_back(std::move(jo));
  }
  j["observations"] = std::move(arr);
  return j;
}

ObservationLog ObservationLog::from_json(const nlohmann::json& j) {
  ObservationLog log;
  log.space = space_from_json(j.at("space"));
  log.seed = j.at("seed").get<std::uint64_t>();
  int expected_trial = 0;
  for (const auto& jo : j.at("observations")) {
    Observation o;
    auto xv = jo.at("x").get<std::vector<double>>();
    o.x = Eigen::Map<const Eigen::VectorXd>(xv.data(), xv.size());
    o.y = jo.at("y").get<double>();
    o.xi = jo.at("xi").get<double>();
    o.trial = jo.at("trial").get<int>();
    if (o.trial != expected_trial++) {
      throw std::runtime_error("ObservationLog: non-contiguous trial indices");
    }
    log.observations.push_back(std::move(o));
  }
  return log;
}

std::string ObservationLog::to_csv() const {
  const int d = space.dims();
  std::string out = "trial";
  char buf[80];
  for (int i = 0; i < d; ++i) {
    std::snprintf(buf, sizeof(buf), ",x_%d", i);
    out += buf;
  }
  out += ",y,xi\n";
  for (const auto& o : observations) {
    std::snprintf(buf, sizeof(buf), "%d", o.trial);
    out += buf;
    for (int i = 0; i < d; ++i) {
      std::snprintf(buf, sizeof(buf), ",%.17g", o.x[i]);
      out += buf;
    }
    std::snprintf(buf, sizeof(buf), ",%.17g,%.17g\n", o.y, o.xi);
    out += buf;
  }
  return out;
}

}  // namespace sparsebo
