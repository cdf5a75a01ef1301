#include "sparsebo/hypervolume.hpp"

#include <algorithm>
#include <limits>
#include <cstdio>

namespace sparsebo {

Frontier Frontier::build(std::vector<std::pair<double, double>> raw,
                         std::pair<double, double> ref,
                         std::vector<std::string>* warnings) {
  Frontier f;
  f.ref = ref;
  std::vector<std::pair<double, double>> kept;
  for (const auto& p : raw) {
    if (p.first <= ref.first || p.second <= ref.second) {
      if (warnings) {
        char buf[128];
        std::snprintf(buf, sizeof(buf),
                      "frontier point (%g, %g) does not dominate the reference; dropped",
                      p.first, p.second);
        warnings->push_back(buf);
      }
      continue;
    }
    kept.push_back(p);
  }
  // sort by first coordinate descending, second descending as tiebreak
  std::sort(kept.begin(), kept.end(), [](const auto& a, const auto& b) {
    if (a.first != b.first) return a.first > b.first;
    return a.second > b.second;
  });
  double best_second = -std::numeric_limits<double>::infinity();
  for (const auto& p : kept) {
    if (p.second > best_second) {  // not dominated by anything with larger first
      f.points.push_back(p);
      best_second = p.second;
    }
  }
  return f;
}

double hypervolume_2d(const Frontier& frontier) {
  // points sorted by f descending, s ascending: sweep strips in s
  double area = 0.0;
  double s_prev = frontier.ref.second;
  for (const auto& p : frontier.points) {
    area += (p.first - frontier.ref.first) * (p.second - s_prev);
    s_prev = p.second;
  }
  return area;
}

double hvi_2d(const Frontier& frontier, double u, double v, double* du, double* dv) {
  if (du) *du = 0.0;
  if (dv) *dv = 0.0;
  const double rf = frontier.ref.first;
  const double rs = frontier.ref.second;
  if (u <= rf || v <= rs) return 0.0;

  // Attainment A(s): best frontier f among points with s_i >= s (-inf if none).
  // Piecewise constant, decreasing in s with breakpoints at the points'
  // second coordinates. Integrate (u - max(A(s), rf))_+ over s in (rs, v].
  double area = 0.0;
  double width_u = 0.0;  // measure of s where the integrand is u - (boundary)
  double s_lo = rs;
  const auto& pts = frontier.points;
  const int k = static_cast<int>(pts.size());
  for (int i = 0; i <= k; ++i) {
    // on (s_lo, s_hi] the attainment is f_i (or rf past the last point)
    double a = i < k ? std::max(pts[i].first, rf) : rf;
    double s_hi = i < k ? pts[i].second : v;
    s_hi = std::min(s_hi, v);
    if (s_hi > s_lo && u > a) {
      area += (u - a) * (s_hi - s_lo);
      width_u += s_hi - s_lo;
    }
    if (i < k && pts[i].second >= v) break;
    if (i < k) s_lo = std::max(s_lo, std::min(pts[i].second, v));
  }
  if (du) *du = width_u;
  if (dv) {
    // attainment at s = v
    double a_at_v = rf;
    for (const auto& p : pts) {
      if (p.second >= v) {
        a_at_v = std::max(a_at_v, p.first);
        break;  // sorted f descending; the first with s >= v has the largest f
      }
    }
    *dv = std::max(u - a_at_v, 0.0);
  }
  return area;
}

}  // namespace sparsebo
