#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <limits>
#include <stdexcept>
#include <string>
#include <vector>

#include "rwrs/norming.hpp"
#include "rwrs/scenery.hpp"
#include "rwrs/walk.hpp"

namespace rwrs {

// Half-open value interval (lo, hi]; hi may be +infinity.
struct ValueInterval {
  double lo = 0.0;
  double hi = std::numeric_limits<double>::infinity();

  bool contains(double v) const { return v > lo && v <= hi; }
};

// Product box I = (t_lo, t_hi] x union of disjoint value intervals.
struct Box {
  double t_lo = 0.0;
  double t_hi = 1.0;
  std::vector<ValueInterval> values;

  bool contains(double t, double v) const {
    if (!(t > t_lo && t <= t_hi)) return false;
    for (const auto& iv : values) {
      if (iv.contains(v)) return true;
    }
    return false;
  }

  void validate() const {
    if (!(t_lo >= 0.0 && t_lo < t_hi && t_hi <= 1.0)) {
      throw std::invalid_argument("box time interval must satisfy 0 <= a < b <= 1");
    }
    if (values.empty()) throw std::invalid_argument("box needs at least one value interval");
    auto sorted = values;
    std::sort(sorted.begin(), sorted.end(),
              [](const ValueInterval& a, const ValueInterval& b) { return a.lo < b.lo; });
    for (std::size_t i = 0; i < sorted.size(); ++i) {
      if (!(sorted[i].lo < sorted[i].hi)) throw std::invalid_argument("empty value interval in box");
      if (i + 1 < sorted.size() && sorted[i].hi > sorted[i + 1].lo) {
        throw std::invalid_argument("box value intervals overlap");
      }
    }
  }

  double intensity(const TailMeasure& m) const {
    double nu = 0.0;
    for (const auto& iv : values) nu += nu_interval(m, iv.lo, iv.hi);
    const double total = (t_hi - t_lo) * nu;
    if (!std::isfinite(total)) throw std::invalid_argument("box has non-finite intensity");
    return total;
  }
};

// Rescaled exceedance pattern: one point (tau_k / n, normalized mark) per
// first visit. Marks are stored unclipped; boxes do the filtering.
struct PointPattern {
  std::int64_t n = 0;
  std::int64_t m_n = 0;
  std::vector<std::pair<double, double>> points;  // (t, v), t strictly increasing
};

inline PointPattern build_pattern(const WalkSummary& walk, const ScenerySpec& spec, double q_hat,
                                  std::int64_t n) {
  if (!(q_hat > 0.0 && q_hat <= 1.0)) throw std::invalid_argument("q_hat must lie in (0,1]");
  if (walk.n != n) throw std::invalid_argument("walk horizon does not match pattern horizon");
  const auto m_n = static_cast<std::int64_t>(std::floor(q_hat * static_cast<double>(n)));
  if (m_n < 2) throw std::invalid_argument("scaling too small");
  const Norming nm = norming(spec, m_n);
  PointPattern p;
  p.n = n;
  p.m_n = m_n;
  p.points.reserve(walk.tau.size());
  for (std::size_t k = 0; k < walk.tau.size(); ++k) {
    const double t = static_cast<double>(walk.tau[k]) / static_cast<double>(n);
    const double v = (scenery_value(spec, walk.first_visit_sites[k]) - nm.b) / nm.a;
    p.points.emplace_back(t, v);
  }
  return p;
}

inline std::int64_t count_in_box(const PointPattern& pattern, const Box& box) {
  std::int64_t c = 0;
  for (const auto& [t, v] : pattern.points) {
    if (box.contains(t, v)) ++c;
  }
  return c;
}

// Max of the scenery over the visited sites (revisits add nothing).
inline double path_max(const WalkSummary& walk, const ScenerySpec& spec) {
  double m = -std::numeric_limits<double>::infinity();
  for (std::int64_t site : walk.first_visit_sites) {
    m = std::max(m, scenery_value(spec, site));
  }
  return m;
}

}  // namespace rwrs
