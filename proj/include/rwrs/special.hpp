#pragma once

#include <cmath>
#include <cstdint>
#include <stdexcept>

namespace rwrs {

// Sum_{k >= m} k^{-s} for s > 1. Direct summation up to a comfortable start
// point, then Euler-Maclaurin with three correction terms; relative error is
// at machine-epsilon level for the s range used here (s in (1, 4]).
inline double power_tail_sum(double s, std::int64_t m) {
  if (s <= 1.0) throw std::domain_error("power_tail_sum requires s > 1");
  if (m < 1) m = 1;
  constexpr std::int64_t kStart = 64;
  double direct = 0.0;
  std::int64_t m0 = m;
  if (m0 < kStart) {
    for (std::int64_t k = kStart - 1; k >= m0; --k) direct += std::pow(static_cast<double>(k), -s);
    m0 = kStart;
  }
  const double md = static_cast<double>(m0);
  const double f = std::pow(md, -s);
  double tail = md * f / (s - 1.0);          // integral term m^{1-s}/(s-1)
  tail += 0.5 * f;
  tail += s * f / (12.0 * md);
  tail -= s * (s + 1.0) * (s + 2.0) * f / (720.0 * md * md * md);
  tail += s * (s + 1.0) * (s + 2.0) * (s + 3.0) * (s + 4.0) * f / (30240.0 * std::pow(md, 5));
  return direct + tail;
}

inline double riemann_zeta_gt1(double s) { return power_tail_sum(s, 1); }

inline double std_normal_pdf(double x) {
  return std::exp(-0.5 * x * x) * 0.3989422804014326779399461;
}

inline double std_normal_tail(double x) { return 0.5 * std::erfc(x * 0.7071067811865475244008444); }

inline double std_normal_cdf(double x) { return 0.5 * std::erfc(-x * 0.7071067811865475244008444); }

// Upper quantile: z such that P(Z > z) = p. Newton on the tail function from
// the classical asymptotic starting point.
inline double std_normal_quantile_upper(double p) {
  if (!(p > 0.0 && p < 1.0)) throw std::domain_error("tail probability outside (0,1)");
  if (p > 0.5) return -std_normal_quantile_upper(1.0 - p);
  double z = p > 1e-3 ? 0.0 : std::sqrt(-2.0 * std::log(p));
  for (int it = 0; it < 60; ++it) {
    const double err = std_normal_tail(z) - p;
    const double step = err / std_normal_pdf(z);
    z += step;
    if (std::abs(step) < 1e-15 * (1.0 + std::abs(z))) break;
  }
  return z;
}

// floor(n^{1/p}) computed exactly for integer n >= 0.
inline std::int64_t floor_root(std::int64_t n, int p) {
  if (n < 0 || p < 1) throw std::domain_error("floor_root domain");
  if (n == 0) return 0;
  auto pow_le = [p](std::int64_t r, std::int64_t bound) {
    std::int64_t acc = 1;
    for (int i = 0; i < p; ++i) {
      if (r != 0 && acc > bound / r) return false;
      acc *= r;
    }
    return acc <= bound;
  };
  std::int64_t r = static_cast<std::int64_t>(std::floor(std::pow(static_cast<double>(n), 1.0 / p)));
  while (r > 1 && !pow_le(r, n)) --r;
  while (pow_le(r + 1, n)) ++r;
  return r;
}

// 99th percentile of chi-square, df 1..16 (independence tests on small grids).
inline double chi2_critical_99(int df) {
  static constexpr double kTable[] = {6.635, 9.210,  11.345, 13.277, 15.086, 16.812, 18.475, 20.090,
                                      21.666, 23.209, 24.725, 26.217, 27.688, 29.141, 30.578, 32.000};
  if (df < 1 || df > 16) throw std::domain_error("chi2_critical_99 supports df in [1,16]");
  return kTable[df - 1];
}

}  // namespace rwrs
