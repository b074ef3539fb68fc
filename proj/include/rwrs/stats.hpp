#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <functional>
#include <span>
#include <stdexcept>
#include <vector>

#include "rwrs/special.hpp"

namespace rwrs {

// One-sample Kolmogorov-Smirnov statistic against a continuous CDF.
inline double ks_statistic(std::vector<double> samples, const std::function<double(double)>& cdf) {
  if (samples.empty()) throw std::invalid_argument("ks_statistic needs samples");
  std::sort(samples.begin(), samples.end());
  const double n = static_cast<double>(samples.size());
  double d = 0.0;
  for (std::size_t i = 0; i < samples.size(); ++i) {
    const double f = cdf(samples[i]);
    d = std::max(d, static_cast<double>(i + 1) / n - f);
    d = std::max(d, f - static_cast<double>(i) / n);
  }
  return d;
}

// Two-sample KS statistic.
inline double ks_two_sample(std::vector<double> a, std::vector<double> b) {
  if (a.empty() || b.empty()) throw std::invalid_argument("ks_two_sample needs samples");
  std::sort(a.begin(), a.end());
  std::sort(b.begin(), b.end());
  std::size_t i = 0, j = 0;
  double d = 0.0;
  while (i < a.size() && j < b.size()) {
    const double x = std::min(a[i], b[j]);
    while (i < a.size() && a[i] <= x) ++i;
    while (j < b.size() && b[j] <= x) ++j;
    d = std::max(d, std::abs(static_cast<double>(i) / static_cast<double>(a.size()) -
                             static_cast<double>(j) / static_cast<double>(b.size())));
  }
  return d;
}

// Asymptotic two-sample KS threshold at level alpha in {0.05, 0.01}.
inline double ks_two_sample_threshold(std::size_t n, std::size_t m, double alpha) {
  const double c = alpha <= 0.01 ? 1.628 : 1.358;
  return c * std::sqrt(static_cast<double>(n + m) / (static_cast<double>(n) * static_cast<double>(m)));
}

inline double pearson_correlation(std::span<const double> x, std::span<const double> y) {
  if (x.size() != y.size() || x.size() < 2) throw std::invalid_argument("pearson needs paired samples");
  const double n = static_cast<double>(x.size());
  double mx = 0.0, my = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    mx += x[i];
    my += y[i];
  }
  mx /= n;
  my /= n;
  double sxy = 0.0, sxx = 0.0, syy = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    sxy += (x[i] - mx) * (y[i] - my);
    sxx += (x[i] - mx) * (x[i] - mx);
    syy += (y[i] - my) * (y[i] - my);
  }
  if (sxx == 0.0 || syy == 0.0) return 0.0;
  return sxy / std::sqrt(sxx * syy);
}

struct ChiSquareResult {
  double statistic = 0.0;
  int df = 0;
  double critical_99 = 0.0;
  bool pass = true;
  bool degenerate = false;  // a coordinate had fewer than two usable bins
};

namespace detail {

// Empirical quantile bin edges with tie collapsing.
inline std::vector<double> quantile_edges(std::vector<double> v, int bins) {
  std::sort(v.begin(), v.end());
  std::vector<double> edges;
  for (int k = 1; k < bins; ++k) {
    const std::size_t idx = std::min(v.size() - 1, v.size() * static_cast<std::size_t>(k) / bins);
    edges.push_back(v[idx]);
  }
  edges.erase(std::unique(edges.begin(), edges.end()), edges.end());
  return edges;
}

inline int bin_of(double x, const std::vector<double>& edges) {
  int b = 0;
  for (double e : edges) {
    if (x > e) ++b;
  }
  return b;
}

}  // namespace detail

// Pearson chi-square independence test on a quantile grid (default 4x4).
// Degenerate coordinates (constant within resolution) make independence
// trivial; the result says so and passes with statistic 0.
inline ChiSquareResult chi_square_independence(std::span<const double> x, std::span<const double> y,
                                               int bins = 4) {
  if (x.size() != y.size() || x.size() < 16) {
    throw std::invalid_argument("chi_square_independence needs paired samples");
  }
  const auto ex = detail::quantile_edges(std::vector<double>(x.begin(), x.end()), bins);
  const auto ey = detail::quantile_edges(std::vector<double>(y.begin(), y.end()), bins);
  const int rows = static_cast<int>(ex.size()) + 1;
  const int cols = static_cast<int>(ey.size()) + 1;
  ChiSquareResult res;
  if (rows < 2 || cols < 2) {
    res.degenerate = true;
    return res;
  }
  std::vector<double> table(static_cast<std::size_t>(rows * cols), 0.0);
  for (std::size_t i = 0; i < x.size(); ++i) {
    const int r = detail::bin_of(x[i], ex);
    const int c = detail::bin_of(y[i], ey);
    table[static_cast<std::size_t>(r * cols + c)] += 1.0;
  }
  std::vector<double> rsum(static_cast<std::size_t>(rows), 0.0);
  std::vector<double> csum(static_cast<std::size_t>(cols), 0.0);
  for (int r = 0; r < rows; ++r) {
    for (int c = 0; c < cols; ++c) {
      rsum[r] += table[static_cast<std::size_t>(r * cols + c)];
      csum[c] += table[static_cast<std::size_t>(r * cols + c)];
    }
  }
  const double total = static_cast<double>(x.size());
  double stat = 0.0;
  for (int r = 0; r < rows; ++r) {
    for (int c = 0; c < cols; ++c) {
      const double expected = rsum[r] * csum[c] / total;
      if (expected > 0.0) {
        const double diff = table[static_cast<std::size_t>(r * cols + c)] - expected;
        stat += diff * diff / expected;
      }
    }
  }
  res.statistic = stat;
  res.df = (rows - 1) * (cols - 1);
  res.critical_99 = chi2_critical_99(res.df);
  res.pass = stat <= res.critical_99;
  return res;
}

// Variance-to-mean ratio of count data.
inline double dispersion_index(std::span<const double> counts) {
  if (counts.size() < 2) throw std::invalid_argument("dispersion_index needs samples");
  double mean = 0.0;
  for (double c : counts) mean += c;
  mean /= static_cast<double>(counts.size());
  if (mean == 0.0) return 0.0;
  double var = 0.0;
  for (double c : counts) var += (c - mean) * (c - mean);
  var /= static_cast<double>(counts.size() - 1);
  return var / mean;
}

}  // namespace rwrs
