#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <memory>
#include <stdexcept>
#include <vector>

#include "rwrs/montecarlo.hpp"
#include "rwrs/rng.hpp"
#include "rwrs/special.hpp"

namespace rwrs {

enum class StepFamily { symmetric_zipf, deterministic_unit };

namespace detail {

// Magnitude law P(|X| = k) = k^{-(1+alpha)} / zeta(1+alpha), sampled by exact
// inversion on a cumulative table up to `cutoff` and, past the cutoff, by
// rejection from the continuous Pareto envelope with matching tail exponent.
struct ZipfTable {
  double alpha = 0.0;
  double s = 0.0;  // 1 + alpha
  std::int64_t cutoff = 0;
  double zeta = 0.0;        // zeta(s)
  double table_mass = 0.0;  // unnormalized mass of magnitudes <= cutoff
  double envelope_adjust = 0.0;
  std::vector<double> cum;  // cum[k-1] = sum_{j<=k} j^{-s}

  ZipfTable(double a, std::int64_t n) : alpha(a), s(1.0 + a), cutoff(n) {
    cum.resize(static_cast<std::size_t>(n));
    CompensatedSum acc;
    for (std::int64_t k = 1; k <= n; ++k) {
      acc.add(std::pow(static_cast<double>(k), -s));
      cum[static_cast<std::size_t>(k - 1)] = acc.value();
    }
    table_mass = acc.value();
    zeta = table_mass + power_tail_sum(s, n + 1);
    const double A = static_cast<double>(n + 1);
    envelope_adjust = std::pow(A / (A + 1.0), s);
  }

  std::int64_t sample_magnitude(const RngStream& draws) const {
    const double target = draws.uniform_open(0) * zeta;
    if (target <= table_mass) {
      const auto it = std::lower_bound(cum.begin(), cum.end(), target);
      return static_cast<std::int64_t>(it - cum.begin()) + 1;
    }
    const double A = static_cast<double>(cutoff + 1);
    for (std::uint64_t t = 0;; ++t) {
      const double uy = draws.uniform_open(1 + 2 * t);
      const double y = A * std::pow(uy, -1.0 / alpha);
      if (!(y < 9.0e18)) throw std::overflow_error("position overflow");
      const auto k = static_cast<std::int64_t>(y);
      const double kd = static_cast<double>(k);
      // k^{-a} - (k+1)^{-a} = k^{-a} * (-expm1(-a*log1p(1/k))), cancellation-free.
      const double accept =
          alpha * envelope_adjust / (kd * -std::expm1(-alpha * std::log1p(1.0 / kd)));
      if (draws.uniform(2 + 2 * t) < accept) return k;
    }
  }
};

}  // namespace detail

// Increment distribution of the walk.
class StepLaw {
 public:
  static StepLaw symmetric_zipf(double alpha, std::int64_t tail_cutoff = std::int64_t{1} << 16) {
    if (!(alpha > 0.0 && alpha < 1.0)) throw std::invalid_argument("zipf alpha must lie in (0,1)");
    if (tail_cutoff < 2) throw std::invalid_argument("tail_cutoff too small");
    StepLaw law;
    law.family_ = StepFamily::symmetric_zipf;
    law.table_ = std::make_shared<const detail::ZipfTable>(alpha, tail_cutoff);
    return law;
  }

  static StepLaw deterministic_unit() {
    StepLaw law;
    law.family_ = StepFamily::deterministic_unit;
    return law;
  }

  StepFamily family() const { return family_; }
  bool is_zipf() const { return family_ == StepFamily::symmetric_zipf; }
  double alpha() const { return table_ ? table_->alpha : 0.0; }
  std::int64_t tail_cutoff() const { return table_ ? table_->cutoff : 0; }

  std::int64_t sample(const RngStream& stream, std::uint64_t counter) const {
    if (family_ == StepFamily::deterministic_unit) return 1;
    const RngStream draws = stream.child(counter);
    const std::int64_t mag = table_->sample_magnitude(draws.child(0));
    return draws.uniform(1) < 0.5 ? -mag : mag;
  }

  // P(X = k), exact.
  double step_mass(std::int64_t k) const {
    if (family_ == StepFamily::deterministic_unit) return k == 1 ? 1.0 : 0.0;
    if (k == 0) return 0.0;
    const double kd = std::abs(static_cast<double>(k));
    return 0.5 * std::pow(kd, -table_->s) / table_->zeta;
  }

  // P(|X| > m), exact up to the quadrature of the zeta tail.
  double magnitude_tail(std::int64_t m) const {
    if (family_ == StepFamily::deterministic_unit) return m >= 1 ? 0.0 : 1.0;
    if (m < 1) return 1.0;
    return power_tail_sum(table_->s, m + 1) / table_->zeta;
  }

  double normalization() const { return table_ ? table_->zeta : 1.0; }

 private:
  StepFamily family_ = StepFamily::deterministic_unit;
  std::shared_ptr<const detail::ZipfTable> table_;
};

inline std::int64_t sample_step(const StepLaw& law, const RngKey& key, std::uint64_t counter) {
  return law.sample(RngStream(key), counter);
}

}  // namespace rwrs
