#pragma once

#include <cmath>
#include <cstdint>
#include <stdexcept>

#include "rwrs/scenery.hpp"
#include "rwrs/special.hpp"

namespace rwrs {

// Affine threshold u_n(x) = a_n x + b_n for one scenery family at one n.
struct Norming {
  double a = 1.0;
  double b = 0.0;
  std::int64_t n = 0;
  SceneryFamily family = SceneryFamily::iid_frechet;

  double u(double x) const { return a * x + b; }
};

inline Norming norming(const ScenerySpec& spec, std::int64_t n) {
  if (n < 2) throw std::invalid_argument("norming requires n >= 2");
  Norming nm;
  nm.n = n;
  nm.family = spec.family();
  const double nd = static_cast<double>(n);
  switch (spec.family()) {
    case SceneryFamily::iid_frechet:
      nm.a = std::pow(nd, 1.0 / spec.beta());
      nm.b = 0.0;
      return nm;
    case SceneryFamily::moving_max:
      // the window multiplies the effective sample count, absorb it into a_n
      nm.a = std::pow(static_cast<double>(spec.window()) * nd, 1.0 / spec.beta());
      nm.b = 0.0;
      return nm;
    case SceneryFamily::iid_exponential:
      nm.a = 1.0;
      nm.b = std::log(nd);
      return nm;
    case SceneryFamily::iid_neg_pow:
      nm.a = std::pow(nd, -1.0 / spec.delta());
      nm.b = 0.0;
      return nm;
    case SceneryFamily::gaussian_ma:
      // Quantile norming: b_n solves n * P(Z > b_n) = 1, a_n = 1/(n phi(b_n)).
      // Second-order accurate where the textbook (2 log n)^{1/2} constants
      // still carry O(1/log n) error at desk-scale n.
      nm.b = std_normal_quantile_upper(1.0 / nd);
      nm.a = 1.0 / (nd * std_normal_pdf(nm.b));
      return nm;
  }
  throw std::invalid_argument("unsupported scenery family");
}

// Limiting tail measure nu(x, inf) in its three Gnedenko forms.
struct TailMeasure {
  enum class Kind { frechet, weibull, gumbel };
  Kind kind = Kind::frechet;
  double shape = 1.0;  // beta for frechet, delta for weibull
};

inline TailMeasure tail_measure_for(const ScenerySpec& spec) {
  switch (spec.family()) {
    case SceneryFamily::iid_frechet:
    case SceneryFamily::moving_max:
      return {TailMeasure::Kind::frechet, spec.beta()};
    case SceneryFamily::iid_exponential:
      return {TailMeasure::Kind::gumbel, 0.0};
    case SceneryFamily::iid_neg_pow:
      return {TailMeasure::Kind::weibull, spec.delta()};
    case SceneryFamily::gaussian_ma:
      return {TailMeasure::Kind::gumbel, 0.0};
  }
  throw std::logic_error("unknown scenery family");
}

inline bool in_extreme_value_domain(const TailMeasure& m, double x) {
  switch (m.kind) {
    case TailMeasure::Kind::frechet: return x > 0.0;
    case TailMeasure::Kind::weibull: return x <= 0.0;
    case TailMeasure::Kind::gumbel: return true;
  }
  return false;
}

inline double nu_tail(const TailMeasure& m, double x) {
  if (!in_extreme_value_domain(m, x)) throw std::domain_error("outside extreme-value domain");
  switch (m.kind) {
    case TailMeasure::Kind::frechet: return std::pow(x, -m.shape);
    case TailMeasure::Kind::weibull: return std::pow(-x, m.shape);
    case TailMeasure::Kind::gumbel: return std::exp(-x);
  }
  throw std::logic_error("unknown tail measure kind");
}

// nu((lo, hi]); hi may be +infinity.
inline double nu_interval(const TailMeasure& m, double lo, double hi) {
  if (!(lo < hi)) throw std::invalid_argument("interval must satisfy lo < hi");
  const double upper = std::isinf(hi) ? 0.0 : nu_tail(m, hi);
  return nu_tail(m, lo) - upper;
}

// Diagnostic: n * P(xi > u_n(x)), the finite-n quantity converging to
// nu(x, inf).
inline double verify_tail_convergence(const ScenerySpec& spec, std::int64_t n, double x) {
  const Norming nm = norming(spec, n);
  return static_cast<double>(n) * marginal_tail(spec, nm.u(x));
}

}  // namespace rwrs
