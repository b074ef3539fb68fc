#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <numeric>
#include <stdexcept>
#include <vector>

#include "rwrs/montecarlo.hpp"
#include "rwrs/rng.hpp"
#include "rwrs/special.hpp"

namespace rwrs {

enum class SceneryFamily {
  iid_frechet,
  iid_exponential,
  iid_neg_pow,
  moving_max,
  gaussian_ma,
};

inline const char* family_name(SceneryFamily f) {
  switch (f) {
    case SceneryFamily::iid_frechet: return "frechet";
    case SceneryFamily::iid_exponential: return "exponential";
    case SceneryFamily::iid_neg_pow: return "negpow";
    case SceneryFamily::moving_max: return "moving_max";
    case SceneryFamily::gaussian_ma: return "gaussian_ma";
  }
  return "?";
}

// Stationary scenery, evaluated lazily at arbitrary integer sites through
// counter-based innovations. Strict stationarity holds by construction: the
// value at site s reads innovations at s, s+1, ... only through their site
// index. MovingMax deliberately violates D'(u_n) and serves as the negative
// control.
class ScenerySpec {
 public:
  static ScenerySpec iid_frechet(double beta, const RngKey& binding) {
    if (!(beta > 0.0)) throw std::invalid_argument("frechet beta must be positive");
    ScenerySpec s(SceneryFamily::iid_frechet, binding);
    s.beta_ = beta;
    return s;
  }
  static ScenerySpec iid_exponential(const RngKey& binding) {
    return ScenerySpec(SceneryFamily::iid_exponential, binding);
  }
  static ScenerySpec iid_neg_pow(double delta, const RngKey& binding) {
    if (!(delta > 0.0)) throw std::invalid_argument("negpow delta must be positive");
    ScenerySpec s(SceneryFamily::iid_neg_pow, binding);
    s.delta_ = delta;
    return s;
  }
  static ScenerySpec moving_max(int window, const RngKey& binding, double beta = 1.0) {
    if (window < 2) throw std::invalid_argument("moving_max window must be >= 2");
    if (!(beta > 0.0)) throw std::invalid_argument("frechet beta must be positive");
    ScenerySpec s(SceneryFamily::moving_max, binding);
    s.window_ = window;
    s.beta_ = beta;
    return s;
  }
  static ScenerySpec gaussian_ma(std::vector<double> weights, const RngKey& binding) {
    if (weights.empty()) throw std::invalid_argument("gaussian_ma needs at least one weight");
    double norm2 = 0.0;
    for (double w : weights) norm2 += w * w;
    if (!(norm2 > 0.0)) throw std::invalid_argument("gaussian_ma weights must not all vanish");
    const double inv = 1.0 / std::sqrt(norm2);
    for (double& w : weights) w *= inv;  // unit l2 norm => standard normal marginal
    ScenerySpec s(SceneryFamily::gaussian_ma, binding);
    s.weights_ = std::move(weights);
    return s;
  }

  ScenerySpec with_seed(const RngKey& binding) const {
    ScenerySpec s = *this;
    s.binding_ = binding;
    s.root_ = derive_stream_base(binding);
    return s;
  }

  SceneryFamily family() const { return family_; }
  double beta() const { return beta_; }
  double delta() const { return delta_; }
  int window() const { return window_; }
  const std::vector<double>& weights() const { return weights_; }
  const RngKey& seed_binding() const { return binding_; }

  // Length of the dependence window: values at sites s, t with |s-t| >= this
  // are independent.
  std::int64_t dependence_range() const {
    switch (family_) {
      case SceneryFamily::moving_max: return window_;
      case SceneryFamily::gaussian_ma: return static_cast<std::int64_t>(weights_.size());
      default: return 1;
    }
  }

  RngStream site_stream(std::int64_t site) const {
    return RngStream(RngKey{root_, static_cast<std::uint64_t>(site), kRoleInnovation});
  }

  double frechet_innovation(std::int64_t site) const {
    const double u = site_stream(site).uniform_open(0);
    return beta_ == 1.0 ? -1.0 / std::log(u) : std::pow(-std::log(u), -1.0 / beta_);
  }

  double normal_innovation(std::int64_t site) const { return site_stream(site).normal(0); }

 private:
  ScenerySpec(SceneryFamily f, const RngKey& binding)
      : family_(f), binding_(binding), root_(derive_stream_base(binding)) {}

  SceneryFamily family_;
  double beta_ = 1.0;
  double delta_ = 1.0;
  int window_ = 2;
  std::vector<double> weights_;
  RngKey binding_;
  std::uint64_t root_ = 0;
};

inline double scenery_value(const ScenerySpec& spec, std::int64_t site) {
  switch (spec.family()) {
    case SceneryFamily::iid_frechet:
      return spec.frechet_innovation(site);
    case SceneryFamily::iid_exponential:
      return -std::log(spec.site_stream(site).uniform_open(0));
    case SceneryFamily::iid_neg_pow:
      return -std::pow(spec.site_stream(site).uniform_open(0), 1.0 / spec.delta());
    case SceneryFamily::moving_max: {
      double m = spec.frechet_innovation(site);
      for (int j = 1; j < spec.window(); ++j) m = std::max(m, spec.frechet_innovation(site + j));
      return m;
    }
    case SceneryFamily::gaussian_ma: {
      const auto& w = spec.weights();
      double v = 0.0;
      for (std::size_t j = 0; j < w.size(); ++j) {
        v += w[j] * spec.normal_innovation(site + static_cast<std::int64_t>(j));
      }
      return v;
    }
  }
  throw std::logic_error("unknown scenery family");
}

// Exact marginal tail P(xi > u).
inline double marginal_tail(const ScenerySpec& spec, double u) {
  switch (spec.family()) {
    case SceneryFamily::iid_frechet:
      if (u <= 0.0) return 1.0;
      return -std::expm1(-std::pow(u, -spec.beta()));
    case SceneryFamily::iid_exponential:
      if (u <= 0.0) return 1.0;
      return std::exp(-u);
    case SceneryFamily::iid_neg_pow: {
      if (u >= 0.0) return 0.0;
      if (u <= -1.0) return 1.0;
      return std::pow(-u, spec.delta());
    }
    case SceneryFamily::moving_max:
      if (u <= 0.0) return 1.0;
      return -std::expm1(-static_cast<double>(spec.window()) * std::pow(u, -spec.beta()));
    case SceneryFamily::gaussian_ma:
      return std_normal_tail(u);
  }
  throw std::logic_error("unknown scenery family");
}

struct JointTail {
  double value = 0.0;
  double std_err = 0.0;  // zero when the joint tail is analytic
};

struct JointMcOptions {
  std::int64_t reps = 200000;
  RngKey key{0x9d1c03a75f1a2b4cULL, 0, kRoleInnerMc};
};

// P(xi(0) > u, xi(lag) > u). Analytic for the i.i.d. families and MovingMax;
// Monte Carlo over innovations for GaussianMA at lags inside the window.
inline JointTail joint_exceedance(const ScenerySpec& spec, std::int64_t lag, double u,
                                  const JointMcOptions& opt = {}) {
  if (lag < 1) throw std::invalid_argument("lag must be >= 1");
  const double tail = marginal_tail(spec, u);
  switch (spec.family()) {
    case SceneryFamily::iid_frechet:
    case SceneryFamily::iid_exponential:
    case SceneryFamily::iid_neg_pow:
      return {tail * tail, 0.0};
    case SceneryFamily::moving_max: {
      const std::int64_t m = spec.window();
      if (lag >= m) return {tail * tail, 0.0};
      if (u <= 0.0) return {1.0, 0.0};
      const double up = std::pow(u, -spec.beta());
      const double both_below = std::exp(-static_cast<double>(m + lag) * up);
      const double one_below = std::exp(-static_cast<double>(m) * up);
      return {1.0 - 2.0 * one_below + both_below, 0.0};
    }
    case SceneryFamily::gaussian_ma: {
      const auto& w = spec.weights();
      const auto len = static_cast<std::int64_t>(w.size());
      if (lag >= len) return {tail * tail, 0.0};
      const RngStream draws(opt.key);
      std::vector<double> innov(static_cast<std::size_t>(len + lag));
      std::int64_t hits = 0;
      for (std::int64_t r = 0; r < opt.reps; ++r) {
        const RngStream rep = draws.child(static_cast<std::uint64_t>(r));
        for (std::size_t j = 0; j < innov.size(); ++j) innov[j] = rep.normal(j);
        double a = 0.0, b = 0.0;
        for (std::size_t j = 0; j < w.size(); ++j) {
          a += w[j] * innov[j];
          b += w[j] * innov[j + static_cast<std::size_t>(lag)];
        }
        if (a > u && b > u) ++hits;
      }
      const double p = static_cast<double>(hits) / static_cast<double>(opt.reps);
      const double se = std::sqrt(std::max(p * (1.0 - p), 0.0) / static_cast<double>(opt.reps));
      return {p, se};
    }
  }
  throw std::logic_error("unknown scenery family");
}

}  // namespace rwrs
