#pragma once

#include <cstdint>
#include <stdexcept>
#include <unordered_set>
#include <vector>

#include "rwrs/montecarlo.hpp"
#include "rwrs/rng.hpp"
#include "rwrs/step_law.hpp"

namespace rwrs {

// Per-path record: visit times tau_k, the sites visited at those times, and
// the running range R_1..R_n. Positions are kept only when a consumer needs
// the full time series (memory-gated).
struct WalkSummary {
  std::int64_t n = 0;
  std::vector<std::int64_t> tau;
  std::vector<std::int64_t> first_visit_sites;
  std::vector<std::int64_t> range;
  std::vector<std::int64_t> positions;

  std::int64_t range_total() const { return static_cast<std::int64_t>(tau.size()); }
};

struct WalkOptions {
  bool keep_range = true;
  bool keep_positions = false;
};

namespace detail {

inline std::int64_t checked_advance(std::int64_t pos, std::int64_t step) {
  std::int64_t next = 0;
  if (__builtin_add_overflow(pos, step, &next) || next == INT64_MIN) {
    throw std::overflow_error("position overflow");
  }
  return next;
}

}  // namespace detail

// Law needs: int64_t sample(const RngStream&, uint64_t counter) const.
template <typename Law>
WalkSummary generate_walk_with(const Law& law, std::int64_t n, const RngKey& key,
                               const WalkOptions& opt = {}) {
  if (n < 1) throw std::invalid_argument("walk horizon must be >= 1");
  const RngStream steps(RngKey{key.master_seed, key.stream_id, kRoleStep});
  WalkSummary w;
  w.n = n;
  w.tau.reserve(64);
  w.first_visit_sites.reserve(64);
  if (opt.keep_range) w.range.resize(static_cast<std::size_t>(n));
  if (opt.keep_positions) w.positions.resize(static_cast<std::size_t>(n));
  std::unordered_set<std::int64_t> visited;
  visited.reserve(static_cast<std::size_t>(std::min<std::int64_t>(n, 1 << 20)) * 2);
  std::int64_t pos = 0;
  for (std::int64_t t = 1; t <= n; ++t) {
    pos = detail::checked_advance(pos, law.sample(steps, static_cast<std::uint64_t>(t)));
    if (visited.insert(pos).second) {
      w.tau.push_back(t);
      w.first_visit_sites.push_back(pos);
    }
    if (opt.keep_range) w.range[static_cast<std::size_t>(t - 1)] = static_cast<std::int64_t>(visited.size());
    if (opt.keep_positions) w.positions[static_cast<std::size_t>(t - 1)] = pos;
  }
  return w;
}

inline WalkSummary generate_walk(const StepLaw& law, std::int64_t n, const RngKey& key,
                                 const WalkOptions& opt = {}) {
  return generate_walk_with(law, n, key, opt);
}

struct EscapeReport {
  McEstimate estimate;          // std_err already includes the truncation bias
  double binomial_std_err = 0;  // sampling error alone
  double truncation_bias = 0;   // extrapolated sum_{k>horizon} P(S_k = 0)
};

namespace detail {

struct EscapePathStats {
  double survived = 0;     // 1 if S_k != 0 for all k <= horizon
  double window_zeros = 0; // number of zeros among k in (horizon/2, horizon]
};

template <typename Law>
EscapePathStats escape_path(const Law& law, std::int64_t horizon, const RngKey& key) {
  const RngStream steps(RngKey{key.master_seed, key.stream_id, kRoleStep});
  EscapePathStats st;
  st.survived = 1.0;
  const std::int64_t window_lo = horizon / 2;
  std::int64_t pos = 0;
  for (std::int64_t t = 1; t <= horizon; ++t) {
    pos = checked_advance(pos, law.sample(steps, static_cast<std::uint64_t>(t)));
    if (pos == 0) {
      st.survived = 0.0;
      if (t > window_lo) st.window_zeros += 1.0;
    }
  }
  return st;
}

}  // namespace detail

// Fraction of paths with S_k != 0 for all k <= horizon. Upward-biased for q;
// the report carries a tail-extrapolated bias bound which is folded into the
// returned std_err as an additive term. `bias_exponent` is 1/alpha for stable
// increments; pass 0 to skip the extrapolation (unit law, test-only laws).
template <typename Law>
EscapeReport estimate_escape_probability_with(const Law& law, std::int64_t horizon,
                                              std::int64_t reps, const RngKey& key,
                                              double bias_exponent, int threads = 1) {
  if (horizon < 1) throw std::invalid_argument("horizon must be >= 1");
  if (reps < 2) throw std::invalid_argument("insufficient replications");
  auto stats = parallel_replications(reps, threads, [&](std::int64_t r) {
    return detail::escape_path(law, horizon,
                               RngKey{key.master_seed, key.stream_id + static_cast<std::uint64_t>(r), 0});
  });
  std::vector<double> survived(stats.size());
  CompensatedSum window;
  for (std::size_t i = 0; i < stats.size(); ++i) {
    survived[i] = stats[i].survived;
    window.add(stats[i].window_zeros);
  }
  EscapeReport rep;
  rep.estimate = aggregate(survived);
  rep.binomial_std_err = rep.estimate.std_err;
  if (bias_exponent > 1.0) {
    const double window_mass = window.value() / static_cast<double>(reps);
    if (window_mass > 0.0) {
      const double tail_beyond = power_tail_sum(bias_exponent, horizon + 1);
      const double tail_window =
          power_tail_sum(bias_exponent, horizon / 2 + 1) - tail_beyond;
      rep.truncation_bias = window_mass * tail_beyond / tail_window;
    }
  }
  rep.estimate.std_err += rep.truncation_bias;
  return rep;
}

inline EscapeReport estimate_escape_probability(const StepLaw& law, std::int64_t horizon,
                                                std::int64_t reps, const RngKey& key,
                                                int threads = 1) {
  const double exponent = law.is_zipf() ? 1.0 / law.alpha() : 0.0;
  return estimate_escape_probability_with(law, horizon, reps, key, exponent, threads);
}

// Monte Carlo estimate of sum_{k<=horizon} P(S_k = 0): the expected number of
// zeros along the path.
template <typename Law>
McEstimate estimate_return_mass_with(const Law& law, std::int64_t horizon, std::int64_t reps,
                                     const RngKey& key, int threads = 1) {
  if (horizon < 1) throw std::invalid_argument("horizon must be >= 1");
  if (reps < 2) throw std::invalid_argument("insufficient replications");
  auto zeros = parallel_replications(reps, threads, [&](std::int64_t r) {
    const RngStream steps(
        RngKey{key.master_seed, key.stream_id + static_cast<std::uint64_t>(r), kRoleStep});
    std::int64_t pos = 0;
    double count = 0.0;
    for (std::int64_t t = 1; t <= horizon; ++t) {
      pos = detail::checked_advance(pos, law.sample(steps, static_cast<std::uint64_t>(t)));
      if (pos == 0) count += 1.0;
    }
    return count;
  });
  return aggregate(zeros);
}

inline McEstimate estimate_return_mass(const StepLaw& law, std::int64_t horizon,
                                       std::int64_t reps, const RngKey& key, int threads = 1) {
  return estimate_return_mass_with(law, horizon, reps, key, threads);
}

// Mean of R_n / n over replications; the range-slope route to q.
template <typename Law>
McEstimate estimate_range_slope_with(const Law& law, std::int64_t n, std::int64_t reps,
                                     const RngKey& key, int threads = 1) {
  if (n < 1) throw std::invalid_argument("walk horizon must be >= 1");
  if (reps < 2) throw std::invalid_argument("insufficient replications");
  auto slopes = parallel_replications(reps, threads, [&](std::int64_t r) {
    const RngStream steps(
        RngKey{key.master_seed, key.stream_id + static_cast<std::uint64_t>(r), kRoleStep});
    std::unordered_set<std::int64_t> visited;
    visited.reserve(static_cast<std::size_t>(n));
    std::int64_t pos = 0;
    for (std::int64_t t = 1; t <= n; ++t) {
      pos = detail::checked_advance(pos, law.sample(steps, static_cast<std::uint64_t>(t)));
      visited.insert(pos);
    }
    return static_cast<double>(visited.size()) / static_cast<double>(n);
  });
  return aggregate(slopes);
}

inline McEstimate estimate_range_slope(const StepLaw& law, std::int64_t n, std::int64_t reps,
                                       const RngKey& key, int threads = 1) {
  return estimate_range_slope_with(law, n, reps, key, threads);
}

}  // namespace rwrs
