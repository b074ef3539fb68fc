#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <span>
#include <stdexcept>
#include <unordered_map>
#include <unordered_set>
#include <vector>

#include "rwrs/blocks.hpp"
#include "rwrs/montecarlo.hpp"
#include "rwrs/norming.hpp"
#include "rwrs/point_process.hpp"
#include "rwrs/scenery.hpp"
#include "rwrs/stats.hpp"
#include "rwrs/step_law.hpp"
#include "rwrs/walk.hpp"

namespace rwrs {

namespace detail {

template <typename Law>
std::vector<std::int64_t> walk_prefix(const Law& law, std::int64_t len, const RngKey& key) {
  const RngStream steps(RngKey{key.master_seed, key.stream_id, kRoleStep});
  std::vector<std::int64_t> pos(static_cast<std::size_t>(len));
  std::int64_t p = 0;
  for (std::int64_t t = 1; t <= len; ++t) {
    p = checked_advance(p, law.sample(steps, static_cast<std::uint64_t>(t)));
    pos[static_cast<std::size_t>(t - 1)] = p;
  }
  return pos;
}

// Joint exceedance of two sites at distance `lag` (0 = same site), with the
// GaussianMA lags precomputed so workers never trigger the MC fallback.
struct PairJointTable {
  double tail = 0.0;
  std::vector<double> by_lag;  // index 0 = same site, then lags 1..range-1

  PairJointTable(const ScenerySpec& spec, double u, const JointMcOptions& opt) {
    tail = marginal_tail(spec, u);
    const std::int64_t range = spec.dependence_range();
    by_lag.resize(static_cast<std::size_t>(range), tail * tail);
    by_lag[0] = tail;
    for (std::int64_t lag = 1; lag < range; ++lag) {
      by_lag[static_cast<std::size_t>(lag)] = joint_exceedance(spec, lag, u, opt).value;
    }
  }

  double at(std::int64_t lag) const {
    const std::int64_t a = std::abs(lag);
    if (a < static_cast<std::int64_t>(by_lag.size())) return by_lag[static_cast<std::size_t>(a)];
    return tail * tail;
  }
};

}  // namespace detail

struct DprimeValue {
  double value = 0.0;
  double std_err = 0.0;  // nonzero only when a Monte Carlo joint tail is involved
};

// n * sum_{s=1}^{floor(n/k_n)} P(xi(0) > u, xi(s) > u) for the scenery alone.
inline DprimeValue dprime_sum_scenery(const ScenerySpec& spec, std::int64_t n, double u,
                                      std::int64_t k_n, const JointMcOptions& opt = {}) {
  if (n < 1 || k_n < 1) throw std::invalid_argument("dprime_sum_scenery needs n, k_n >= 1");
  const std::int64_t terms = n / k_n;
  const double tail = marginal_tail(spec, u);
  const std::int64_t range = spec.dependence_range();
  double sum = 0.0;
  double var = 0.0;
  for (std::int64_t s = 1; s <= std::min<std::int64_t>(terms, range - 1); ++s) {
    const JointTail jt = joint_exceedance(spec, s, u, opt);
    sum += jt.value;
    var += jt.std_err * jt.std_err;
  }
  if (terms >= range) sum += static_cast<double>(terms - range + 1) * tail * tail;
  const double nd = static_cast<double>(n);
  return {nd * sum, nd * std::sqrt(var)};
}

// Monte Carlo estimate (over walk paths, scenery integrated analytically per
// pair) of n * sum_{i=2}^{floor(n/k_n)} P(xi(S_1) > u_n, xi(S_i) > u_n) at
// u_n = u_n(x).
inline McEstimate dprime_sum_rwrs(const StepLaw& law, const ScenerySpec& spec, std::int64_t n,
                                  double x, std::int64_t k_n, std::int64_t reps, const RngKey& key,
                                  int threads = 1, const JointMcOptions& opt = {}) {
  if (reps < 2) throw std::invalid_argument("insufficient replications");
  if (k_n < 1) throw std::invalid_argument("k_n must be >= 1");
  const double u = norming(spec, n).u(x);
  const detail::PairJointTable joint(spec, u, opt);
  const std::int64_t len = n / k_n;
  if (len < 2) throw std::invalid_argument("n/k_n too small");
  auto samples = parallel_replications(reps, threads, [&](std::int64_t r) {
    const auto pos = detail::walk_prefix(
        law, len, RngKey{key.master_seed, key.stream_id + static_cast<std::uint64_t>(r), 0});
    CompensatedSum acc;
    for (std::size_t i = 1; i < pos.size(); ++i) acc.add(joint.at(pos[i] - pos[0]));
    return static_cast<double>(n) * acc.value();
  });
  return aggregate(samples);
}

// n * sum_{j=k+1}^{r_n} P(xi(S_1) > u_n >= M'_{2,k}, xi(S_j) > u_n). For
// i.i.d. sceneries the scenery probability given the path is closed-form;
// dependent families fall back to indicator Monte Carlo over scenery draws.
// Reusing one key across the k-ladder gives common random numbers, so the
// ladder is monotone path by path.
inline McEstimate dk_sum_rwrs(const StepLaw& law, const ScenerySpec& spec, std::int64_t n,
                              std::int64_t k, double x, std::int64_t k_n, std::int64_t reps,
                              const RngKey& key, int threads = 1) {
  if (k < 1) throw std::invalid_argument("k must be >= 1");
  if (reps < 2) throw std::invalid_argument("insufficient replications");
  const std::int64_t r_n = block_length(n, k_n);
  if (k >= r_n) throw std::invalid_argument("k must be below the block length");
  const double u = norming(spec, n).u(x);
  const double tail = marginal_tail(spec, u);
  const bool iid = spec.dependence_range() == 1;
  auto samples = parallel_replications(reps, threads, [&](std::int64_t r) {
    const RngKey walk_key{key.master_seed, key.stream_id + static_cast<std::uint64_t>(r), 0};
    const auto pos = detail::walk_prefix(law, r_n, walk_key);
    if (iid) {
      std::unordered_set<std::int64_t> conditioning;
      for (std::int64_t t = 2; t <= k; ++t) conditioning.insert(pos[static_cast<std::size_t>(t - 1)]);
      if (conditioning.contains(pos[0])) return 0.0;
      const double base =
          tail * std::pow(1.0 - tail, static_cast<double>(conditioning.size()));
      CompensatedSum acc;
      for (std::int64_t j = k + 1; j <= r_n; ++j) {
        const std::int64_t sj = pos[static_cast<std::size_t>(j - 1)];
        if (sj == pos[0]) {
          acc.add(base);
        } else if (!conditioning.contains(sj)) {
          acc.add(base * tail);
        }
      }
      return static_cast<double>(n) * acc.value();
    }
    // dependent scenery: one draw per path, raw indicators
    const ScenerySpec field = spec.with_seed(
        RngKey{key.master_seed, key.stream_id + static_cast<std::uint64_t>(r), kRoleScenery});
    std::unordered_map<std::int64_t, double> value;
    auto val_at = [&](std::int64_t s) {
      auto it = value.find(s);
      if (it != value.end()) return it->second;
      const double v = scenery_value(field, s);
      value.emplace(s, v);
      return v;
    };
    if (!(val_at(pos[0]) > u)) return 0.0;
    for (std::int64_t t = 2; t <= k; ++t) {
      if (val_at(pos[static_cast<std::size_t>(t - 1)]) > u) return 0.0;
    }
    std::int64_t hits = 0;
    for (std::int64_t j = k + 1; j <= r_n; ++j) {
      if (val_at(pos[static_cast<std::size_t>(j - 1)]) > u) ++hits;
    }
    return static_cast<double>(n) * static_cast<double>(hits);
  });
  return aggregate(samples);
}

struct ObrienPair {
  McEstimate lhs;  // P(M over visited sites <= u_n)
  McEstimate rhs;  // E exp(-sum of per-block last-exceedance probabilities)
};

// Both sides of the blocked max identity, estimated quenched: the walk is
// frozen per outer replication and only the scenery is re-drawn inside.
inline ObrienPair obrien_product(const StepLaw& law, const ScenerySpec& spec, std::int64_t n,
                                 double x, std::int64_t k_n, std::int64_t outer_reps,
                                 std::int64_t inner_reps, const RngKey& key, int threads = 1) {
  if (outer_reps < 2 || inner_reps < 2) throw std::invalid_argument("insufficient replications");
  const double u = norming(spec, n).u(x);
  const std::int64_t r_n = block_length(n, k_n);
  struct Pair {
    double lhs, rhs;
  };
  auto pairs = parallel_replications(outer_reps, threads, [&](std::int64_t r) {
    const WalkSummary walk = generate_walk(
        law, n, RngKey{key.master_seed, key.stream_id + static_cast<std::uint64_t>(r), 0},
        WalkOptions{.keep_range = false, .keep_positions = false});
    std::vector<std::int64_t> sites = walk.first_visit_sites;
    std::sort(sites.begin(), sites.end());
    std::int64_t voids = 0;
    std::int64_t clusters = 0;
    for (std::int64_t d = 0; d < inner_reps; ++d) {
      const ScenerySpec field = spec.with_seed(
          RngKey{key.master_seed,
                 (static_cast<std::uint64_t>(r) << 32) | static_cast<std::uint64_t>(d),
                 kRoleInnerMc});
      bool any = false;
      std::size_t i = 0;
      while (i < sites.size()) {
        const std::size_t stop = std::min(sites.size(), i + static_cast<std::size_t>(r_n));
        bool block_hit = false;
        for (; i < stop; ++i) {
          if (scenery_value(field, sites[i]) > u) block_hit = true;
        }
        if (block_hit) {
          ++clusters;
          any = true;
        }
      }
      if (!any) ++voids;
    }
    Pair p;
    p.lhs = static_cast<double>(voids) / static_cast<double>(inner_reps);
    p.rhs = std::exp(-static_cast<double>(clusters) / static_cast<double>(inner_reps));
    return p;
  });
  std::vector<double> lhs(pairs.size()), rhs(pairs.size());
  for (std::size_t i = 0; i < pairs.size(); ++i) {
    lhs[i] = pairs[i].lhs;
    rhs[i] = pairs[i].rhs;
  }
  return {aggregate(lhs), aggregate(rhs)};
}

struct BlockExceedanceCount {
  std::int64_t blocks_hit = 0;
  std::int64_t exceedances = 0;
};

struct ThetaEstimates {
  double blocks = 0.0;
  double logs = 0.0;
};

// Blocks and log estimators of the extremal index, both clipped to [0,1].
inline ThetaEstimates extremal_index_estimators(std::span<const unsigned char> max_leq_indicators,
                                                std::span<const BlockExceedanceCount> block_counts,
                                                double tau_level) {
  if (!(tau_level > 0.0)) throw std::invalid_argument("tau_level must be positive");
  if (max_leq_indicators.empty() || block_counts.empty()) {
    throw std::invalid_argument("estimators need replications");
  }
  std::int64_t blocks_hit = 0;
  std::int64_t exceedances = 0;
  for (const auto& bc : block_counts) {
    blocks_hit += bc.blocks_hit;
    exceedances += bc.exceedances;
  }
  if (exceedances == 0) throw std::invalid_argument("level too high for horizon");
  double leq = 0.0;
  for (unsigned char m : max_leq_indicators) leq += m ? 1.0 : 0.0;
  const double p_hat = leq / static_cast<double>(max_leq_indicators.size());
  ThetaEstimates est;
  est.blocks = std::clamp(
      static_cast<double>(blocks_hit) / static_cast<double>(exceedances), 0.0, 1.0);
  est.logs = p_hat <= 0.0 ? 1.0 : std::clamp(-std::log(p_hat) / tau_level, 0.0, 1.0);
  return est;
}

// Time-series scan of one replication: exceedances of xi(S_t) over t <= n,
// blocks of r_n consecutive time indices.
inline BlockExceedanceCount series_block_count(std::span<const std::int64_t> positions,
                                               const std::unordered_map<std::int64_t, double>& value_by_site,
                                               double u, std::int64_t r_n) {
  if (r_n < 1) throw std::invalid_argument("r_n must be >= 1");
  BlockExceedanceCount out;
  bool block_hit = false;
  for (std::size_t t = 0; t < positions.size(); ++t) {
    if (t > 0 && t % static_cast<std::size_t>(r_n) == 0) {
      if (block_hit) ++out.blocks_hit;
      block_hit = false;
    }
    const auto it = value_by_site.find(positions[t]);
    if (it != value_by_site.end() && it->second > u) {
      ++out.exceedances;
      block_hit = true;
    }
  }
  if (block_hit) ++out.blocks_hit;
  return out;
}

namespace detail {

// P(xi(i) <= u for all i in tuple), analytic for the i.i.d. families and
// MovingMax (window-union count), Monte Carlo under common random numbers
// for GaussianMA.
class JointCdf {
 public:
  JointCdf(const ScenerySpec& spec, double u, std::int64_t mc_reps)
      : spec_(spec), u_(u), mc_reps_(mc_reps) {}

  double eval(std::span<const std::int64_t> tuple) const {
    switch (spec_.family()) {
      case SceneryFamily::iid_frechet:
      case SceneryFamily::iid_exponential:
      case SceneryFamily::iid_neg_pow:
        return std::pow(1.0 - marginal_tail(spec_, u_), static_cast<double>(tuple.size()));
      case SceneryFamily::moving_max: {
        if (u_ <= 0.0) return 0.0;
        std::int64_t covered = 0;
        const std::int64_t m = spec_.window();
        std::int64_t cover_end = std::numeric_limits<std::int64_t>::min();
        for (std::int64_t s : tuple) {  // tuples are sorted
          const std::int64_t lo = std::max(s, cover_end);
          const std::int64_t hi = s + m;
          if (hi > lo) covered += hi - lo;
          cover_end = std::max(cover_end, hi);
        }
        return std::exp(-static_cast<double>(covered) * std::pow(u_, -spec_.beta()));
      }
      case SceneryFamily::gaussian_ma: {
        const auto& w = spec_.weights();
        const std::int64_t lo = tuple.front();
        const std::int64_t hi = tuple.back() + static_cast<std::int64_t>(w.size());
        const RngStream draws(RngKey{0x71c9a3b25de04f81ULL, 0, kRoleInnerMc});
        std::vector<double> innov(static_cast<std::size_t>(hi - lo));
        std::int64_t all_below = 0;
        for (std::int64_t r = 0; r < mc_reps_; ++r) {
          const RngStream rep = draws.child(static_cast<std::uint64_t>(r));
          for (std::size_t j = 0; j < innov.size(); ++j) innov[j] = rep.normal(j);
          bool ok = true;
          for (std::int64_t s : tuple) {
            double v = 0.0;
            for (std::size_t j = 0; j < w.size(); ++j) {
              v += w[j] * innov[static_cast<std::size_t>(s - lo) + j];
            }
            if (v > u_) {
              ok = false;
              break;
            }
          }
          if (ok) ++all_below;
        }
        return static_cast<double>(all_below) / static_cast<double>(mc_reps_);
      }
    }
    throw std::logic_error("unknown scenery family");
  }

 private:
  const ScenerySpec& spec_;
  double u_;
  std::int64_t mc_reps_;
};

}  // namespace detail

// Bounded surrogate for the mixing coefficient alpha_{n,ell}: the maximum
// factorization defect |F_{i,j}(u) - F_i(u) F_j(u)| over a fixed grid of
// index tuples with p, p' <= max_p and gap exactly ell. This diagnoses the
// condition on a tractable slice; it does not certify it.
inline double alpha_mixing_surrogate(const ScenerySpec& spec, std::int64_t n, std::int64_t ell,
                                     double u, int max_p, std::int64_t mc_reps = 200000) {
  if (max_p < 1 || max_p > 3) throw std::invalid_argument("max_p must lie in [1,3]");
  if (ell < 1) throw std::invalid_argument("ell must be >= 1");
  const detail::JointCdf cdf(spec, u, mc_reps);
  double worst = 0.0;
  for (int p = 1; p <= max_p; ++p) {
    for (int pp = 1; pp <= max_p; ++pp) {
      for (std::int64_t sa : {std::int64_t{1}, std::int64_t{2}}) {
        for (std::int64_t sb : {std::int64_t{1}, std::int64_t{2}}) {
          std::vector<std::int64_t> left, right, both;
          for (int t = 0; t < p; ++t) left.push_back(1 + t * sa);
          const std::int64_t start = left.back() + ell;
          for (int t = 0; t < pp; ++t) right.push_back(start + t * sb);
          if (right.back() > n) continue;
          both = left;
          both.insert(both.end(), right.begin(), right.end());
          const double defect =
              std::abs(cdf.eval(both) - cdf.eval(left) * cdf.eval(right));
          worst = std::max(worst, defect);
        }
      }
    }
  }
  return worst;
}

}  // namespace rwrs
