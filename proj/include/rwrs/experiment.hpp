#pragma once

#include <cmath>
#include <cstdint>
#include <cstdio>
#include <span>
#include <stdexcept>
#include <string>
#include <unordered_map>
#include <vector>

#include "rwrs/blocks.hpp"
#include "rwrs/diagnostics.hpp"
#include "rwrs/montecarlo.hpp"
#include "rwrs/norming.hpp"
#include "rwrs/point_process.hpp"
#include "rwrs/scenery.hpp"
#include "rwrs/stats.hpp"
#include "rwrs/step_law.hpp"
#include "rwrs/walk.hpp"

namespace rwrs {

struct ExperimentConfig {
  StepLaw law;
  ScenerySpec scenery;
  std::int64_t n = 0;
  std::int64_t reps = 0;
  std::vector<Box> boxes;
  std::vector<double> levels;
  McEstimate q_hat;
  std::uint64_t master_seed = 0;
  bool negative_control = false;

  std::int64_t scaling() const {
    return static_cast<std::int64_t>(std::floor(q_hat.mean * static_cast<double>(n)));
  }

  void validate() const {
    if (reps < 100) throw std::invalid_argument("insufficient replications");
    if (n < 2) throw std::invalid_argument("horizon must be >= 2");
    if (!(q_hat.mean > 0.0 && q_hat.mean <= 1.0)) {
      throw std::invalid_argument("q_hat must lie in (0,1]");
    }
    if (scaling() < 2) throw std::invalid_argument("scaling too small");
    if (boxes.empty()) throw std::invalid_argument("config needs at least one box");
    const TailMeasure measure = tail_measure_for(scenery);
    for (const auto& box : boxes) {
      box.validate();
      const double intensity = box.intensity(measure);
      if (!(intensity > 0.0)) throw std::invalid_argument("box intensity must be positive");
    }
    for (double x : levels) {
      if (!in_extreme_value_domain(measure, x)) {
        throw std::invalid_argument("level outside extreme-value domain");
      }
    }
  }
};

struct ReplicationRecord {
  std::int64_t rep = 0;
  std::int64_t range_total = 0;
  double max_value = 0.0;
  std::vector<std::int64_t> box_counts;
  double first_t = 0.0, first_v = 0.0;
  double mid_t = 0.0, mid_v = 0.0;
  std::vector<BlockExceedanceCount> level_counts;  // aligned with config.levels
};

struct RunResult {
  std::int64_t m_n = 0;
  std::int64_t k_n = 0;
  std::int64_t r_n = 0;
  std::vector<ReplicationRecord> records;
  std::vector<std::vector<double>> box_times;  // pooled t's per box, replication order
};

// One full replicated experiment; deterministic given the master seed, and
// independent of the worker count (records land in replication order).
inline RunResult run_experiment(const ExperimentConfig& config, int threads = 0) {
  config.validate();
  const std::int64_t n = config.n;
  const auto [k_n, ell_n] = default_sequences(std::max<std::int64_t>(n, 8));
  (void)ell_n;
  const std::int64_t r_n = block_length(n, k_n);
  const Norming mark_norming = norming(config.scenery, config.scaling());
  const Norming level_norming = norming(config.scenery, n);
  std::vector<double> level_u;
  level_u.reserve(config.levels.size());
  for (double x : config.levels) level_u.push_back(level_norming.u(x));

  struct RepOutput {
    ReplicationRecord record;
    std::vector<std::vector<double>> times;
  };
  auto outputs = parallel_replications(config.reps, threads, [&](std::int64_t rep) {
    const WalkSummary walk =
        generate_walk(config.law, n,
                      RngKey{config.master_seed, static_cast<std::uint64_t>(rep), 0},
                      WalkOptions{.keep_range = false, .keep_positions = true});
    const ScenerySpec field = config.scenery.with_seed(
        RngKey{config.master_seed, static_cast<std::uint64_t>(rep), kRoleScenery});

    std::unordered_map<std::int64_t, double> value_by_site;
    value_by_site.reserve(walk.first_visit_sites.size() * 2);
    for (std::int64_t site : walk.first_visit_sites) {
      value_by_site.emplace(site, scenery_value(field, site));
    }

    RepOutput out;
    auto& rec = out.record;
    rec.rep = rep;
    rec.range_total = walk.range_total();
    rec.box_counts.assign(config.boxes.size(), 0);
    out.times.resize(config.boxes.size());
    rec.max_value = -std::numeric_limits<double>::infinity();

    const auto points = static_cast<std::int64_t>(walk.tau.size());
    const std::int64_t mid_k = std::max<std::int64_t>(1, points / 2);
    for (std::int64_t k = 1; k <= points; ++k) {
      const double t = static_cast<double>(walk.tau[static_cast<std::size_t>(k - 1)]) /
                       static_cast<double>(n);
      const double raw = value_by_site.at(walk.first_visit_sites[static_cast<std::size_t>(k - 1)]);
      const double v = (raw - mark_norming.b) / mark_norming.a;
      rec.max_value = std::max(rec.max_value, raw);
      for (std::size_t b = 0; b < config.boxes.size(); ++b) {
        if (config.boxes[b].contains(t, v)) {
          ++rec.box_counts[b];
          out.times[b].push_back(t);
        }
      }
      if (k == 1) {
        rec.first_t = t;
        rec.first_v = v;
      }
      if (k == mid_k) {
        rec.mid_t = t;
        rec.mid_v = v;
      }
    }

    rec.level_counts.reserve(level_u.size());
    for (double u : level_u) {
      rec.level_counts.push_back(series_block_count(walk.positions, value_by_site, u, r_n));
    }
    return out;
  });

  RunResult result;
  result.m_n = config.scaling();
  result.k_n = k_n;
  result.r_n = r_n;
  result.records.reserve(outputs.size());
  result.box_times.resize(config.boxes.size());
  for (auto& out : outputs) {
    for (std::size_t b = 0; b < config.boxes.size(); ++b) {
      auto& pool = result.box_times[b];
      pool.insert(pool.end(), out.times[b].begin(), out.times[b].end());
    }
    result.records.push_back(std::move(out.record));
  }
  return result;
}

struct TestVerdict {
  std::string name;
  double statistic = 0.0;
  double target = 0.0;
  double tolerance = 0.0;
  double std_err = 0.0;
  bool pass = false;

  static TestVerdict make(std::string name, double statistic, double target, double tolerance,
                          double std_err) {
    TestVerdict v;
    v.name = std::move(name);
    v.statistic = statistic;
    v.target = target;
    v.tolerance = tolerance;
    v.std_err = std_err;
    v.pass = std::abs(statistic - target) <= tolerance;
    return v;
  }
};

namespace detail {

inline std::vector<double> box_count_column(const RunResult& result, std::size_t box_idx) {
  std::vector<double> counts;
  counts.reserve(result.records.size());
  for (const auto& rec : result.records) {
    counts.push_back(static_cast<double>(rec.box_counts[box_idx]));
  }
  return counts;
}

inline double q_relative_3sigma(const McEstimate& q_hat) {
  return 3.0 * q_hat.std_err / q_hat.mean;
}

}  // namespace detail

// Kallenberg obligation (i): mean count against the product intensity.
inline TestVerdict mean_count_test(const RunResult& result, const ExperimentConfig& config,
                                   std::size_t box_idx, std::string name = {}) {
  if (result.records.size() < 100) throw std::invalid_argument("insufficient replications");
  const double expected = config.boxes[box_idx].intensity(tail_measure_for(config.scenery));
  const McEstimate est = aggregate(detail::box_count_column(result, box_idx));
  const double tol = 3.0 * est.std_err + expected * detail::q_relative_3sigma(config.q_hat);
  if (name.empty()) name = "mean_count/box" + std::to_string(box_idx);
  return TestVerdict::make(std::move(name), est.mean, expected, tol, est.std_err);
}

// Kallenberg obligation (ii): void frequency against exp(-intensity).
inline TestVerdict void_probability_test(const RunResult& result, const ExperimentConfig& config,
                                         std::size_t box_idx, std::string name = {}) {
  if (result.records.size() < 100) throw std::invalid_argument("insufficient replications");
  const double lambda = config.boxes[box_idx].intensity(tail_measure_for(config.scenery));
  const double expected = std::exp(-lambda);
  std::vector<double> voids;
  voids.reserve(result.records.size());
  for (const auto& rec : result.records) {
    voids.push_back(rec.box_counts[box_idx] == 0 ? 1.0 : 0.0);
  }
  const McEstimate est = aggregate(voids);
  const double tol =
      3.0 * est.std_err + lambda * expected * detail::q_relative_3sigma(config.q_hat);
  if (name.empty()) name = "void/box" + std::to_string(box_idx);
  return TestVerdict::make(std::move(name), est.mean, expected, tol, est.std_err);
}

// Poisson counts have variance equal to mean; the index is scale-free so no
// q-hat propagation applies.
inline TestVerdict dispersion_test(const RunResult& result, std::size_t box_idx,
                                   std::string name = {}) {
  const auto counts = detail::box_count_column(result, box_idx);
  const double index = dispersion_index(counts);
  const double se = std::sqrt(2.0 / static_cast<double>(counts.size() - 1));
  if (name.empty()) name = "dispersion/box" + std::to_string(box_idx);
  return TestVerdict::make(std::move(name), index, 1.0, 3.0 * se, se);
}

// P(M <= u_n(x)) against exp(-q_hat * nu(x, inf)).
inline TestVerdict max_limit_test(const RunResult& result, const ExperimentConfig& config, double x,
                                  std::string name = {}) {
  if (result.records.size() < 100) throw std::invalid_argument("insufficient replications");
  const double u = norming(config.scenery, config.n).u(x);
  const double tau = nu_tail(tail_measure_for(config.scenery), x);
  const double expected = std::exp(-config.q_hat.mean * tau);
  std::vector<double> leq;
  leq.reserve(result.records.size());
  for (const auto& rec : result.records) leq.push_back(rec.max_value <= u ? 1.0 : 0.0);
  const McEstimate est = aggregate(leq);
  const double tol = 3.0 * est.std_err + tau * expected * 3.0 * config.q_hat.std_err;
  if (name.empty()) {
    char buf[64];
    std::snprintf(buf, sizeof buf, "max_limit/x=%g", x);
    name = buf;
  }
  return TestVerdict::make(std::move(name), est.mean, expected, tol, est.std_err);
}

inline bool boxes_disjoint(const Box& a, const Box& b) {
  const bool t_overlap = a.t_lo < b.t_hi && b.t_lo < a.t_hi;
  if (!t_overlap) return true;
  for (const auto& ia : a.values) {
    for (const auto& ib : b.values) {
      if (ia.lo < ib.hi && ib.lo < ia.hi) return false;
    }
  }
  return true;
}

// Counts in disjoint boxes are asymptotically independent Poisson variables.
inline TestVerdict box_correlation_test(const RunResult& result, std::size_t i, std::size_t j,
                                        std::string name = {}) {
  const auto a = detail::box_count_column(result, i);
  const auto b = detail::box_count_column(result, j);
  const double r = pearson_correlation(a, b);
  const double tol = 3.0 / std::sqrt(static_cast<double>(a.size()));
  if (name.empty()) name = "count_corr/box" + std::to_string(i) + ",box" + std::to_string(j);
  return TestVerdict::make(std::move(name), r, 0.0, tol, tol / 3.0);
}

// Conditional on the count, times inside a box are uniform; KS at 99%.
inline TestVerdict uniformity_test(const RunResult& result, const ExperimentConfig& config,
                                   std::size_t box_idx, std::string name = {}) {
  const auto& pool = result.box_times[box_idx];
  const Box& box = config.boxes[box_idx];
  if (name.empty()) name = "time_uniformity/box" + std::to_string(box_idx);
  if (pool.size() < 10) {
    return TestVerdict::make(std::move(name), 0.0, 0.0, 1.0, 0.0);  // too few points to resolve
  }
  std::vector<double> rescaled;
  rescaled.reserve(pool.size());
  for (double t : pool) rescaled.push_back((t - box.t_lo) / (box.t_hi - box.t_lo));
  const double d = ks_statistic(std::move(rescaled), [](double t) { return std::min(std::max(t, 0.0), 1.0); });
  const double tol = 1.63 / std::sqrt(static_cast<double>(pool.size()));
  return TestVerdict::make(std::move(name), d, 0.0, tol, tol / 3.0);
}

// Chi-square independence of (tau_k / n, normalized mark) on a 4x4 quantile
// grid at the 99% level. k = 1 has a degenerate time coordinate (tau_1 = 1),
// which the binning handles by collapsing to a trivially-passing test.
inline TestVerdict independence_test(const RunResult& result, bool mid, std::string name = {}) {
  std::vector<double> ts, vs;
  ts.reserve(result.records.size());
  vs.reserve(result.records.size());
  for (const auto& rec : result.records) {
    ts.push_back(mid ? rec.mid_t : rec.first_t);
    vs.push_back(mid ? rec.mid_v : rec.first_v);
  }
  const ChiSquareResult chi = chi_square_independence(ts, vs, 4);
  if (name.empty()) name = mid ? "independence/mid" : "independence/first";
  return TestVerdict::make(std::move(name), chi.statistic, 0.0,
                           chi.degenerate ? 1.0 : chi.critical_99, 0.0);
}

inline TestVerdict theta_verdict(const RunResult& result, const ExperimentConfig& config,
                                 std::size_t level_idx, bool blocks_estimator) {
  const double x = config.levels[level_idx];
  const double tau = nu_tail(tail_measure_for(config.scenery), x);
  std::vector<unsigned char> max_leq;
  std::vector<BlockExceedanceCount> counts;
  const double u = norming(config.scenery, config.n).u(x);
  for (const auto& rec : result.records) {
    max_leq.push_back(rec.max_value <= u ? 1 : 0);
    counts.push_back(rec.level_counts[level_idx]);
  }
  const ThetaEstimates est = extremal_index_estimators(max_leq, counts, tau);
  char buf[64];
  std::snprintf(buf, sizeof buf, "theta_%s/x=%g", blocks_estimator ? "blocks" : "logs", x);
  return TestVerdict::make(buf, blocks_estimator ? est.blocks : est.logs, config.q_hat.mean, 0.05,
                           config.q_hat.std_err);
}

// The full verdict battery used by the CLI test command.
inline std::vector<TestVerdict> standard_verdicts(const RunResult& result,
                                                  const ExperimentConfig& config) {
  std::vector<TestVerdict> out;
  for (std::size_t b = 0; b < config.boxes.size(); ++b) {
    out.push_back(mean_count_test(result, config, b));
    out.push_back(void_probability_test(result, config, b));
    out.push_back(dispersion_test(result, b));
    out.push_back(uniformity_test(result, config, b));
  }
  for (std::size_t i = 0; i < config.boxes.size(); ++i) {
    for (std::size_t j = i + 1; j < config.boxes.size(); ++j) {
      if (boxes_disjoint(config.boxes[i], config.boxes[j])) {
        out.push_back(box_correlation_test(result, i, j));
      }
    }
  }
  for (std::size_t l = 0; l < config.levels.size(); ++l) {
    out.push_back(max_limit_test(result, config, config.levels[l]));
    out.push_back(theta_verdict(result, config, l, true));
    out.push_back(theta_verdict(result, config, l, false));
  }
  out.push_back(independence_test(result, false));
  out.push_back(independence_test(result, true));
  return out;
}

}  // namespace rwrs
