#pragma once

#include <atomic>
#include <cmath>
#include <cstdint>
#include <span>
#include <stdexcept>
#include <thread>
#include <vector>

namespace rwrs {

struct McEstimate {
  double mean = 0.0;
  double std_err = 0.0;
  std::int64_t replications = 0;
  double ci_level = 0.95;
};

// Neumaier-compensated accumulator. Summation order is part of the contract:
// aggregation always runs in ascending replication index.
class CompensatedSum {
 public:
  void add(double x) noexcept {
    const double t = sum_ + x;
    if (std::abs(sum_) >= std::abs(x)) {
      comp_ += (sum_ - t) + x;
    } else {
      comp_ += (x - t) + sum_;
    }
    sum_ = t;
  }
  double value() const noexcept { return sum_ + comp_; }

 private:
  double sum_ = 0.0;
  double comp_ = 0.0;
};

inline McEstimate aggregate(std::span<const double> samples, double ci_level = 0.95) {
  if (samples.size() < 2) {
    throw std::invalid_argument("insufficient replications");
  }
  CompensatedSum total;
  for (double x : samples) total.add(x);
  const auto n = static_cast<std::int64_t>(samples.size());
  const double mean = total.value() / static_cast<double>(n);
  CompensatedSum sq;
  for (double x : samples) sq.add((x - mean) * (x - mean));
  const double var = sq.value() / static_cast<double>(n - 1);
  McEstimate est;
  est.mean = mean;
  est.std_err = std::sqrt(var / static_cast<double>(n));
  est.replications = n;
  est.ci_level = ci_level;
  return est;
}

inline int resolve_threads(int threads) {
  if (threads > 0) return threads;
  const unsigned hw = std::thread::hardware_concurrency();
  return hw == 0 ? 1 : static_cast<int>(hw);
}

// Runs fn(rep) for rep in [0, reps) on `threads` workers. Each result lands
// in its own slot, so downstream order-dependent reductions see the same
// sequence regardless of the worker count.
template <typename F>
auto parallel_replications(std::int64_t reps, int threads, F&& fn)
    -> std::vector<decltype(fn(std::int64_t{0}))> {
  using R = decltype(fn(std::int64_t{0}));
  std::vector<R> out(static_cast<std::size_t>(reps));
  const int workers = std::min<std::int64_t>(resolve_threads(threads), reps);
  if (workers <= 1) {
    for (std::int64_t r = 0; r < reps; ++r) out[static_cast<std::size_t>(r)] = fn(r);
    return out;
  }
  std::atomic<std::int64_t> next{0};
  auto body = [&] {
    for (;;) {
      const std::int64_t r = next.fetch_add(1, std::memory_order_relaxed);
      if (r >= reps) return;
      out[static_cast<std::size_t>(r)] = fn(r);
    }
  };
  std::vector<std::thread> pool;
  pool.reserve(static_cast<std::size_t>(workers));
  for (int w = 0; w < workers; ++w) pool.emplace_back(body);
  for (auto& t : pool) t.join();
  return out;
}

}  // namespace rwrs
