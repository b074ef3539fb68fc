#pragma once

#include <algorithm>
#include <cstdint>
#include <span>
#include <stdexcept>
#include <vector>

#include "rwrs/special.hpp"

namespace rwrs {

struct SequencePair {
  std::int64_t k_n = 0;
  std::int64_t ell_n = 0;
};

// k_n = floor(n^{1/3}), ell_n = floor(n^{1/4}). Satisfies k_n -> inf and
// k_n * ell_n = o(n); for m-dependent sceneries the mixing coefficients
// vanish exactly once ell_n exceeds the window.
inline SequencePair default_sequences(std::int64_t n) {
  if (n < 8) throw std::invalid_argument("default_sequences requires n >= 8");
  return {floor_root(n, 3), floor_root(n, 4)};
}

inline std::int64_t block_length(std::int64_t n, std::int64_t k_n) {
  if (k_n < 2) throw std::invalid_argument("k_n must be >= 2");
  return n / (k_n - 1) + 1;
}

// Ordered partition of a site list into K_n blocks of r_n consecutive
// elements, with the ell_n largest elements of each block set aside as its
// stripe.
struct BlockScheme {
  std::int64_t n = 0;
  std::int64_t k_n = 0;
  std::int64_t ell_n = 0;
  std::int64_t r_n = 0;
  std::int64_t K_n = 0;
  std::vector<std::vector<std::int64_t>> blocks;
  std::vector<std::vector<std::int64_t>> stripes;
};

// `horizon` defaults to the number of sites; pass the walk horizon when the
// sites are the visited set of an n-step path.
inline BlockScheme build_blocks(std::span<const std::int64_t> sites, std::int64_t k_n,
                                std::int64_t ell_n, std::int64_t horizon = 0) {
  if (k_n < 2) throw std::invalid_argument("k_n must be >= 2");
  if (ell_n < 0) throw std::invalid_argument("ell_n must be >= 0");
  for (std::size_t i = 1; i < sites.size(); ++i) {
    if (!(sites[i - 1] < sites[i])) throw std::invalid_argument("sites must be strictly increasing");
  }
  BlockScheme scheme;
  scheme.n = horizon > 0 ? horizon : static_cast<std::int64_t>(sites.size());
  scheme.k_n = k_n;
  scheme.ell_n = ell_n;
  scheme.r_n = block_length(scheme.n, k_n);
  const auto total = static_cast<std::int64_t>(sites.size());
  scheme.K_n = total / scheme.r_n + 1;
  scheme.blocks.reserve(static_cast<std::size_t>(scheme.K_n));
  scheme.stripes.reserve(static_cast<std::size_t>(scheme.K_n));
  for (std::int64_t j = 0; j < scheme.K_n; ++j) {
    const std::int64_t lo = j * scheme.r_n;
    const std::int64_t hi = std::min(lo + scheme.r_n, total);
    std::vector<std::int64_t> block(sites.begin() + lo, sites.begin() + hi);
    const auto size = static_cast<std::int64_t>(block.size());
    std::vector<std::int64_t> stripe;
    const bool last = (j == scheme.K_n - 1);
    if (!last || size >= ell_n) {
      const std::int64_t take = std::min(ell_n, size);
      stripe.assign(block.end() - take, block.end());
    }
    scheme.blocks.push_back(std::move(block));
    scheme.stripes.push_back(std::move(stripe));
  }
  return scheme;
}

struct EpsilonBounds {
  double eps1 = 0.0;
  double eps2 = 0.0;
  double c = 1.0;
};

// eps1 = c (k_n ell_n / n + k_n alpha_mix), eps2 = c (1/k_n + dprime_value).
// The constant c is unknowable a priori; the bounds serve trend checks only.
inline EpsilonBounds epsilon_bounds(std::int64_t n, std::int64_t k_n, std::int64_t ell_n,
                                    double alpha_mix, double dprime_value, double c = 1.0) {
  if (n < 1 || k_n < 1 || ell_n < 0 || alpha_mix < 0.0 || dprime_value < 0.0 || c < 0.0) {
    throw std::invalid_argument("epsilon_bounds inputs must be nonnegative");
  }
  EpsilonBounds b;
  b.c = c;
  b.eps1 = c * (static_cast<double>(k_n) * static_cast<double>(ell_n) / static_cast<double>(n) +
                static_cast<double>(k_n) * alpha_mix);
  b.eps2 = c * (1.0 / static_cast<double>(k_n) + dprime_value);
  return b;
}

}  // namespace rwrs
