#pragma once

#include <cmath>
#include <cstdint>
#include <stdexcept>
#include <unordered_map>
#include <utility>
#include <vector>

#include "intricacy/coefficients.hpp"
#include "intricacy/info.hpp"
#include "intricacy/rng.hpp"
#include "intricacy/system.hpp"

namespace intricacy {

namespace detail {

// Sums out the coordinate at (most-significant-first) position `pos` of a
// dense table over k coordinates with alphabet d.
inline std::vector<Real> sum_out(const std::vector<Real>& table, int k, int pos, int d) {
  std::size_t low = 1;
  for (int i = 0; i < k - 1 - pos; ++i) low *= static_cast<std::size_t>(d);
  const std::size_t mid = low * static_cast<std::size_t>(d);
  const std::size_t out_size = table.size() / static_cast<std::size_t>(d);
  std::vector<Real> out(out_size, 0.0);
  const std::size_t hi_count = table.size() / mid;
  for (std::size_t hi = 0; hi < hi_count; ++hi) {
    Real* dst = out.data() + hi * low;
    const Real* block = table.data() + hi * mid;
    for (int dig = 0; dig < d; ++dig) {
      const Real* src = block + static_cast<std::size_t>(dig) * low;
      for (std::size_t lo = 0; lo < low; ++lo) dst[lo] += src[lo];
    }
  }
  return out;
}

inline void subset_entropies_rec(const std::vector<Real>& table, int coord, int n, int d,
                                 Mask kept, std::vector<Nats>& out) {
  if (coord == n) {
    out[kept] = entropy_of(table);
    return;
  }
  subset_entropies_rec(table, coord + 1, n, d, kept | (Mask{1} << coord), out);
  const int width = bits::popcount(kept) + (n - coord);
  const auto dropped = sum_out(table, width, bits::popcount(kept), d);
  subset_entropies_rec(dropped, coord + 1, n, d, kept, out);
}

// H(X_S) for every mask in one sweep of the subset lattice. Each drop
// marginalizes an already-reduced table, so the total cost is O((d+1)^n)
// instead of O(2^n d^n).
inline std::vector<Nats> subset_entropies_raw(const std::vector<Real>& probs, int n, int d) {
  std::vector<Nats> out(std::size_t{1} << n, 0.0);
  subset_entropies_rec(probs, 0, n, d, 0, out);
  return out;
}

inline Nats intricacy_raw(const std::vector<Real>& probs, int n, int d,
                          const CoefficientTable& table) {
  const Mask full = bits::full(n);
  const auto h = subset_entropies_raw(probs, n, d);
  const Nats h_full = h[full];
  Real total = 0.0;
  for (Mask m = 1; m < full; ++m) {
    const int k = bits::popcount(m);
    if (2 * k > n) continue;
    if (2 * k == n && !(m & 1)) continue;  // middle layer: one mask per complement pair
    const Real mi = fp::clamp_tiny_negative(h[m] + h[full & ~m] - h_full);
    total += 2.0 * table.at(k) * mi;
  }
  return fp::clamp_tiny_negative(total);
}

}  // namespace detail

/** Marginal entropies H(X_S) indexed by subset mask. */
inline std::vector<Nats> subset_entropies(const JointDistribution& dist) {
  return detail::subset_entropies_raw(dist.probs(), dist.shape().n(), dist.shape().d());
}

/** All bipartition mutual informations, indexed by subset mask. */
struct MIProfile {
  int n = 0;
  std::vector<Nats> mi;

  Nats at(Mask m) const { return mi[m]; }
};

inline MIProfile mi_profile(const JointDistribution& dist) {
  const int n = dist.shape().n();
  const Mask full = bits::full(n);
  const auto h = subset_entropies(dist);
  MIProfile profile{n, std::vector<Nats>(std::size_t{1} << n, 0.0)};
  for (Mask m = 1; m < full; ++m) {
    if (!(m & 1)) continue;  // fill each complement pair from one side
    const Real mi = fp::clamp_tiny_negative(h[m] + h[full & ~m] - h[full]);
    profile.mi[m] = mi;
    profile.mi[full & ~m] = mi;
  }
  return profile;
}

/**
 * Exact intricacy: sum over bipartitions of c[|S|] MI(X_S, X_{S^c}).
 * Complement symmetry halves the subset loop.
 */
inline Nats intricacy_exact(const JointDistribution& dist, const CoefficientTable& table) {
  if (table.n() != dist.shape().n())
    throw std::invalid_argument("intricacy_exact: table size does not match the system");
  return detail::intricacy_raw(dist.probs(), dist.shape().n(), dist.shape().d(), table);
}

/**
 * The entropy form 2 sum_S c[|S|] H(X_S) - H(X). Slower than the exact
 * path (every marginal is recomputed through the system-core primitives),
 * kept as an algebraically independent cross-check.
 */
inline Nats intricacy_via_entropies(const JointDistribution& dist,
                                    const CoefficientTable& table) {
  const int n = dist.shape().n();
  if (table.n() != n)
    throw std::invalid_argument("intricacy_via_entropies: table size does not match the system");
  const Mask full = bits::full(n);
  const Nats h_full = entropy(dist);
  Real acc = table.at(n) * h_full;  // S = I; S = empty contributes 0
  for (Mask m = 1; m < full; ++m)
    acc += table.at(bits::popcount(m)) * subset_entropy(dist, SubsetMask(m, n));
  return fp::clamp_tiny_negative(2.0 * acc - h_full);
}

/**
 * Prefix-entropy fast path, valid for exchangeable systems only:
 * 2 sum_k binom(n,k) c[k] H(X_1..X_k) - H(X), costing O(sum_k d^k).
 * Exchangeability is pre-checked through adjacent transpositions.
 */
inline Nats intricacy_exchangeable(const JointDistribution& dist,
                                   const CoefficientTable& table) {
  const int n = dist.shape().n();
  const int d = dist.shape().d();
  if (table.n() != n)
    throw std::invalid_argument("intricacy_exchangeable: table size does not match the system");
  if (exchangeability_distance(dist) > 1e-9)
    throw std::invalid_argument("intricacy_exchangeable: system is not exchangeable");
  std::vector<Nats> prefix(static_cast<std::size_t>(n) + 1, 0.0);
  std::vector<Real> current = dist.probs();
  prefix[n] = entropy_of(current);
  for (int k = n - 1; k >= 1; --k) {
    current = detail::sum_out(current, k + 1, k, d);
    prefix[k] = entropy_of(current);
  }
  Real acc = 0.0;
  for (int k = 1; k <= n; ++k) acc += binomial(n, k) * table.at(k) * prefix[k];
  return fp::clamp_tiny_negative(2.0 * acc - prefix[n]);
}

struct MCEstimate {
  Nats mean = 0.0;
  Nats std_error = 0.0;
  std::uint64_t samples = 0;
  std::uint64_t seed = 0;
};

/**
 * Paintbox Monte Carlo: each sample draws W from lambda and keeps
 * coordinate i when Y_i >= W for independent uniform Y_i, then scores the
 * bipartition mutual information of the sampled subset. The mean is an
 * unbiased estimate of the intricacy with coefficients built from lambda.
 *
 * Sample i always uses counter stream i of the seed, so estimates are
 * bit-reproducible regardless of how the loop is partitioned.
 */
inline MCEstimate intricacy_mc(const JointDistribution& dist, const LambdaSpec& lambda,
                               std::uint64_t samples, std::uint64_t seed) {
  if (samples < 2) throw std::invalid_argument("intricacy_mc: need at least 2 samples");
  const int n = dist.shape().n();
  const int d = dist.shape().d();
  const Mask full = bits::full(n);

  // Full profile when the lattice sweep is affordable, lazy per-mask
  // marginal entropies otherwise.
  Real lattice_cost = 1.0;
  for (int i = 0; i < n; ++i) lattice_cost *= static_cast<Real>(d + 1);
  const bool precompute = lattice_cost <= 2e8;

  MIProfile profile;
  std::unordered_map<Mask, Nats> h_cache;
  Nats h_full = 0.0;
  if (precompute) {
    profile = mi_profile(dist);
  } else {
    h_full = entropy(dist);
  }
  auto mi_of = [&](Mask m) -> Real {
    if (m == 0 || m == full) return 0.0;
    if (precompute) return profile.mi[m];
    auto lazy_h = [&](Mask s) {
      auto it = h_cache.find(s);
      if (it != h_cache.end()) return it->second;
      std::vector<Real> bins(SystemShape(d, bits::popcount(s)).size(), 0.0);
      detail::accumulate_bins(dist.probs(), n, d, detail::marginal_weights(s, n, d), bins);
      const Nats h = entropy_of(bins);
      h_cache.emplace(s, h);
      return h;
    };
    return fp::clamp_tiny_negative(lazy_h(m) + lazy_h(full & ~m) - h_full);
  };

  Real sum = 0.0, sum_comp = 0.0;
  Real sumsq = 0.0, sumsq_comp = 0.0;
  for (std::uint64_t i = 0; i < samples; ++i) {
    rng::Stream g(seed, i);
    const Real w = lambda.sample(g);
    Mask m = 0;
    for (int coord = 0; coord < n; ++coord) {
      if (g.next_unit() >= w) m |= Mask{1} << coord;
    }
    const Real value = mi_of(m);
    Real y = value - sum_comp;
    Real t = sum + y;
    sum_comp = (t - sum) - y;
    sum = t;
    y = value * value - sumsq_comp;
    t = sumsq + y;
    sumsq_comp = (t - sumsq) - y;
    sumsq = t;
  }

  MCEstimate est;
  est.samples = samples;
  est.seed = seed;
  est.mean = sum / static_cast<Real>(samples);
  const Real var =
      std::max(0.0, (sumsq - static_cast<Real>(samples) * est.mean * est.mean) /
                        static_cast<Real>(samples - 1));
  est.std_error = std::sqrt(var / static_cast<Real>(samples));
  return est;
}

}  // namespace intricacy
