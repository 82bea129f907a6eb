#pragma once

#include <algorithm>
#include <cmath>
#include <numeric>
#include <optional>
#include <stdexcept>
#include <utility>
#include <vector>

#include "intricacy/coefficients.hpp"
#include "intricacy/info.hpp"
#include "intricacy/system.hpp"

namespace intricacy {

namespace detail {

// Law on {0,...,d-1} with prescribed entropy, from the one-parameter family
// (1-t) point-mass + t uniform. Entropy is strictly increasing in t, so
// bisection pins the target.
inline std::vector<Real> biased_law(int d, Real target_entropy) {
  const Real max_h = std::log(static_cast<Real>(d));
  if (target_entropy < -1e-12 || target_entropy > max_h + 1e-9)
    throw std::invalid_argument("biased_law: entropy target out of range");
  auto entropy_at = [&](Real t) {
    const Real rest = t / static_cast<Real>(d);
    const Real head = 1.0 - t + rest;
    Real h = 0.0;
    if (head > 0.0) h -= head * std::log(head);
    if (rest > 0.0) h -= static_cast<Real>(d - 1) * rest * std::log(rest);
    return h;
  };
  Real lo = 0.0, hi = 1.0, t = 1.0;
  if (entropy_at(1.0) <= target_entropy) {
    t = 1.0;
  } else {
    for (int iter = 0; iter < 200; ++iter) {
      t = (lo + hi) / 2.0;
      const Real h = entropy_at(t);
      if (std::abs(h - target_entropy) <= 1e-13) break;
      (h < target_entropy ? lo : hi) = t;
    }
  }
  std::vector<Real> law(static_cast<std::size_t>(d), t / static_cast<Real>(d));
  law[0] = 1.0 - t + t / static_cast<Real>(d);
  return law;
}

inline int integer_sqrt(int d) {
  int b = static_cast<int>(std::lround(std::sqrt(static_cast<Real>(d))));
  while (b * b > d) --b;
  while ((b + 1) * (b + 1) <= d) ++b;
  return b;
}

}  // namespace detail

/** Catalog of the closed-form oracle systems. */
struct ExampleKind {
  enum class Tag {
    IidUniform,
    PointMass,
    Synchronized,
    SynchronizedSubsystem,
    ChainPair,
    EntropyPair,
    ReplicatedPairChain,
    N3Xor,
    N2Permutation,
  };

  Tag tag = Tag::IidUniform;
  Mask k_mask = 0;          // SynchronizedSubsystem: the synchronized block
  Real x = 0.5;             // EntropyPair / ReplicatedPairChain: entropy fraction
  std::vector<int> sigma;   // N2Permutation: alphabet permutation (empty = identity)

  static ExampleKind iid_uniform() { return {Tag::IidUniform, 0, 0.5, {}}; }
  static ExampleKind point_mass() { return {Tag::PointMass, 0, 0.5, {}}; }
  static ExampleKind synchronized_system() { return {Tag::Synchronized, 0, 0.5, {}}; }
  static ExampleKind synchronized_subsystem(Mask k) {
    return {Tag::SynchronizedSubsystem, k, 0.5, {}};
  }
  static ExampleKind chain_pair() { return {Tag::ChainPair, 0, 0.5, {}}; }
  static ExampleKind entropy_pair(Real x) { return {Tag::EntropyPair, 0, x, {}}; }
  static ExampleKind replicated_pair_chain(Real x) {
    return {Tag::ReplicatedPairChain, 0, x, {}};
  }
  static ExampleKind n3_xor() { return {Tag::N3Xor, 0, 0.5, {}}; }
  static ExampleKind n2_permutation(std::vector<int> sigma = {}) {
    return {Tag::N2Permutation, 0, 0.5, std::move(sigma)};
  }
};

namespace detail {

inline JointDistribution generate_synchronized(const SystemShape& shape) {
  std::vector<Real> p(shape.size(), 0.0);
  const Real w = 1.0 / static_cast<Real>(shape.d());
  for (int a = 0; a < shape.d(); ++a) {
    p[index_of(Configuration(shape.n(), a), shape)] = w;
  }
  return JointDistribution(shape, std::move(p));
}

inline JointDistribution generate_synchronized_subsystem(const SystemShape& shape, Mask k) {
  if (k == 0 || (k & ~bits::full(shape.n())))
    throw std::invalid_argument("generate: synchronized block must be a nonempty subset");
  const int n = shape.n();
  const int d = shape.d();
  const int free_count = n - bits::popcount(k);
  std::size_t free_size = 1;
  for (int i = 0; i < free_count; ++i) free_size *= static_cast<std::size_t>(d);
  const Real w = 1.0 / (static_cast<Real>(d) * static_cast<Real>(free_size));
  std::vector<Real> p(shape.size(), 0.0);
  Configuration config(n);
  for (int a = 0; a < d; ++a) {
    for (std::size_t j = 0; j < free_size; ++j) {
      std::size_t rest = j;
      for (int i = n - 1; i >= 0; --i) {
        if (bits::contains(k, i)) {
          config[i] = a;
        } else {
          config[i] = static_cast<int>(rest % static_cast<std::size_t>(d));
          rest /= static_cast<std::size_t>(d);
        }
      }
      p[index_of(config, shape)] = w;
    }
  }
  return JointDistribution(shape, std::move(p));
}

inline JointDistribution generate_chain_pair(const SystemShape& shape) {
  const int base = integer_sqrt(shape.d());
  if (base < 2 || base * base != shape.d())
    throw std::invalid_argument("generate: chain pairs need a perfect-square alphabet");
  const int n = shape.n();
  std::size_t source_size = 1;
  for (int i = 0; i < n; ++i) source_size *= static_cast<std::size_t>(base);
  const Real w = 1.0 / static_cast<Real>(source_size);
  std::vector<Real> p(shape.size(), 0.0);
  std::vector<int> y(static_cast<std::size_t>(n), 0);
  for (std::size_t j = 0; j < source_size; ++j) {
    // coordinate i pairs sources i and i+1; the last coordinate is the
    // bare final source, so the whole system carries exactly n log(base)
    std::size_t idx = 0;
    for (int i = 0; i < n; ++i) {
      const int digit = (i + 1 < n) ? y[i] + base * y[i + 1] : y[i];
      idx = idx * static_cast<std::size_t>(shape.d()) + static_cast<std::size_t>(digit);
    }
    p[idx] += w;
    for (int i = n - 1; i >= 0; --i) {
      if (++y[i] < base) break;
      y[i] = 0;
    }
  }
  return JointDistribution(shape, std::move(p));
}

inline JointDistribution generate_entropy_pair(const SystemShape& shape, Real x) {
  if (shape.n() != 2)
    throw std::invalid_argument("generate: entropy pairs have exactly two coordinates");
  if (x < 0.0 || x > 1.0)
    throw std::invalid_argument("generate: entropy fraction outside [0,1]");
  const int d = shape.d();
  const Real log_d = std::log(static_cast<Real>(d));
  std::vector<Real> p(shape.size(), 0.0);
  if (x <= 0.5) {
    // synchronized pair sharing one variable of entropy 2x log d
    const auto z = biased_law(d, 2.0 * x * log_d);
    for (int a = 0; a < d; ++a) p[index_of({a, a}, shape)] = z[a];
  } else {
    // uniform first coordinate plus independent additive noise of entropy
    // (2x-1) log d on the second
    const auto noise = biased_law(d, (2.0 * x - 1.0) * log_d);
    for (int a = 0; a < d; ++a)
      for (int v = 0; v < d; ++v)
        p[index_of({a, (a + v) % d}, shape)] = noise[v] / static_cast<Real>(d);
  }
  return JointDistribution(shape, std::move(p));
}

inline JointDistribution generate_replicated_pair_chain(const SystemShape& shape, Real x) {
  const int n = shape.n();
  const SystemShape pair_shape(shape.d(), 2);
  const int pairs = n / 2;
  if (pairs == 0) {
    // single coordinate: just the entropy-matched law
    return JointDistribution(shape, biased_law(shape.d(), x * std::log(Real(shape.d()))));
  }
  JointDistribution acc = generate_entropy_pair(pair_shape, x);
  for (int m = 1; m < pairs; ++m) acc = product(acc, generate_entropy_pair(pair_shape, x));
  if (n % 2 == 1) {
    const JointDistribution tail(
        SystemShape(shape.d(), 1),
        biased_law(shape.d(), x * std::log(static_cast<Real>(shape.d()))));
    acc = product(acc, tail);
  }
  return acc;
}

inline JointDistribution generate_n3_xor(const SystemShape& shape) {
  if (shape.n() != 3)
    throw std::invalid_argument("generate: the xor system has exactly three coordinates");
  const int d = shape.d();
  std::vector<Real> p(shape.size(), 0.0);
  const Real w = 1.0 / static_cast<Real>(d * d);
  for (int a = 0; a < d; ++a)
    for (int b = 0; b < d; ++b) p[index_of({a, b, (a + b) % d}, shape)] = w;
  return JointDistribution(shape, std::move(p));
}

inline JointDistribution generate_n2_permutation(const SystemShape& shape,
                                                 std::vector<int> sigma) {
  if (shape.n() != 2)
    throw std::invalid_argument("generate: the permutation pair has exactly two coordinates");
  const int d = shape.d();
  if (sigma.empty()) {
    sigma.resize(static_cast<std::size_t>(d));
    std::iota(sigma.begin(), sigma.end(), 0);
  }
  if (static_cast<int>(sigma.size()) != d)
    throw std::invalid_argument("generate: sigma must permute the alphabet");
  std::vector<bool> seen(static_cast<std::size_t>(d), false);
  for (int v : sigma) {
    if (v < 0 || v >= d || seen[v])
      throw std::invalid_argument("generate: sigma must permute the alphabet");
    seen[v] = true;
  }
  std::vector<Real> p(shape.size(), 0.0);
  for (int a = 0; a < d; ++a) p[index_of({a, sigma[a]}, shape)] = 1.0 / static_cast<Real>(d);
  return JointDistribution(shape, std::move(p));
}

}  // namespace detail

inline JointDistribution generate(const ExampleKind& kind, const SystemShape& shape) {
  using Tag = ExampleKind::Tag;
  switch (kind.tag) {
    case Tag::IidUniform: {
      std::vector<Real> p(shape.size(), 1.0 / static_cast<Real>(shape.size()));
      return JointDistribution(shape, std::move(p));
    }
    case Tag::PointMass: {
      std::vector<Real> p(shape.size(), 0.0);
      p[0] = 1.0;
      return JointDistribution(shape, std::move(p));
    }
    case Tag::Synchronized:
      return detail::generate_synchronized(shape);
    case Tag::SynchronizedSubsystem:
      return detail::generate_synchronized_subsystem(shape, kind.k_mask);
    case Tag::ChainPair:
      return detail::generate_chain_pair(shape);
    case Tag::EntropyPair:
      return detail::generate_entropy_pair(shape, kind.x);
    case Tag::ReplicatedPairChain:
      return detail::generate_replicated_pair_chain(shape, kind.x);
    case Tag::N3Xor:
      return detail::generate_n3_xor(shape);
    case Tag::N2Permutation:
      return detail::generate_n2_permutation(shape, kind.sigma);
  }
  throw std::invalid_argument("generate: unknown kind");
}

/** Weights over the binary type classes (count of ones) of an exchangeable system. */
struct TypeWeights {
  std::vector<Real> q;
};

/**
 * Exchangeable binary system from type weights: every configuration with k
 * ones gets probability q[k] / binom(n, k).
 */
inline JointDistribution exchangeable_from_type_weights(const TypeWeights& weights,
                                                        const SystemShape& shape) {
  if (shape.d() != 2)
    throw std::invalid_argument("exchangeable_from_type_weights: only d = 2 is supported");
  const int n = shape.n();
  if (weights.q.size() != static_cast<std::size_t>(n) + 1)
    throw std::invalid_argument("exchangeable_from_type_weights: expected n+1 weights");
  Real qsum = 0.0;
  for (Real w : weights.q) {
    if (w < 0.0)
      throw std::invalid_argument("exchangeable_from_type_weights: negative weight");
    qsum += w;
  }
  if (std::abs(qsum - 1.0) > kSumTol)
    throw std::invalid_argument("exchangeable_from_type_weights: weights do not sum to 1");
  std::vector<Real> per_config(static_cast<std::size_t>(n) + 1);
  for (int k = 0; k <= n; ++k) per_config[k] = weights.q[k] / binomial(n, k);
  std::vector<Real> p(shape.size());
  for (std::size_t idx = 0; idx < p.size(); ++idx)
    p[idx] = per_config[std::popcount(idx)];
  return JointDistribution(shape, std::move(p));
}

/**
 * Closed-form systems worth seeding an ascent with for the given shape:
 * the small-system maximizers when they apply, the synchronized system,
 * and the replicated-pair construction matched to the entropy target.
 * Exact maximizers are listed first so restart tie-breaking keeps them.
 */
inline std::vector<JointDistribution> standard_witnesses(
    const SystemShape& shape, std::optional<Real> entropy_x = {}) {
  std::vector<JointDistribution> witnesses;
  const Real x = entropy_x.value_or(0.5);
  if (shape.n() == 2)
    witnesses.push_back(generate(ExampleKind::n2_permutation(), shape));
  if (shape.n() == 3) witnesses.push_back(generate(ExampleKind::n3_xor(), shape));
  witnesses.push_back(generate(ExampleKind::synchronized_system(), shape));
  if (shape.n() >= 2)
    witnesses.push_back(generate(ExampleKind::replicated_pair_chain(x), shape));
  const int base = detail::integer_sqrt(shape.d());
  if (shape.n() >= 2 && base >= 2 && base * base == shape.d())
    witnesses.push_back(generate(ExampleKind::chain_pair(), shape));
  return witnesses;
}

/** Average of all n! coordinate relabelings; cost n! d^n, capped at n = 8. */
inline JointDistribution symmetrize(const JointDistribution& dist) {
  const int n = dist.shape().n();
  if (n > 8) throw std::invalid_argument("symmetrize: cost grows as n! d^n, capped at n = 8");
  std::vector<int> perm(n);
  std::iota(perm.begin(), perm.end(), 0);
  std::vector<Real> acc(dist.size(), 0.0);
  std::size_t count = 0;
  do {
    const auto image = detail::permute_raw(dist.probs(), n, dist.shape().d(), perm);
    for (std::size_t idx = 0; idx < acc.size(); ++idx) acc[idx] += image[idx];
    ++count;
  } while (std::next_permutation(perm.begin(), perm.end()));
  for (Real& v : acc) v /= static_cast<Real>(count);
  return JointDistribution(dist.shape(), std::move(acc));
}

}  // namespace intricacy
