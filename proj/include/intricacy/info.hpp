#pragma once

#include <cmath>
#include <limits>
#include <stdexcept>
#include <vector>

#include "intricacy/system.hpp"

namespace intricacy {

// Natural-log entropy units.
using Nats = Real;

/** Shannon entropy of a raw probability vector; zero entries are skipped. */
inline Nats entropy_of(const std::vector<Real>& probs) {
  Real h = 0.0;
  for (Real p : probs) {
    if (p > 0.0) h -= p * std::log(p);
  }
  return fp::clamp_tiny_negative(h);
}

inline Nats entropy(const JointDistribution& dist) { return entropy_of(dist.probs()); }

/** H(X_S), with the empty subset contributing the conventional 0. */
inline Nats subset_entropy(const JointDistribution& dist, const SubsetMask& s) {
  if (s.n != dist.shape().n())
    throw std::invalid_argument("subset_entropy: mask width does not match the system");
  if (s.empty()) return 0.0;
  if (s.is_full()) return entropy(dist);
  return entropy(marginal(dist, s));
}

/** H(X_a | X_b) = H(X_{a u b}) - H(X_b) for disjoint masks, b possibly empty. */
inline Nats conditional_entropy(const JointDistribution& dist, const SubsetMask& a,
                                const SubsetMask& b) {
  if (a.n != dist.shape().n() || b.n != dist.shape().n())
    throw std::invalid_argument("conditional_entropy: mask width does not match the system");
  if (a.bits & b.bits)
    throw std::invalid_argument("conditional_entropy: masks overlap");
  if (a.empty())
    throw std::invalid_argument("conditional_entropy: conditioned subset is empty");
  const SubsetMask joint(a.bits | b.bits, a.n);
  return fp::clamp_tiny_negative(subset_entropy(dist, joint) - subset_entropy(dist, b));
}

/** MI(X_S, X_{S^c}); zero by convention when S is empty or everything. */
inline Nats mutual_information(const JointDistribution& dist, const SubsetMask& s) {
  if (s.n != dist.shape().n())
    throw std::invalid_argument("mutual_information: mask width does not match the system");
  if (s.empty() || s.is_full()) return 0.0;
  const Nats h_s = subset_entropy(dist, s);
  const Nats h_c = subset_entropy(dist, s.complement());
  return fp::clamp_tiny_negative(h_s + h_c - entropy(dist));
}

/**
 * Kullback-Leibler divergence D(p || q). Returns +infinity when p charges
 * a configuration q does not; that is the mathematical value, not an error.
 */
inline Nats relative_entropy(const JointDistribution& p, const JointDistribution& q) {
  if (!(p.shape() == q.shape()))
    throw std::invalid_argument("relative_entropy: shapes differ");
  Real div = 0.0;
  for (std::size_t idx = 0; idx < p.size(); ++idx) {
    const Real pi = p[idx];
    if (pi <= 0.0) continue;
    const Real qi = q[idx];
    if (qi <= 0.0) return std::numeric_limits<Real>::infinity();
    div += pi * std::log(pi / qi);
  }
  return fp::clamp_tiny_negative(div);
}

}  // namespace intricacy
