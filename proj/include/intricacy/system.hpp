#pragma once

#include <algorithm>
#include <bit>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <limits>
#include <numeric>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

namespace intricacy {

using Real = double;
using Mask = std::uint64_t;

namespace bits {

constexpr int popcount(Mask m) noexcept { return std::popcount(m); }

constexpr Mask full(int n) noexcept {
  return n >= 64 ? ~Mask{0} : (Mask{1} << n) - 1;
}

constexpr bool contains(Mask m, int coord) noexcept {
  return (m >> coord) & Mask{1};
}

}  // namespace bits

namespace fp {

// Compensated summation keeps the normalization checks on big tables honest.
inline Real kahan_sum(const std::vector<Real>& v) {
  Real sum = 0.0, comp = 0.0;
  for (Real x : v) {
    Real y = x - comp;
    Real t = sum + y;
    comp = (t - sum) - y;
    sum = t;
  }
  return sum;
}

// Entropy differences cancel; anything worse than -1e-12 is a real bug and
// is returned untouched so it can be seen.
inline Real clamp_tiny_negative(Real v) {
  return (v < 0.0 && v > -1e-12) ? 0.0 : v;
}

}  // namespace fp

inline constexpr Real kNegativityTol = 1e-15;
inline constexpr Real kSumTol = 1e-12;
inline constexpr Real kRenormTol = 1e-14;

/** Shape of a finite system: n variables over the alphabet {0,...,d-1}. */
class SystemShape {
 public:
  static constexpr int kMaxVars = 24;

  SystemShape(int d, int n) : d_(d), n_(n) {
    if (d < 2) throw std::invalid_argument("SystemShape: alphabet size must be >= 2");
    if (n < 1) throw std::invalid_argument("SystemShape: need at least one variable");
    if (n > kMaxVars)
      throw std::invalid_argument("SystemShape: exact mode is capped at 24 variables");
    size_ = 1;
    const auto cap = std::numeric_limits<std::size_t>::max();
    for (int i = 0; i < n; ++i) {
      if (size_ > cap / static_cast<std::size_t>(d))
        throw std::invalid_argument("SystemShape: d^n does not fit the index range");
      size_ *= static_cast<std::size_t>(d);
    }
  }

  int d() const { return d_; }
  int n() const { return n_; }
  std::size_t size() const { return size_; }

  friend bool operator==(const SystemShape& a, const SystemShape& b) {
    return a.d_ == b.d_ && a.n_ == b.n_;
  }

 private:
  int d_;
  int n_;
  std::size_t size_;
};

/** One element of the state space, symbols listed coordinate-first. */
using Configuration = std::vector<int>;

/** Bipartition selector: bit i set means coordinate i belongs to S. */
struct SubsetMask {
  Mask bits = 0;
  int n = 0;

  SubsetMask() = default;
  SubsetMask(Mask b, int width) : bits(b), n(width) {
    if (width < 1 || width > SystemShape::kMaxVars)
      throw std::invalid_argument("SubsetMask: bad width");
    if (b & ~bits::full(width))
      throw std::invalid_argument("SubsetMask: bit set beyond width");
  }

  SubsetMask complement() const { return SubsetMask(~bits & bits::full(n), n); }
  int count() const { return bits::popcount(bits); }
  bool empty() const { return bits == 0; }
  bool is_full() const { return bits == bits::full(n); }
};

inline std::size_t index_of(const Configuration& config, const SystemShape& shape) {
  if (static_cast<int>(config.size()) != shape.n())
    throw std::invalid_argument("index_of: configuration length does not match the shape");
  std::size_t idx = 0;
  for (int i = 0; i < shape.n(); ++i) {
    if (config[i] < 0 || config[i] >= shape.d())
      throw std::invalid_argument("index_of: symbol out of range");
    idx = idx * static_cast<std::size_t>(shape.d()) + static_cast<std::size_t>(config[i]);
  }
  return idx;
}

inline Configuration config_of(std::size_t index, const SystemShape& shape) {
  if (index >= shape.size())
    throw std::invalid_argument("config_of: index out of range");
  Configuration config(shape.n());
  for (int i = shape.n() - 1; i >= 0; --i) {
    config[i] = static_cast<int>(index % static_cast<std::size_t>(shape.d()));
    index /= static_cast<std::size_t>(shape.d());
  }
  return config;
}

/** Pure diagnostics for a probability vector; never throws. */
struct ValidationReport {
  Real sum_deviation = 0.0;   // |sum - 1|
  Real worst_negative = 0.0;  // most negative entry, 0 when none
  std::size_t support = 0;    // entries > 0
  bool negativity_flagged = false;
  bool sum_flagged = false;

  bool ok() const { return !negativity_flagged && !sum_flagged; }
};

inline ValidationReport validate(const std::vector<Real>& probs) {
  ValidationReport report;
  for (Real p : probs) {
    if (p > 0.0) ++report.support;
    if (p < report.worst_negative) report.worst_negative = p;
  }
  report.sum_deviation = std::abs(fp::kahan_sum(probs) - 1.0);
  report.negativity_flagged = report.worst_negative <= -kNegativityTol;
  report.sum_flagged = report.sum_deviation > kSumTol;
  return report;
}

/**
 * Probability law of a finite system, stored densely with coordinate 0 in
 * the most significant digit: index(x) = sum_i x_i d^(n-1-i).
 *
 * Construction rejects entries at or below -1e-15 (tinier negatives are
 * rounded up to zero) and sums further than 1e-12 from 1. Sums within
 * 1e-12 but beyond 1e-14 are renormalized; closer sums are left untouched
 * so that file round-trips stay byte-stable.
 */
class JointDistribution {
 public:
  JointDistribution(SystemShape shape, std::vector<Real> probs)
      : shape_(shape), probs_(std::move(probs)) {
    if (probs_.size() != shape_.size())
      throw std::invalid_argument("JointDistribution: expected d^n probabilities");
    for (Real& p : probs_) {
      if (p < 0.0) {
        if (p <= -kNegativityTol)
          throw std::invalid_argument("JointDistribution: negative probability");
        p = 0.0;
      }
    }
    const Real sum = fp::kahan_sum(probs_);
    const Real deviation = std::abs(sum - 1.0);
    if (deviation > kSumTol)
      throw std::invalid_argument("JointDistribution: probabilities do not sum to 1");
    if (deviation > kRenormTol) {
      for (Real& p : probs_) p /= sum;
    }
  }

  const SystemShape& shape() const { return shape_; }
  const std::vector<Real>& probs() const { return probs_; }
  Real operator[](std::size_t idx) const { return probs_[idx]; }
  std::size_t size() const { return probs_.size(); }

 private:
  SystemShape shape_;
  std::vector<Real> probs_;
};

inline ValidationReport validate(const JointDistribution& dist) {
  return validate(dist.probs());
}

namespace detail {

// Output index place values for an odometer sweep: weight[i] is the step a
// unit increment of coordinate i contributes to the derived index.
inline std::vector<std::size_t> marginal_weights(Mask kept, int n, int d) {
  const int m = bits::popcount(kept);
  std::vector<std::size_t> weights(n, 0);
  int seen = 0;
  for (int i = 0; i < n; ++i) {
    if (!bits::contains(kept, i)) continue;
    std::size_t w = 1;
    for (int j = 0; j < m - 1 - seen; ++j) w *= static_cast<std::size_t>(d);
    weights[i] = w;
    ++seen;
  }
  return weights;
}

// One odometer pass pairing each joint index with its derived bin index.
template <class Visit>
inline void sweep_bins(std::size_t size, int n, int d,
                       const std::vector<std::size_t>& weights, Visit&& visit) {
  std::vector<int> digit(n, 0);
  std::size_t out_idx = 0;
  for (std::size_t idx = 0; idx < size; ++idx) {
    visit(idx, out_idx);
    for (int i = n - 1; i >= 0; --i) {
      ++digit[i];
      out_idx += weights[i];
      if (digit[i] < d) break;
      digit[i] = 0;
      out_idx -= weights[i] * static_cast<std::size_t>(d);
    }
  }
}

// Accumulates the joint table into bins addressed by the given weights.
// `out` must be pre-sized and zeroed.
inline void accumulate_bins(const std::vector<Real>& probs, int n, int d,
                            const std::vector<std::size_t>& weights,
                            std::vector<Real>& out) {
  sweep_bins(probs.size(), n, d, weights,
             [&](std::size_t idx, std::size_t out_idx) { out[out_idx] += probs[idx]; });
}

inline std::vector<Real> permute_raw(const std::vector<Real>& probs, int n, int d,
                                     const std::vector<int>& perm) {
  std::vector<std::size_t> weights(n);
  for (int i = 0; i < n; ++i) {
    std::size_t w = 1;
    for (int j = 0; j < n - 1 - perm[i]; ++j) w *= static_cast<std::size_t>(d);
    weights[i] = w;
  }
  std::vector<Real> out(probs.size(), 0.0);
  std::vector<int> digit(n, 0);
  std::size_t out_idx = 0;
  for (std::size_t idx = 0; idx < probs.size(); ++idx) {
    out[out_idx] = probs[idx];
    for (int i = n - 1; i >= 0; --i) {
      ++digit[i];
      out_idx += weights[i];
      if (digit[i] < d) break;
      digit[i] = 0;
      out_idx -= weights[i] * static_cast<std::size_t>(d);
    }
  }
  return out;
}

inline void check_permutation(const std::vector<int>& perm, int n) {
  if (static_cast<int>(perm.size()) != n)
    throw std::invalid_argument("permute: permutation length does not match the system");
  std::vector<bool> seen(n, false);
  for (int v : perm) {
    if (v < 0 || v >= n || seen[v])
      throw std::invalid_argument("permute: not a bijection of the coordinates");
    seen[v] = true;
  }
}

}  // namespace detail

/** Law of the retained coordinates, kept in ascending original order. */
inline JointDistribution marginal(const JointDistribution& dist, const SubsetMask& s) {
  const SystemShape& shape = dist.shape();
  if (s.n != shape.n())
    throw std::invalid_argument("marginal: mask width does not match the system");
  if (s.empty())
    throw std::invalid_argument(
        "marginal: empty subset (the empty system's entropy is the caller's constant 0)");
  if (s.is_full()) return dist;

  const int m = s.count();
  const SystemShape out_shape(shape.d(), m);
  std::vector<Real> out(out_shape.size(), 0.0);
  const auto weights = detail::marginal_weights(s.bits, shape.n(), shape.d());
  detail::accumulate_bins(dist.probs(), shape.n(), shape.d(), weights, out);
  return JointDistribution(out_shape, std::move(out));
}

/** Independent juxtaposition; the first factor takes the leading coordinates. */
inline JointDistribution product(const JointDistribution& a, const JointDistribution& b) {
  if (a.shape().d() != b.shape().d())
    throw std::invalid_argument("product: alphabet sizes differ");
  const SystemShape shape(a.shape().d(), a.shape().n() + b.shape().n());
  std::vector<Real> out;
  out.reserve(shape.size());
  for (Real pa : a.probs())
    for (Real pb : b.probs()) out.push_back(pa * pb);
  return JointDistribution(shape, std::move(out));
}

/**
 * Law of the relabeled system: source coordinate i becomes coordinate
 * perm[i] of the output (0-based).
 */
inline JointDistribution permute(const JointDistribution& dist, const std::vector<int>& perm) {
  const SystemShape& shape = dist.shape();
  detail::check_permutation(perm, shape.n());
  return JointDistribution(
      shape, detail::permute_raw(dist.probs(), shape.n(), shape.d(), perm));
}

inline JointDistribution mix(const std::vector<JointDistribution>& dists,
                             const std::vector<Real>& weights) {
  if (dists.empty() || dists.size() != weights.size())
    throw std::invalid_argument("mix: need matching component and weight counts");
  const SystemShape& shape = dists.front().shape();
  Real wsum = 0.0;
  for (Real w : weights) {
    if (w < 0.0) throw std::invalid_argument("mix: negative weight");
    wsum += w;
  }
  if (std::abs(wsum - 1.0) > kSumTol)
    throw std::invalid_argument("mix: weights do not sum to 1");
  std::vector<Real> out(shape.size(), 0.0);
  for (std::size_t u = 0; u < dists.size(); ++u) {
    if (!(dists[u].shape() == shape))
      throw std::invalid_argument("mix: component shapes differ");
    const auto& p = dists[u].probs();
    for (std::size_t idx = 0; idx < p.size(); ++idx) out[idx] += weights[u] * p[idx];
  }
  return JointDistribution(shape, std::move(out));
}

/**
 * Largest L1 distance between the law and any adjacent-transposition image.
 * Zero (up to FP noise) exactly on exchangeable systems, since adjacent
 * transpositions generate the symmetric group.
 */
inline Real exchangeability_distance(const JointDistribution& dist) {
  const int n = dist.shape().n();
  if (n == 1) return 0.0;
  Real worst = 0.0;
  std::vector<int> perm(n);
  for (int i = 0; i + 1 < n; ++i) {
    std::iota(perm.begin(), perm.end(), 0);
    std::swap(perm[i], perm[i + 1]);
    const auto swapped =
        detail::permute_raw(dist.probs(), n, dist.shape().d(), perm);
    Real l1 = 0.0;
    for (std::size_t idx = 0; idx < swapped.size(); ++idx)
      l1 += std::abs(swapped[idx] - dist.probs()[idx]);
    worst = std::max(worst, l1);
  }
  return worst;
}

}  // namespace intricacy
