#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <limits>
#include <optional>
#include <stdexcept>
#include <utility>
#include <vector>

#include "intricacy/coefficients.hpp"
#include "intricacy/engine.hpp"
#include "intricacy/generators.hpp"
#include "intricacy/info.hpp"
#include "intricacy/rng.hpp"
#include "intricacy/system.hpp"

namespace intricacy {

struct OptimizerConfig {
  int restarts = 20;
  int max_iters = 500;
  Real initial_step = 0.5;
  Real value_tol = 1e-10;
  Real grad_tol = 1e-8;
  std::uint64_t seed = 0;
  std::optional<Real> entropy_target_fraction;  // x, as a fraction of n log d
  Real entropy_tol = 1e-6;                      // window on H / (n log d)
  Real support_threshold = 1e-6;
};

struct OptResult {
  JointDistribution dist;
  Nats value = 0.0;
  Nats entropy = 0.0;
  int iterations = 0;
  bool converged = false;
  int restart_index = 0;
};

struct SupportStats {
  std::size_t support = 0;
  std::size_t forbidden = 0;
};

inline SupportStats support_stats(const JointDistribution& dist, Real threshold = 1e-6) {
  if (!(threshold > 0.0))
    throw std::invalid_argument("support_stats: threshold must be positive");
  SupportStats stats;
  for (Real p : dist.probs()) {
    if (p < threshold)
      ++stats.forbidden;
    else
      ++stats.support;
  }
  return stats;
}

namespace detail {

/**
 * Gradient of the intricacy at a point of the simplex, valid on the face
 * spanned by the support: component w is
 *   -2 sum_S c[|S|] log p(w restricted to S) + log p_w - 1,
 * with the S = I term folded into the log p_w coefficient. Entries with
 * p_w = 0 are left at zero and must stay frozen by the caller.
 */
inline std::vector<Real> gradient_on_support(const std::vector<Real>& p, int n, int d,
                                             const CoefficientTable& table) {
  const Mask full = bits::full(n);
  std::vector<Real> grad(p.size(), 0.0);
  const Real c_full = table.at(n);
  for (std::size_t idx = 0; idx < p.size(); ++idx) {
    if (p[idx] > 0.0) grad[idx] = (1.0 - 2.0 * c_full) * std::log(p[idx]) - 1.0;
  }
  std::vector<Real> bins;
  for (Mask m = 1; m < full; ++m) {
    const Real ck = table.at(bits::popcount(m));
    if (ck == 0.0) continue;
    const auto weights = marginal_weights(m, n, d);
    bins.assign(SystemShape(d, bits::popcount(m)).size(), 0.0);
    accumulate_bins(p, n, d, weights, bins);
    for (Real& b : bins) {
      if (b > 0.0) b = std::log(b);
    }
    sweep_bins(p.size(), n, d, weights, [&](std::size_t idx, std::size_t out_idx) {
      if (p[idx] > 0.0) grad[idx] -= 2.0 * ck * bins[out_idx];
    });
  }
  return grad;
}

// Repairs the entropy of a raw law toward x * n log d by mixing with the
// uniform law (entropy too low) or the heaviest point mass (too high);
// bisection on the mixing parameter keeps a sign-changing bracket, so it
// converges for any continuous entropy profile.
inline void adjust_entropy_raw(std::vector<Real>& p, int n, int d, Real x, Real tol) {
  if (x < 0.0 || x > 1.0)
    throw std::invalid_argument("adjust_entropy: target fraction outside [0,1]");
  const Real target = x * static_cast<Real>(n) * std::log(static_cast<Real>(d));
  const Real h0 = entropy_of(p);
  if (std::abs(h0 - target) <= tol) return;
  const bool raise = h0 < target;
  std::vector<Real> other(p.size(), 0.0);
  if (raise) {
    std::fill(other.begin(), other.end(), 1.0 / static_cast<Real>(p.size()));
  } else {
    other[static_cast<std::size_t>(
        std::max_element(p.begin(), p.end()) - p.begin())] = 1.0;
  }
  Real lo = 0.0, hi = 1.0;
  std::vector<Real> candidate(p.size());
  for (int iter = 0; iter < 200; ++iter) {
    const Real mid = (lo + hi) / 2.0;
    for (std::size_t idx = 0; idx < p.size(); ++idx)
      candidate[idx] = (1.0 - mid) * p[idx] + mid * other[idx];
    const Real h = entropy_of(candidate);
    if (std::abs(h - target) <= tol) break;
    if (raise ? (h < target) : (h > target))
      lo = mid;
    else
      hi = mid;
  }
  p = candidate;
}

struct AscentState {
  std::vector<Real> p;
  Real value = 0.0;
  int iterations = 0;
  bool converged = false;
};

// Exponentiated-gradient ascent in log space. Iterates stay exactly on the
// simplex; entries that reach zero stay frozen (no epsilon flooring).
template <class Repair>
inline AscentState ascend(std::vector<Real> start, int n, int d,
                          const CoefficientTable& table, const OptimizerConfig& cfg,
                          Repair&& repair) {
  AscentState state;
  state.p = std::move(start);
  repair(state.p);
  state.value = intricacy_raw(state.p, n, d, table);

  const Real neg_inf = -std::numeric_limits<Real>::infinity();
  std::vector<Real> logits(state.p.size());
  auto refresh_logits = [&](const std::vector<Real>& p) {
    for (std::size_t idx = 0; idx < p.size(); ++idx)
      logits[idx] = p[idx] > 0.0 ? std::log(p[idx]) : neg_inf;
  };
  refresh_logits(state.p);

  std::vector<Real> cand_logits(state.p.size());
  std::vector<Real> cand(state.p.size());
  Real step = cfg.initial_step;
  for (int iter = 1; iter <= cfg.max_iters; ++iter) {
    const auto grad = gradient_on_support(state.p, n, d, table);
    Real grad_mean = 0.0, deviation = 0.0;
    for (std::size_t idx = 0; idx < state.p.size(); ++idx)
      if (state.p[idx] > 0.0) grad_mean += state.p[idx] * grad[idx];
    for (std::size_t idx = 0; idx < state.p.size(); ++idx)
      if (state.p[idx] > 0.0)
        deviation = std::max(deviation, std::abs(grad[idx] - grad_mean));
    if (deviation <= cfg.grad_tol) {
      state.converged = true;
      break;
    }
    state.iterations = iter;

    bool accepted = false;
    while (step >= 1e-12) {
      Real peak = neg_inf;
      for (std::size_t idx = 0; idx < state.p.size(); ++idx) {
        cand_logits[idx] =
            state.p[idx] > 0.0 ? logits[idx] + step * grad[idx] : neg_inf;
        peak = std::max(peak, cand_logits[idx]);
      }
      Real z = 0.0;
      for (Real l : cand_logits)
        if (l != neg_inf) z += std::exp(l - peak);
      const Real log_z = peak + std::log(z);
      for (std::size_t idx = 0; idx < state.p.size(); ++idx)
        cand[idx] = cand_logits[idx] == neg_inf ? 0.0 : std::exp(cand_logits[idx] - log_z);
      repair(cand);
      const Real cand_value = intricacy_raw(cand, n, d, table);
      if (cand_value > state.value) {
        const Real improvement = cand_value - state.value;
        state.p = cand;
        state.value = cand_value;
        refresh_logits(state.p);
        step = std::min(step * 1.5, cfg.initial_step * 64.0);
        accepted = true;
        if (improvement < cfg.value_tol) state.converged = true;
        break;
      }
      step /= 2.0;
    }
    if (!accepted) {
      state.converged = true;
      break;
    }
    if (state.converged) break;
  }
  return state;
}

}  // namespace detail

/**
 * Intricacy gradient at an interior law (the closed form used by the
 * ascent); boundary points are a domain error, use the optimizer for those.
 */
inline std::vector<Real> intricacy_gradient(const JointDistribution& dist,
                                            const CoefficientTable& table) {
  if (table.n() != dist.shape().n())
    throw std::invalid_argument("intricacy_gradient: table size does not match the system");
  for (Real p : dist.probs()) {
    if (p <= 0.0)
      throw std::domain_error("intricacy_gradient: boundary point (zero probability)");
  }
  return detail::gradient_on_support(dist.probs(), dist.shape().n(), dist.shape().d(),
                                     table);
}

/** Entropy repair toward H = x n log d within tol, by bisected interpolation. */
inline JointDistribution adjust_entropy(const JointDistribution& dist, Real x,
                                        Real tol = 1e-9) {
  std::vector<Real> p = dist.probs();
  detail::adjust_entropy_raw(p, dist.shape().n(), dist.shape().d(), x, tol);
  return JointDistribution(dist.shape(), std::move(p));
}

/**
 * Best-of-restarts exponentiated-gradient maximization of the intricacy
 * over the simplex. Warm starts are ascended like any restart but their
 * start value is already a candidate, so the result never falls below a
 * supplied witness. With an entropy target set, every iterate is repaired
 * back into the window before evaluation. Ties within value_tol keep the
 * lowest restart index.
 */
inline OptResult maximize(const SystemShape& shape, const CoefficientTable& table,
                          const OptimizerConfig& cfg,
                          const std::vector<JointDistribution>& warm_starts = {}) {
  if (table.n() != shape.n())
    throw std::invalid_argument("maximize: table size does not match the shape");
  if (cfg.restarts < 1) throw std::invalid_argument("maximize: need at least one restart");
  const int n = shape.n();
  const int d = shape.d();
  const Real full_entropy = static_cast<Real>(n) * std::log(static_cast<Real>(d));

  auto repair = [&](std::vector<Real>& p) {
    if (!cfg.entropy_target_fraction) return;
    if (!(cfg.entropy_tol > 0.0))
      throw std::invalid_argument("maximize: infeasible entropy window");
    detail::adjust_entropy_raw(p, n, d, *cfg.entropy_target_fraction,
                               0.5 * cfg.entropy_tol * full_entropy);
  };

  detail::AscentState best;
  int best_index = -1;
  int index = 0;
  auto consider = [&](detail::AscentState candidate) {
    if (best_index < 0 || candidate.value > best.value + cfg.value_tol) {
      best = std::move(candidate);
      best_index = index;
    }
    ++index;
  };

  for (const JointDistribution& w : warm_starts) {
    if (!(w.shape() == shape))
      throw std::invalid_argument("maximize: warm start shape mismatch");
    consider(detail::ascend(w.probs(), n, d, table, cfg, repair));
  }
  for (int r = 0; r < cfg.restarts; ++r) {
    rng::Stream g(cfg.seed, static_cast<std::uint64_t>(r));
    consider(detail::ascend(rng::dirichlet_flat(g, shape.size()), n, d, table, cfg, repair));
  }

  OptResult result{JointDistribution(shape, std::move(best.p)), 0.0, 0.0,
                   best.iterations, best.converged, best_index};
  result.value = intricacy_exact(result.dist, table);
  result.entropy = entropy(result.dist);
  return result;
}

/** Maximization restricted to laws with H = x n log d (up to the window). */
inline OptResult maximize_with_entropy(const SystemShape& shape,
                                       const CoefficientTable& table, Real x,
                                       const OptimizerConfig& cfg,
                                       const std::vector<JointDistribution>& warm_starts = {}) {
  if (!(x > 0.0 && x < 1.0))
    throw std::invalid_argument("maximize_with_entropy: x must lie in (0,1)");
  if (!(cfg.entropy_tol > 0.0))
    throw std::invalid_argument("maximize_with_entropy: infeasible entropy window");
  OptimizerConfig constrained = cfg;
  constrained.entropy_target_fraction = x;
  return maximize(shape, table, constrained, warm_starts);
}

namespace detail {

// Intricacy of the exchangeable binary system with the given (possibly
// unnormalized) type weights, in prefix-entropy form; costs O(n^3).
inline Real type_weight_value(const std::vector<Real>& q, int n,
                              const CoefficientTable& table) {
  Real qsum = 0.0;
  for (Real w : q) qsum += w;
  std::vector<Real> h(static_cast<std::size_t>(n) + 1, 0.0);
  for (int k = 1; k <= n; ++k) {
    Real hk = 0.0;
    for (int j = 0; j <= k; ++j) {
      Real pj = 0.0;
      for (int total = j; total <= j + (n - k); ++total)
        pj += (q[total] / qsum) * binomial(n - k, total - j) / binomial(n, total);
      if (pj > 0.0) hk -= binomial(k, j) * pj * std::log(pj);
    }
    h[k] = hk;
  }
  Real acc = 0.0;
  for (int k = 1; k <= n; ++k) acc += binomial(n, k) * table.at(k) * h[k];
  return fp::clamp_tiny_negative(2.0 * acc - h[n]);
}

}  // namespace detail

struct TypeWeightResult {
  TypeWeights weights;
  JointDistribution dist;
  Real value = 0.0;
};

/**
 * Maximization of the intricacy over the exchangeable binary family,
 * parametrized by type weights q. Same restart scheme as maximize, with a
 * central finite-difference gradient (the objective has only n+1 degrees
 * of freedom, so differencing is cheap and robust).
 */
inline TypeWeightResult maximize_type_weights(int n, const CoefficientTable& table,
                                              const OptimizerConfig& cfg) {
  if (table.n() != n)
    throw std::invalid_argument("maximize_type_weights: table size does not match n");
  const std::size_t m = static_cast<std::size_t>(n) + 1;
  auto objective = [&](const std::vector<Real>& q) {
    return detail::type_weight_value(q, n, table);
  };

  auto ascend_q = [&](std::vector<Real> q) {
    Real value = objective(q);
    Real step = cfg.initial_step;
    std::vector<Real> grad(m, 0.0), trial(m), cand(m);
    for (int iter = 0; iter < cfg.max_iters; ++iter) {
      for (std::size_t i = 0; i < m; ++i) {
        grad[i] = 0.0;
        if (q[i] <= 0.0) continue;
        const Real h = std::min(1e-6, q[i] / 2.0);
        trial = q;
        trial[i] = q[i] + h;
        const Real up = objective(trial);
        trial[i] = q[i] - h;
        const Real down = objective(trial);
        grad[i] = (up - down) / (2.0 * h);
      }
      Real mean = 0.0, deviation = 0.0;
      for (std::size_t i = 0; i < m; ++i)
        if (q[i] > 0.0) mean += q[i] * grad[i];
      for (std::size_t i = 0; i < m; ++i)
        if (q[i] > 0.0) deviation = std::max(deviation, std::abs(grad[i] - mean));
      if (deviation <= cfg.grad_tol) break;
      bool accepted = false;
      while (step >= 1e-12) {
        Real zsum = 0.0;
        for (std::size_t i = 0; i < m; ++i) {
          cand[i] = q[i] > 0.0 ? q[i] * std::exp(step * grad[i]) : 0.0;
          zsum += cand[i];
        }
        for (Real& v : cand) v /= zsum;
        const Real cand_value = objective(cand);
        if (cand_value > value) {
          const Real improvement = cand_value - value;
          q = cand;
          value = cand_value;
          step = std::min(step * 1.5, cfg.initial_step * 64.0);
          accepted = true;
          if (improvement < cfg.value_tol) break;
        } else {
          step /= 2.0;
        }
        if (accepted) break;
      }
      if (!accepted) break;
    }
    return std::make_pair(std::move(q), value);
  };

  std::vector<std::vector<Real>> starts;
  std::vector<Real> synchronized(m, 0.0);
  synchronized.front() = 0.5;
  synchronized.back() = 0.5;
  starts.push_back(std::move(synchronized));
  std::vector<Real> binomial_weights(m);
  for (int k = 0; k <= n; ++k)
    binomial_weights[k] = binomial(n, k) * std::pow(0.5, n);
  starts.push_back(std::move(binomial_weights));
  std::vector<Real> balanced(m, 0.0);
  balanced[m / 2] = 1.0;
  starts.push_back(std::move(balanced));
  for (int r = 0; r < cfg.restarts; ++r) {
    rng::Stream g(cfg.seed, 0x7177ULL + static_cast<std::uint64_t>(r));
    starts.push_back(rng::dirichlet_flat(g, m));
  }

  std::vector<Real> best_q;
  Real best_value = -1.0;
  for (auto& start : starts) {
    auto [q, value] = ascend_q(std::move(start));
    if (best_q.empty() || value > best_value + cfg.value_tol) {
      best_q = std::move(q);
      best_value = value;
    }
  }

  TypeWeights weights{std::move(best_q)};
  JointDistribution dist = exchangeable_from_type_weights(weights, SystemShape(2, n));
  const Real value = intricacy_exact(dist, table);
  return TypeWeightResult{std::move(weights), std::move(dist), value};
}

}  // namespace intricacy
