#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdint>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "intricacy/coefficients.hpp"
#include "intricacy/engine.hpp"
#include "intricacy/generators.hpp"
#include "intricacy/info.hpp"
#include "intricacy/optimizer.hpp"
#include "intricacy/rng.hpp"
#include "intricacy/system.hpp"

namespace intricacy {

/** Flat Dirichlet law over the whole state space. */
inline JointDistribution random_distribution(rng::Stream& g, const SystemShape& shape) {
  return JointDistribution(shape, rng::dirichlet_flat(g, shape.size()));
}

/** Dirichlet law restricted to a random support (at least one atom kept). */
inline JointDistribution random_sparse_distribution(rng::Stream& g, const SystemShape& shape,
                                                    Real keep_fraction = 0.5) {
  std::vector<Real> p = rng::dirichlet_flat(g, shape.size());
  bool any = false;
  for (Real& v : p) {
    if (g.next_unit() < keep_fraction)
      any = true;
    else
      v = 0.0;
  }
  if (!any) return JointDistribution(shape, std::vector<Real>(shape.size(), 1.0 / shape.size()));
  const Real sum = fp::kahan_sum(p);
  for (Real& v : p) v /= sum;
  return JointDistribution(shape, std::move(p));
}

inline LambdaSpec random_lambda(rng::Stream& g) {
  switch (g.next_u64() % 4) {
    case 0: return LambdaSpec::lebesgue();
    case 1: return LambdaSpec::uniform_point();
    case 2: return LambdaSpec::two_point(0.05 + 0.9 * g.next_unit());
    default: {
      const Real x1 = g.next_unit(), x2 = g.next_unit();
      const Real w = 0.1 + 0.8 * g.next_unit();
      return LambdaSpec::atomic({{x1, w}, {x2, 1.0 - w}});
    }
  }
}

struct VerifyItem {
  std::string name;
  std::size_t cases = 0;
  Real residual = 0.0;
  Real tolerance = 0.0;
  bool pass = false;
};

struct VerifyReport {
  std::string suite;
  std::uint64_t seed = 0;
  std::vector<VerifyItem> items;

  bool all_pass() const {
    for (const auto& item : items)
      if (!item.pass) return false;
    return true;
  }
};

namespace detail {

class ResidualTracker {
 public:
  ResidualTracker(VerifyReport& report, std::string name, Real tolerance)
      : report_(report), item_{std::move(name), 0, 0.0, tolerance, false} {}

  void record(Real violation) {
    ++item_.cases;
    item_.residual = std::max(item_.residual, violation);
  }

  ~ResidualTracker() {
    item_.pass = item_.residual <= item_.tolerance;
    report_.items.push_back(item_);
  }

 private:
  VerifyReport& report_;
  VerifyItem item_;
};

// Image of a 4-coordinate system under per-side merging maps: coordinates
// (0,1) collapse through f and (2,3) through h, yielding a 2-coordinate
// system over the same alphabet.
inline JointDistribution merge_sides(const JointDistribution& dist,
                                     const std::vector<int>& f, const std::vector<int>& h) {
  const int d = dist.shape().d();
  const SystemShape out_shape(d, 2);
  std::vector<Real> q(out_shape.size(), 0.0);
  for (std::size_t idx = 0; idx < dist.size(); ++idx) {
    const auto c = config_of(idx, dist.shape());
    const int a = f[static_cast<std::size_t>(c[0] * d + c[1])];
    const int b = h[static_cast<std::size_t>(c[2] * d + c[3])];
    q[static_cast<std::size_t>(a * d + b)] += dist[idx];
  }
  return JointDistribution(out_shape, std::move(q));
}

inline SubsetMask random_nonempty_proper(rng::Stream& g, int n) {
  const Mask full = bits::full(n);
  Mask m = 0;
  while (m == 0 || m == full) m = g.next_u64() & full;
  return SubsetMask(m, n);
}

}  // namespace detail

/**
 * The appendix inequality battery on random 4-coordinate systems:
 * entropy range, conditional-entropy chain, sub/superadditivity,
 * information monotonicity, and the MI monotonicity/additivity pair.
 */
inline VerifyReport verify_appendix(std::uint64_t seed, int trials = 1000,
                                    Real tol = 1e-10) {
  VerifyReport report{"appendix", seed, {}};
  {
    detail::ResidualTracker orly(report, "entropy-range", tol);
    detail::ResidualTracker coco(report, "conditional-chain", tol);
    detail::ResidualTracker geq(report, "joint-dominates-parts", tol);
    detail::ResidualTracker leq(report, "subadditivity", tol);
    detail::ResidualTracker birge(report, "conditioning-decreases", tol);
    detail::ResidualTracker mono(report, "mi-monotone-under-merging", tol);
    detail::ResidualTracker add(report, "mi-almost-additive", tol);

    for (int trial = 0; trial < trials; ++trial) {
      rng::Stream g(seed, static_cast<std::uint64_t>(trial));
      const int d = 2 + static_cast<int>(g.next_u64() % 2);
      const SystemShape shape(d, 4);
      const JointDistribution dist = (trial % 3 == 0)
                                         ? random_sparse_distribution(g, shape)
                                         : random_distribution(g, shape);
      const Real log_d = std::log(static_cast<Real>(d));

      const auto s = detail::random_nonempty_proper(g, 4);
      orly.record(std::max(-subset_entropy(dist, s),
                           subset_entropy(dist, s) - s.count() * log_d));

      // random disjoint nonempty a, b (and c for the conditioning check)
      const auto split = detail::random_nonempty_proper(g, 4);
      Mask rest = ~split.bits & bits::full(4);
      const SubsetMask a = split;
      const SubsetMask b(rest & (rest - 1) ? rest & (rest - 1) : rest, 4);
      const Mask c_bits = rest & ~b.bits;
      const Real h_ab = conditional_entropy(dist, a, b);
      coco.record(std::max({-h_ab, h_ab - subset_entropy(dist, a),
                            subset_entropy(dist, a) -
                                subset_entropy(dist, SubsetMask(a.bits | b.bits, 4))}));
      geq.record(std::max(subset_entropy(dist, a), subset_entropy(dist, b)) -
                 subset_entropy(dist, SubsetMask(a.bits | b.bits, 4)));
      leq.record(subset_entropy(dist, SubsetMask(a.bits | b.bits, 4)) -
                 subset_entropy(dist, a) - subset_entropy(dist, b));
      if (c_bits) {
        const SubsetMask bc(b.bits | c_bits, 4);
        birge.record(conditional_entropy(dist, a, bc) - conditional_entropy(dist, a, b));
      }

      // merging maps on the sides (0,1) and (2,3)
      std::vector<int> f(static_cast<std::size_t>(d) * d), h(f.size());
      for (auto& v : f) v = static_cast<int>(g.next_u64() % d);
      for (auto& v : h) v = static_cast<int>(g.next_u64() % d);
      const JointDistribution merged = detail::merge_sides(dist, f, h);
      const Real mi_pair = mutual_information(dist, SubsetMask(0b0011, 4));
      mono.record(mutual_information(merged, SubsetMask(0b01, 2)) - mi_pair);

      // coordinates read as (X, Y, X', Y'): cross-block MI vs the block sum
      const Real mi_xx = mutual_information(marginal(dist, SubsetMask(0b0101, 4)),
                                            SubsetMask(0b01, 2));
      const Real mi_yy = mutual_information(marginal(dist, SubsetMask(0b1010, 4)),
                                            SubsetMask(0b01, 2));
      const Real mi_hat = mutual_information(dist, SubsetMask(0b0101, 4));
      add.record(std::abs(mi_pair - mi_xx - mi_yy) - mi_hat);
    }
  }
  return report;
}

/** Coefficient-table invariants, closed forms, and projectivity. */
inline VerifyReport verify_coefficients(std::uint64_t seed, int max_n = 20,
                                        Real tol = 1e-12) {
  VerifyReport report{"coefficients", seed, {}};
  rng::Stream g(seed, 0);
  std::vector<LambdaSpec> lambdas = {
      LambdaSpec::lebesgue(), LambdaSpec::uniform_point(), LambdaSpec::two_point(0.3),
      random_lambda(g), LambdaSpec::atomic({{0.2, 0.5}, {0.8, 0.5}})};
  {
    detail::ResidualTracker closed(report, "ets-closed-form", tol);
    detail::ResidualTracker invariants(report, "table-invariants", tol);
    detail::ResidualTracker projectivity(report, "projectivity", tol);
    detail::ResidualTracker kappa_id(report, "kappa-identity", tol);
    detail::ResidualTracker nullity(report, "non-nullity", tol);

    for (int n = 1; n <= max_n; ++n) {
      const CoefficientTable ets = build_table(LambdaSpec::lebesgue(), n);
      for (int k = 0; k <= n; ++k)
        closed.record(std::abs(ets.at(k) -
                               1.0 / (static_cast<Real>(n + 1) * binomial(n, k))));
    }
    for (const auto& lambda : lambdas) {
      kappa_id.record(std::abs(kappa(lambda) - 2.0 * build_table(lambda, 2).at(1)));
      for (int n = 1; n <= max_n; ++n) {
        const CoefficientTable table = build_table(lambda, n);
        const auto diag = check_table(table);
        invariants.record(std::max({diag.negativity, diag.symmetry, diag.normalization}));
        if (n < max_n)
          projectivity.record(check_projectivity(table, build_table(lambda, n + 1)));
        if (n >= 2) {
          Real interior_min = table.at(1), interior_max = 0.0;
          for (int k = 1; k < n; ++k) {
            interior_min = std::min(interior_min, table.at(k));
            interior_max = std::max(interior_max, table.at(k));
          }
          nullity.record(lambda.is_null() ? interior_max
                                          : (interior_min > 0.0 ? 0.0 : 1.0));
        }
      }
    }
    const LambdaSpec null_lambda = LambdaSpec::atomic({{0.0, 0.5}, {1.0, 0.5}});
    for (int n = 2; n <= 6; ++n) {
      const CoefficientTable table = build_table(null_lambda, n);
      Real interior_max = 0.0;
      for (int k = 1; k < n; ++k) interior_max = std::max(interior_max, table.at(k));
      nullity.record(interior_max);
    }
  }
  return report;
}

/** Weak additivity, the MI-bounded residual on correlated pairs, mixtures. */
inline VerifyReport verify_additivity(std::uint64_t seed, int trials = 100,
                                      Real tol = 1e-9) {
  VerifyReport report{"additivity", seed, {}};
  {
    detail::ResidualTracker weak(report, "weak-additivity", tol);
    detail::ResidualTracker approx(report, "mi-bounded-residual", tol);
    detail::ResidualTracker mono(report, "joint-dominates", tol);
    detail::ResidualTracker mixture(report, "mixture-window", tol);

    for (int trial = 0; trial < trials; ++trial) {
      rng::Stream g(seed, 0x0add ^ static_cast<std::uint64_t>(trial));
      const int d = 2 + static_cast<int>(g.next_u64() % 2);
      const int na = 1 + static_cast<int>(g.next_u64() % 3);
      const int nb = 1 + static_cast<int>(g.next_u64() % 3);
      const LambdaSpec lambda = random_lambda(g);
      const CoefficientTable ta = build_table(lambda, na);
      const CoefficientTable tb = build_table(lambda, nb);
      const CoefficientTable tab = build_table(lambda, na + nb);

      const auto a = random_distribution(g, SystemShape(d, na));
      const auto b = random_distribution(g, SystemShape(d, nb));
      weak.record(std::abs(intricacy_exact(product(a, b), tab) -
                           intricacy_exact(a, ta) - intricacy_exact(b, tb)));

      const auto joint = random_distribution(g, SystemShape(d, na + nb));
      const SubsetMask block_a(bits::full(na), na + nb);
      const Real i_joint = intricacy_exact(joint, tab);
      const Real i_a = intricacy_exact(marginal(joint, block_a), ta);
      const Real i_b = intricacy_exact(marginal(joint, block_a.complement()), tb);
      const Real mi_blocks = mutual_information(joint, block_a);
      approx.record(std::abs(i_joint - i_a - i_b) - mi_blocks);
      mono.record(std::max(i_a, i_b) - i_joint);

      const int r = 2 + static_cast<int>(g.next_u64() % 2);
      const SystemShape mix_shape(d, 2 + static_cast<int>(g.next_u64() % 2));
      const CoefficientTable tmix = build_table(lambda, mix_shape.n());
      std::vector<JointDistribution> parts;
      for (int u = 0; u < r; ++u) parts.push_back(random_distribution(g, mix_shape));
      const auto wts = rng::dirichlet_flat(g, static_cast<std::size_t>(r));
      Real avg = 0.0;
      for (int u = 0; u < r; ++u) avg += wts[u] * intricacy_exact(parts[u], tmix);
      const Real gap = intricacy_exact(mix(parts, wts), tmix) - avg;
      const Real log_r = std::log(static_cast<Real>(r));
      mixture.record(std::max(-log_r - gap, gap - 2.0 * log_r));
    }
  }
  return report;
}

/** Value bounds, the zero characterization, and the max-value sandwich. */
inline VerifyReport verify_bounds(std::uint64_t seed, int trials = 50) {
  VerifyReport report{"bounds", seed, {}};
  {
    detail::ResidualTracker range(report, "value-range", 1e-9);
    detail::ResidualTracker zero_products(report, "independent-systems-score-zero", 1e-10);
    detail::ResidualTracker zero_converse(report, "near-zero-implies-product", 1e-6);

    for (int trial = 0; trial < trials; ++trial) {
      rng::Stream g(seed, 0xb0b ^ static_cast<std::uint64_t>(trial));
      const int d = 2 + static_cast<int>(g.next_u64() % 2);
      const int n = 2 + static_cast<int>(g.next_u64() % 4);
      const LambdaSpec lambda = random_lambda(g);
      const CoefficientTable table = build_table(lambda, n);
      const auto dist = (trial % 2 == 0) ? random_distribution(g, SystemShape(d, n))
                                         : random_sparse_distribution(g, SystemShape(d, n));
      const Real value = intricacy_exact(dist, table);
      range.record(std::max(-value,
                            value - 0.5 * n * std::log(static_cast<Real>(d)) - 1e-12));

      JointDistribution prod = random_distribution(g, SystemShape(d, 1));
      for (int i = 1; i < n; ++i)
        prod = product(prod, random_distribution(g, SystemShape(d, 1)));
      zero_products.record(intricacy_exact(prod, table));

      // any system scoring ~0 on a non-null table must factor over the
      // coordinates; checked entrywise against the product of marginals
      const std::array<const JointDistribution*, 2> candidates{&dist, &prod};
      for (const JointDistribution* cand : candidates) {
        if (intricacy_exact(*cand, table) > 1e-10) continue;
        if (lambda.is_null()) continue;
        JointDistribution factored = marginal(*cand, SubsetMask(1, n));
        for (int i = 1; i < n; ++i)
          factored = product(factored, marginal(*cand, SubsetMask(Mask{1} << i, n)));
        Real worst = 0.0;
        for (std::size_t idx = 0; idx < cand->size(); ++idx)
          worst = std::max(worst, std::abs((*cand)[idx] - factored[idx]));
        zero_converse.record(worst);
      }
    }

    detail::ResidualTracker sandwich(report, "max-value-sandwich", 1e-9);
    detail::ResidualTracker entropy_sandwich(report, "entropy-constrained-lower-bound", 1e-9);
    const Real kappa_ets = kappa(LambdaSpec::lebesgue());
    OptimizerConfig cfg;
    cfg.restarts = 4;
    cfg.max_iters = 200;
    cfg.seed = seed;
    for (int n = 2; n <= 4; ++n) {
      const SystemShape shape(2, n);
      const CoefficientTable table = build_table(LambdaSpec::lebesgue(), n);
      const Real log2 = std::log(2.0);
      const auto result = maximize(shape, table, cfg, standard_witnesses(shape));
      sandwich.record(std::max(
          (kappa_ets / 2.0) * (n - 1) * log2 - 1e-6 - result.value,
          result.value - 0.5 * n * log2 - 1e-9));
      const auto constrained =
          maximize_with_entropy(shape, table, 0.5, cfg, standard_witnesses(shape, 0.5));
      entropy_sandwich.record(kappa_ets * 0.5 * (n - 1) * log2 - 1e-6 - constrained.value);
    }
  }
  return report;
}

/** Every closed-form example value the generators promise. */
inline VerifyReport verify_oracles(std::uint64_t seed) {
  VerifyReport report{"oracles", seed, {}};
  const Real log2 = std::log(2.0);
  {
    detail::ResidualTracker flat(report, "independent-and-deterministic-zero", 1e-9);
    detail::ResidualTracker sync(report, "synchronized-value", 1e-9);
    detail::ResidualTracker chain_u(report, "chain-uniform-value", 1e-9);
    detail::ResidualTracker chain_e(report, "chain-ets-value", 1e-9);
    detail::ResidualTracker sync_sub(report, "synchronized-subsystem-profile", 1e-9);
    detail::ResidualTracker pair(report, "entropy-pair", 1e-9);
    detail::ResidualTracker small(report, "small-system-maximizers", 1e-9);
    detail::ResidualTracker replicated(report, "replicated-pair-lower-bound", 1e-9);

    for (int n = 2; n <= 8; ++n) {
      const SystemShape shape(2, n);
      const CoefficientTable ets = build_table(LambdaSpec::lebesgue(), n);
      const CoefficientTable uni = build_table(LambdaSpec::uniform_point(), n);
      flat.record(std::abs(intricacy_exact(generate(ExampleKind::iid_uniform(), shape), ets)));
      flat.record(std::abs(intricacy_exact(generate(ExampleKind::point_mass(), shape), uni)));
      const Real sync_value =
          intricacy_exact(generate(ExampleKind::synchronized_system(), shape), ets);
      sync.record(std::abs(sync_value - (1.0 - 2.0 / (n + 1)) * log2));

      const SystemShape chain_shape(4, n);
      const auto chain = generate(ExampleKind::chain_pair(), chain_shape);
      chain_u.record(std::abs(intricacy_exact(chain, build_table(LambdaSpec::uniform_point(), n)) -
                              0.25 * (n - 1) * std::log(4.0)));
      chain_e.record(std::abs(intricacy_exact(chain, build_table(LambdaSpec::lebesgue(), n)) -
                              (1.0 / 6.0) * (n - 1) * std::log(4.0)));
    }

    {
      const SystemShape shape(2, 4);
      const Mask k = 0b0011;
      const auto dist = generate(ExampleKind::synchronized_subsystem(k), shape);
      const auto profile = mi_profile(dist);
      for (Mask m = 1; m < bits::full(4); ++m) {
        const bool splits = (m & k) && ((~m & bits::full(4)) & k);
        sync_sub.record(std::abs(profile.at(m) - (splits ? log2 : 0.0)));
      }
    }

    for (int d : {2, 3}) {
      const Real log_d = std::log(static_cast<Real>(d));
      const SystemShape shape(d, 2);
      const CoefficientTable ets2 = build_table(LambdaSpec::lebesgue(), 2);
      for (Real x : {0.1, 0.25, 0.5, 0.75, 0.9}) {
        const auto dist = generate(ExampleKind::entropy_pair(x), shape);
        pair.record(std::abs(entropy(dist) - x * 2.0 * log_d));
        pair.record(std::abs(intricacy_exact(dist, ets2) -
                             2.0 * kappa(LambdaSpec::lebesgue()) * std::min(x, 1.0 - x) *
                                 log_d));
      }
      small.record(std::abs(intricacy_exact(generate(ExampleKind::n2_permutation(), shape),
                                            ets2) -
                            log_d / 3.0));
      small.record(std::abs(intricacy_exact(generate(ExampleKind::n3_xor(), SystemShape(d, 3)),
                                            build_table(LambdaSpec::lebesgue(), 3)) -
                            log_d / 2.0));
    }

    for (int n : {4, 5}) {
      const SystemShape shape(2, n);
      const CoefficientTable ets = build_table(LambdaSpec::lebesgue(), n);
      for (Real x : {0.3, 0.5}) {
        const auto dist = generate(ExampleKind::replicated_pair_chain(x), shape);
        const Real bound =
            kappa(LambdaSpec::lebesgue()) * std::min(x, 1.0 - x) * (n - 1) * log2;
        replicated.record(bound - 1e-9 - intricacy_exact(dist, ets));
      }
    }
  }
  return report;
}

inline std::vector<VerifyReport> verify_suites(const std::string& selector,
                                               std::uint64_t seed, int trials = 0,
                                               Real tolerance = 0.0) {
  std::vector<VerifyReport> reports;
  const bool all = selector == "all";
  if (all || selector == "appendix")
    reports.push_back(verify_appendix(seed, trials > 0 ? trials : 1000,
                                      tolerance > 0.0 ? tolerance : 1e-10));
  if (all || selector == "coefficients")
    reports.push_back(verify_coefficients(seed, 20, tolerance > 0.0 ? tolerance : 1e-12));
  if (all || selector == "additivity")
    reports.push_back(verify_additivity(seed, trials > 0 ? trials : 100,
                                        tolerance > 0.0 ? tolerance : 1e-9));
  if (all || selector == "bounds")
    reports.push_back(verify_bounds(seed, trials > 0 ? trials : 50));
  if (all || selector == "oracles") reports.push_back(verify_oracles(seed));
  if (reports.empty())
    throw std::invalid_argument("verify: unknown suite '" + selector + "'");
  return reports;
}

}  // namespace intricacy
