#include <catch2/catch_amalgamated.hpp>

#include <algorithm>
#include <cmath>
#include <map>
#include <stdexcept>
#include <vector>

#include "intricacy/coefficients.hpp"
#include "intricacy/engine.hpp"
#include "intricacy/generators.hpp"
#include "intricacy/info.hpp"
#include "intricacy/optimizer.hpp"
#include "intricacy/rng.hpp"
#include "intricacy/system.hpp"

using namespace intricacy;

namespace {

// Entropy-identity objective on raw (possibly unnormalized) weights,
// written with nested div/mod decoding and map-keyed bins so it shares no
// code with the engine.  On the simplex it equals the intricacy; off the
// simplex it is the natural extension whose empty-subset term -W log W
// makes the gradient formula exact.
Real raw_objective(const std::vector<Real>& w, int n, int d, const CoefficientTable& t) {
  Real total = 0.0;
  Real h_full = 0.0;
  for (Mask m = 0; m < (Mask{1} << n); ++m) {
    std::map<std::vector<int>, Real> bins;
    for (std::size_t idx = 0; idx < w.size(); ++idx) {
      std::vector<int> key;
      std::size_t rest = idx;
      for (int i = n - 1; i >= 0; --i) {
        const int digit = static_cast<int>(rest % d);
        rest /= d;
        if (m & (Mask{1} << i)) key.push_back(digit);
      }
      bins[key] += w[idx];
    }
    Real h = 0.0;
    for (const auto& [key, mass] : bins)
      if (mass > 0.0) h -= mass * std::log(mass);
    total += 2.0 * t.at(bits::popcount(m)) * h;
    if (m == bits::full(n)) h_full = h;
  }
  return total - h_full;
}

JointDistribution interior_point(std::uint64_t seed, const SystemShape& shape) {
  rng::Stream g(seed);
  auto p = rng::dirichlet_flat(g, shape.size());
  for (Real& v : p) v = 0.9 * v + 0.1 / shape.size();
  return JointDistribution(shape, std::move(p));
}

}  // namespace

TEST_CASE("gradient matches central finite differences") {
  const Real h = 1e-6;
  for (int trial = 0; trial < 12; ++trial) {
    const int d = (trial % 3 == 2) ? 3 : 2;
    const int n = (d == 3) ? 2 : 2 + (trial % 3);
    const SystemShape shape(d, n);
    const CoefficientTable table =
        build_table(trial % 2 ? LambdaSpec::lebesgue() : LambdaSpec::two_point(0.3), n);
    const auto dist = interior_point(900 + trial, shape);
    const auto grad = intricacy_gradient(dist, table);
    std::vector<Real> w(dist.probs());
    for (std::size_t i = 0; i < w.size(); ++i) {
      const Real keep = w[i];
      w[i] = keep + h;
      const Real up = raw_objective(w, n, d, table);
      w[i] = keep - h;
      const Real down = raw_objective(w, n, d, table);
      w[i] = keep;
      const Real fd = (up - down) / (2.0 * h);
      CHECK(std::abs(fd - grad[i]) / std::max(1.0, std::abs(grad[i])) <= 1e-6);
    }
  }
}

TEST_CASE("gradient at the uniform law is the constant -1") {
  for (const auto& lambda :
       {LambdaSpec::lebesgue(), LambdaSpec::uniform_point(), LambdaSpec::two_point(0.4)}) {
    for (int n = 2; n <= 5; ++n) {
      const SystemShape shape(2, n);
      const JointDistribution uniform(shape,
                                      std::vector<Real>(shape.size(), 1.0 / shape.size()));
      const auto grad = intricacy_gradient(uniform, build_table(lambda, n));
      Real mean = 0.0;
      for (Real g : grad) mean += g / grad.size();
      for (Real g : grad) {
        CHECK(std::abs(g + 1.0) <= 1e-12);
        CHECK(std::abs(g - mean) <= 1e-12);  // projected gradient vanishes
      }
    }
  }
}

TEST_CASE("gradient is constant on exchangeable orbits") {
  rng::Stream g(41);
  const SystemShape shape(2, 4);
  JointDistribution dist(shape, rng::dirichlet_flat(g, shape.size()));
  const auto sym = symmetrize(dist);
  const auto grad = intricacy_gradient(sym, build_table(LambdaSpec::lebesgue(), 4));
  for (std::size_t a = 0; a < grad.size(); ++a)
    for (std::size_t b = 0; b < grad.size(); ++b)
      if (bits::popcount(a) == bits::popcount(b))
        CHECK(std::abs(grad[a] - grad[b]) <= 1e-10);
}

TEST_CASE("gradient needs an interior point") {
  const SystemShape shape(2, 2);
  const JointDistribution boundary(shape, {0.5, 0.5, 0.0, 0.0});
  CHECK_THROWS_AS(intricacy_gradient(boundary, build_table(LambdaSpec::lebesgue(), 2)),
                  std::domain_error);
}

TEST_CASE("adjust entropy hits targets") {
  const SystemShape shape(2, 2);
  const JointDistribution uniform(shape, std::vector<Real>(4, 0.25));
  const auto same = adjust_entropy(uniform, 1.0, 1e-9);
  for (std::size_t i = 0; i < 4; ++i) CHECK(same[i] == uniform[i]);

  const JointDistribution point(shape, {1.0, 0.0, 0.0, 0.0});
  const auto still = adjust_entropy(point, 0.0, 1e-9);
  CHECK(entropy(still) <= 1e-12);

  const JointDistribution sync(shape, {0.5, 0.0, 0.0, 0.5});
  const auto raised = adjust_entropy(sync, 0.75, 1e-9);
  CHECK(std::abs(entropy(raised) - 1.5 * std::log(2.0)) <= 1e-9);

  // independent scalar bisection oracle on the same interpolation family
  Real lo = 0.0, hi = 1.0;
  const Real target = 1.5 * std::log(2.0);
  for (int it = 0; it < 200; ++it) {
    const Real mid = 0.5 * (lo + hi);
    const JointDistribution cand = mix({sync, uniform}, {1.0 - mid, mid});
    (entropy(cand) < target ? lo : hi) = mid;
  }
  const JointDistribution oracle = mix({sync, uniform}, {1.0 - lo, lo});
  CHECK(std::abs(entropy(oracle) - entropy(raised)) <= 1e-8);

  const auto lowered = adjust_entropy(uniform, 0.25, 1e-9);
  CHECK(std::abs(entropy(lowered) - 0.25 * 2.0 * std::log(2.0)) <= 1e-9);

  CHECK_THROWS_AS(adjust_entropy(uniform, 1.5, 1e-9), std::invalid_argument);
  CHECK_THROWS_AS(adjust_entropy(uniform, -0.5, 1e-9), std::invalid_argument);
}

TEST_CASE("maximize recovers the small-system optima") {
  OptimizerConfig cfg;
  cfg.restarts = 6;
  cfg.max_iters = 300;
  cfg.seed = 11;

  const SystemShape s2(2, 2);
  const CoefficientTable t2 = build_table(LambdaSpec::lebesgue(), 2);
  const auto r2 = maximize(s2, t2, cfg, standard_witnesses(s2));
  CHECK(std::abs(r2.value - std::log(2.0) / 3.0) <= 1e-9);
  const auto stats2 = support_stats(r2.dist, 1e-6);
  CHECK(stats2.support == 2);
  CHECK(stats2.forbidden == 2);

  const SystemShape s3(2, 3);
  const CoefficientTable t3 = build_table(LambdaSpec::lebesgue(), 3);
  const auto r3 = maximize(s3, t3, cfg, standard_witnesses(s3));
  CHECK(std::abs(r3.value - std::log(2.0) / 2.0) <= 1e-9);
  CHECK(support_stats(r3.dist, 1e-6).forbidden == 4);

  // stored value is consistent and within the universal bounds
  CHECK(std::abs(r3.value - intricacy_exact(r3.dist, t3)) <= 1e-9);
  CHECK(r3.value <= 1.5 * std::log(2.0) + 1e-9);

  // permutation orbit of a maximizer evaluates identically
  const auto permuted = permute(r3.dist, {1, 2, 0});
  CHECK(std::abs(intricacy_exact(permuted, t3) - r3.value) <= 1e-10);
}

TEST_CASE("maximize dominates its warm starts and is deterministic") {
  const SystemShape shape(2, 4);
  const CoefficientTable table = build_table(LambdaSpec::lebesgue(), 4);
  OptimizerConfig cfg;
  cfg.restarts = 3;
  cfg.max_iters = 150;
  cfg.seed = 4;
  const auto witnesses = standard_witnesses(shape);
  Real best_witness = 0.0;
  for (const auto& w : witnesses)
    best_witness = std::max(best_witness, intricacy_exact(w, table));
  const auto result = maximize(shape, table, cfg, witnesses);
  CHECK(result.value >= best_witness - 1e-12);

  const auto again = maximize(shape, table, cfg, witnesses);
  CHECK(again.value == result.value);
  CHECK(again.restart_index == result.restart_index);
  for (std::size_t i = 0; i < result.dist.size(); ++i)
    CHECK(again.dist[i] == result.dist[i]);

  OptimizerConfig bad = cfg;
  bad.restarts = 0;
  CHECK_THROWS_AS(maximize(shape, table, bad, {}), std::invalid_argument);
}

TEST_CASE("best-found values are empirically super-additive") {
  OptimizerConfig cfg;
  cfg.restarts = 4;
  cfg.max_iters = 250;
  cfg.seed = 21;
  std::map<int, OptResult> best;
  for (int n : {2, 3}) {
    const SystemShape shape(2, n);
    best.emplace(n, maximize(shape, build_table(LambdaSpec::lebesgue(), n), cfg,
                             standard_witnesses(shape)));
  }
  for (const auto [na, nb] : std::vector<std::pair<int, int>>{{2, 2}, {2, 3}}) {
    const int n = na + nb;
    const SystemShape shape(2, n);
    auto warm = standard_witnesses(shape);
    warm.push_back(product(best.at(na).dist, best.at(nb).dist));
    const auto joint =
        maximize(shape, build_table(LambdaSpec::lebesgue(), n), cfg, warm);
    CHECK(joint.value >= best.at(na).value + best.at(nb).value - 1e-6);
  }
}

TEST_CASE("entropy-constrained maximization stays in the window") {
  const SystemShape shape(2, 3);
  const CoefficientTable table = build_table(LambdaSpec::lebesgue(), 3);
  OptimizerConfig cfg;
  cfg.restarts = 4;
  cfg.max_iters = 200;
  cfg.seed = 6;
  const Real kp = kappa(LambdaSpec::lebesgue());
  for (Real x : {0.3, 0.5, 0.7}) {
    const auto result =
        maximize_with_entropy(shape, table, x, cfg, standard_witnesses(shape, x));
    CHECK(std::abs(result.entropy / (3.0 * std::log(2.0)) - x) <= 1e-6);
    const Real witness = intricacy_exact(
        generate(ExampleKind::replicated_pair_chain(x), shape), table);
    CHECK(result.value >= witness - 1e-6);
    CHECK(result.value >= kp * std::min(x, 1.0 - x) * 2.0 * std::log(2.0) - 1e-6);
  }
  CHECK_THROWS_AS(maximize_with_entropy(shape, table, 0.0, cfg, {}),
                  std::invalid_argument);
  CHECK_THROWS_AS(maximize_with_entropy(shape, table, 1.0, cfg, {}),
                  std::invalid_argument);
}

TEST_CASE("type-weight search over exchangeable binary systems") {
  OptimizerConfig cfg;
  cfg.restarts = 6;
  cfg.max_iters = 300;
  cfg.seed = 9;
  const CoefficientTable t2 = build_table(LambdaSpec::lebesgue(), 2);
  const auto r2 = maximize_type_weights(2, t2, cfg);
  CHECK(std::abs(r2.value - std::log(2.0) / 3.0) <= 1e-6);

  const CoefficientTable t5 = build_table(LambdaSpec::lebesgue(), 5);
  const auto r5 = maximize_type_weights(5, t5, cfg);
  CHECK(exchangeability_distance(r5.dist) <= 1e-12);
  CHECK(std::abs(r5.value - intricacy_exact(r5.dist, t5)) <= 1e-9);
  const Real sync_value =
      intricacy_exact(generate(ExampleKind::synchronized_system(), SystemShape(2, 5)), t5);
  CHECK(r5.value >= sync_value - 1e-9);
}

TEST_CASE("support stats partition the state space") {
  const SystemShape shape(2, 3);
  const JointDistribution uniform(shape, std::vector<Real>(8, 0.125));
  const auto stats = support_stats(uniform, 1e-6);
  CHECK(stats.support == 8);
  CHECK(stats.forbidden == 0);
  CHECK_THROWS_AS(support_stats(uniform, 0.0), std::invalid_argument);
}
