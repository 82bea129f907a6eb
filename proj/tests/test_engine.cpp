#include <catch2/catch_amalgamated.hpp>

#include <cmath>
#include <cstdint>
#include <stdexcept>
#include <vector>

#include "intricacy/coefficients.hpp"
#include "intricacy/engine.hpp"
#include "intricacy/generators.hpp"
#include "intricacy/info.hpp"
#include "intricacy/rng.hpp"
#include "intricacy/system.hpp"

using namespace intricacy;

namespace {

JointDistribution random_dist(std::uint64_t seed, const SystemShape& shape) {
  rng::Stream g(seed);
  return JointDistribution(shape, rng::dirichlet_flat(g, shape.size()));
}

}  // namespace

TEST_CASE("subset entropy table matches per-mask marginals") {
  const SystemShape shape(3, 4);
  const auto dist = random_dist(101, shape);
  const auto table = subset_entropies(dist);
  REQUIRE(table.size() == 16);
  for (Mask m = 0; m <= bits::full(4); ++m)
    CHECK(std::abs(table[m] - subset_entropy(dist, SubsetMask(m, 4))) <= 1e-12);
}

TEST_CASE("mi profile is complement-symmetric with zero endpoints") {
  const auto dist = random_dist(102, SystemShape(2, 5));
  const auto profile = mi_profile(dist);
  CHECK(profile.at(0) == 0.0);
  CHECK(profile.at(bits::full(5)) == 0.0);
  for (Mask m = 1; m < bits::full(5); ++m) {
    CHECK(profile.at(m) == profile.at(~m & bits::full(5)));
    CHECK(profile.at(m) >= 0.0);
    CHECK(std::abs(profile.at(m) - mutual_information(dist, SubsetMask(m, 5))) <= 1e-12);
  }
}

TEST_CASE("exact and entropy-identity paths agree") {
  int case_id = 0;
  for (int d : {2, 3}) {
    for (int n = 2; n <= 5; ++n) {
      const SystemShape shape(d, n);
      for (const auto& lambda :
           {LambdaSpec::lebesgue(), LambdaSpec::uniform_point(), LambdaSpec::two_point(0.3)}) {
        const CoefficientTable table = build_table(lambda, n);
        const auto dist = random_dist(200 + case_id++, shape);
        CHECK(std::abs(intricacy_exact(dist, table) -
                       intricacy_via_entropies(dist, table)) <= 1e-12);
      }
    }
  }
}

TEST_CASE("exchangeable fast path") {
  const SystemShape shape(2, 6);
  const auto raw = random_dist(300, shape);
  const auto sym = symmetrize(raw);
  const CoefficientTable table = build_table(LambdaSpec::lebesgue(), 6);
  CHECK(std::abs(intricacy_exchangeable(sym, table) - intricacy_exact(sym, table)) <= 1e-11);
  CHECK_THROWS_AS(intricacy_exchangeable(raw, table), std::invalid_argument);
}

TEST_CASE("chain system per-mask combinatorics") {
  // digits pair adjacent uniform sources, so a bipartition's information is
  // carried entirely by its boundary edges; checked against a bit-twiddling
  // count of boundaries and one-zero steps
  const int n = 5;
  const SystemShape shape(4, n);
  const auto dist = generate(ExampleKind::chain_pair(), shape);
  const Real logb = std::log(2.0);
  const auto entropies = subset_entropies(dist);
  const auto profile = mi_profile(dist);
  const Mask adj = bits::full(n - 1);
  CHECK(std::abs(entropies[bits::full(n)] - n * logb) <= 1e-12);
  for (Mask m = 1; m < bits::full(n); ++m) {
    const int boundary = bits::popcount((m ^ (m >> 1)) & adj);
    const int one_zero_steps = bits::popcount(m & ~(m >> 1) & adj);
    const int size = bits::popcount(m);
    CHECK(std::abs(entropies[m] - (size + one_zero_steps) * logb) <= 1e-12);
    CHECK(std::abs(profile.at(m) - boundary * logb) <= 1e-12);
  }
}

TEST_CASE("synchronized subsystem mi rule") {
  const int n = 5;
  const SystemShape shape(3, n);
  const Mask k = 0b01010;
  const auto dist = generate(ExampleKind::synchronized_subsystem(k), shape);
  const auto profile = mi_profile(dist);
  const auto entropies = subset_entropies(dist);
  const Real log_d = std::log(3.0);
  for (Mask m = 1; m < bits::full(n); ++m) {
    const bool splits = (m & k) && ((~m & bits::full(n)) & k);
    CHECK(std::abs(profile.at(m) - (splits ? log_d : 0.0)) <= 1e-12);
    const int outside = bits::popcount(m & ~k);
    const int touches = (m & k) ? 1 : 0;
    CHECK(std::abs(entropies[m] - (outside + touches) * log_d) <= 1e-12);
  }
}

TEST_CASE("monte carlo estimates with reproducible streams") {
  const SystemShape shape(2, 5);
  const auto dist = generate(ExampleKind::synchronized_system(), shape);
  const LambdaSpec lambda = LambdaSpec::lebesgue();
  const CoefficientTable table = build_table(lambda, 5);
  const Real exact = intricacy_exact(dist, table);

  const MCEstimate est = intricacy_mc(dist, lambda, 40000, 17);
  CHECK(est.samples == 40000);
  CHECK(est.std_error > 0.0);
  CHECK(std::abs(est.mean - exact) <= 4.0 * est.std_error);

  const MCEstimate again = intricacy_mc(dist, lambda, 40000, 17);
  CHECK(again.mean == est.mean);
  CHECK(again.std_error == est.std_error);

  const MCEstimate other = intricacy_mc(dist, lambda, 40000, 18);
  CHECK(other.mean != est.mean);

  CHECK_THROWS_AS(intricacy_mc(dist, lambda, 1, 0), std::invalid_argument);
}

TEST_CASE("monte carlo on the lazy entropy cache") {
  // shape too large for a precomputed profile; an independent system keeps
  // every sampled bipartition information at zero up to summation roundoff
  const SystemShape shape(2, 21);
  const JointDistribution dist(shape,
                               std::vector<Real>(shape.size(), 1.0 / shape.size()));
  const MCEstimate est = intricacy_mc(dist, LambdaSpec::uniform_point(), 60, 3);
  CHECK(std::abs(est.mean) <= 1e-8);
  CHECK(est.std_error <= 1e-8);
}

TEST_CASE("monte carlo tracks non-ets sampling measures") {
  const SystemShape shape(2, 4);
  const auto dist = random_dist(400, shape);
  for (const auto& lambda : {LambdaSpec::uniform_point(), LambdaSpec::two_point(0.25)}) {
    const CoefficientTable table = build_table(lambda, 4);
    const Real exact = intricacy_exact(dist, table);
    const MCEstimate est = intricacy_mc(dist, lambda, 60000, 5);
    CHECK(std::abs(est.mean - exact) <= 4.0 * est.std_error + 1e-12);
  }
}

TEST_CASE("identity between pair sum and entropy sum") {
  // 2 sum_S c_S H(S) - H equals the bipartition average term by term
  const auto dist = random_dist(500, SystemShape(3, 3));
  const CoefficientTable table = build_table(LambdaSpec::two_point(0.4), 3);
  const auto profile = mi_profile(dist);
  Real pair_sum = 0.0;
  for (Mask m = 0; m <= bits::full(3); ++m)
    pair_sum += table.at(bits::popcount(m)) * profile.at(m);
  CHECK(std::abs(pair_sum - intricacy_exact(dist, table)) <= 1e-12);
}

TEST_CASE("value bounds on random systems") {
  for (int trial = 0; trial < 25; ++trial) {
    const int d = 2 + (trial % 2);
    const int n = 2 + (trial % 4);
    const auto dist = random_dist(600 + trial, SystemShape(d, n));
    const CoefficientTable table = build_table(LambdaSpec::lebesgue(), n);
    const Real value = intricacy_exact(dist, table);
    CHECK(value >= 0.0);
    CHECK(value <= 0.5 * n * std::log(static_cast<Real>(d)) + 1e-12);
  }
}
