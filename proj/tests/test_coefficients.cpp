#include <catch2/catch_amalgamated.hpp>

#include <cmath>
#include <stdexcept>
#include <vector>

#include "intricacy/coefficients.hpp"

using namespace intricacy;

TEST_CASE("binomial is exact up to n = 24") {
  CHECK(binomial(0, 0) == 1.0);
  CHECK(binomial(5, 2) == 10.0);
  CHECK(binomial(24, 12) == 2704156.0);
  for (int n = 1; n <= 24; ++n)
    for (int k = 1; k < n; ++k)
      CHECK(binomial(n, k) == binomial(n - 1, k - 1) + binomial(n - 1, k));
}

TEST_CASE("ets table closed form") {
  const CoefficientTable t3 = build_table(LambdaSpec::lebesgue(), 3);
  CHECK(std::abs(t3.at(0) - 0.25) <= 1e-15);
  CHECK(std::abs(t3.at(1) - 1.0 / 12.0) <= 1e-15);
  CHECK(std::abs(t3.at(2) - 1.0 / 12.0) <= 1e-15);
  CHECK(std::abs(t3.at(3) - 0.25) <= 1e-15);
  for (int n = 1; n <= 20; ++n) {
    const CoefficientTable t = build_table(LambdaSpec::lebesgue(), n);
    for (int k = 0; k <= n; ++k)
      CHECK(std::abs(t.at(k) - 1.0 / ((n + 1) * binomial(n, k))) <= 1e-12);
  }
}

TEST_CASE("uniform point table is 2^-n") {
  for (int n = 1; n <= 16; ++n) {
    const CoefficientTable t = build_table(LambdaSpec::uniform_point(), n);
    for (int k = 0; k <= n; ++k)
      CHECK(std::abs(t.at(k) - std::ldexp(1.0, -n)) <= 1e-15);
  }
}

TEST_CASE("p-symmetric table closed form") {
  const Real p = 0.3, q = 0.7;
  const CoefficientTable t2 = build_table(LambdaSpec::two_point(p), 2);
  CHECK(std::abs(t2.at(0) - 0.29) <= 1e-15);
  CHECK(std::abs(t2.at(1) - 0.21) <= 1e-15);
  CHECK(std::abs(t2.at(2) - 0.29) <= 1e-15);
  for (int n = 1; n <= 12; ++n) {
    const CoefficientTable t = build_table(LambdaSpec::two_point(p), n);
    for (int k = 0; k <= n; ++k) {
      const Real want = 0.5 * (std::pow(p, k) * std::pow(q, n - k) +
                               std::pow(q, k) * std::pow(p, n - k));
      CHECK(std::abs(t.at(k) - want) <= 1e-14);
    }
  }
  CHECK_THROWS_AS(LambdaSpec::two_point(0.0), std::invalid_argument);
  CHECK_THROWS_AS(LambdaSpec::two_point(1.0), std::invalid_argument);
}

TEST_CASE("atomic specs are symmetrized") {
  const LambdaSpec lambda = LambdaSpec::atomic({{0.2, 1.0}});
  const auto atoms = lambda.atoms();
  REQUIRE(atoms.size() == 2);
  CHECK(std::abs(atoms[0].x - 0.2) <= 1e-15);
  CHECK(std::abs(atoms[0].w - 0.5) <= 1e-15);
  CHECK(std::abs(atoms[1].x - 0.8) <= 1e-15);
  CHECK(std::abs(atoms[1].w - 0.5) <= 1e-15);

  // an already symmetric pair collapses to itself
  const LambdaSpec sym = LambdaSpec::atomic({{0.5, 1.0}});
  CHECK(sym.atoms().size() == 1);

  CHECK_THROWS_AS(LambdaSpec::atomic({{1.2, 1.0}}), std::invalid_argument);
  CHECK_THROWS_AS(LambdaSpec::atomic({{0.5, -0.1}, {0.4, 1.1}}), std::invalid_argument);
  CHECK_THROWS_AS(LambdaSpec::atomic({{0.5, 0.7}}), std::invalid_argument);
}

TEST_CASE("table invariants hold for every family") {
  const std::vector<LambdaSpec> lambdas = {
      LambdaSpec::lebesgue(), LambdaSpec::uniform_point(), LambdaSpec::two_point(0.3),
      LambdaSpec::atomic({{0.1, 0.25}, {0.4, 0.25}, {0.6, 0.25}, {0.9, 0.25}})};
  for (const auto& lambda : lambdas) {
    for (int n = 1; n <= 20; ++n) {
      const CoefficientTable t = build_table(lambda, n);
      const auto diag = check_table(t);
      CHECK(diag.ok(1e-12));
      CHECK(diag.symmetry == 0.0);  // symmetry is pinned exactly
      if (n < 20) CHECK(check_projectivity(t, build_table(lambda, n + 1)) <= 1e-12);
    }
  }
}

TEST_CASE("kappa values") {
  CHECK(std::abs(kappa(LambdaSpec::lebesgue()) - 1.0 / 3.0) <= 1e-15);
  CHECK(std::abs(kappa(LambdaSpec::uniform_point()) - 0.5) <= 1e-15);
  CHECK(std::abs(kappa(LambdaSpec::two_point(0.3)) - 2.0 * 0.3 * 0.7) <= 1e-15);
  for (const auto& lambda :
       {LambdaSpec::lebesgue(), LambdaSpec::two_point(0.42),
        LambdaSpec::atomic({{0.25, 0.5}, {0.75, 0.5}})}) {
    CHECK(std::abs(kappa(lambda) - 2.0 * build_table(lambda, 2).at(1)) <= 1e-15);
    CHECK(kappa(lambda) > 0.0);
    CHECK(kappa(lambda) <= 0.5 + 1e-15);
  }
}

TEST_CASE("null spec is detected") {
  const LambdaSpec null_lambda = LambdaSpec::atomic({{0.0, 0.5}, {1.0, 0.5}});
  CHECK(null_lambda.is_null());
  CHECK_THROWS_AS(kappa(null_lambda), std::domain_error);
  const CoefficientTable t = build_table(null_lambda, 4);
  for (int k = 1; k < 4; ++k) CHECK(t.at(k) == 0.0);
  CHECK(std::abs(t.at(0) - 0.5) <= 1e-15);
  CHECK(!LambdaSpec::lebesgue().is_null());
  CHECK(!LambdaSpec::two_point(0.01).is_null());
}

TEST_CASE("moments match the family definitions") {
  // Lebesgue: int x^k (1-x)^m dx = 1/((k+m+1) binom(k+m,k))
  for (int k = 0; k <= 6; ++k)
    for (int m = 0; m <= 6; ++m)
      CHECK(std::abs(LambdaSpec::lebesgue().moment(k, m) -
                     1.0 / ((k + m + 1) * binomial(k + m, k))) <= 1e-15);
  CHECK(std::abs(LambdaSpec::uniform_point().moment(2, 3) - std::ldexp(1.0, -5)) <= 1e-15);
  const Real p = 0.3;
  CHECK(std::abs(LambdaSpec::two_point(p).moment(1, 1) - p * (1 - p)) <= 1e-15);
}

TEST_CASE("broken tables are diagnosed") {
  CHECK(!check_table(CoefficientTable(2, {0.5, -0.1, 0.6})).ok());
  CHECK(check_table(CoefficientTable(2, {0.5, 0.1, 0.3})).symmetry > 0.1);
  CHECK(check_table(CoefficientTable(2, {0.4, 0.05, 0.4})).normalization > 0.01);
  CHECK_THROWS_AS(CoefficientTable(2, {0.5, 0.5}), std::invalid_argument);
}
