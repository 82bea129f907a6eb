#pragma once

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "intricacy/rng.hpp"
#include "intricacy/system.hpp"

namespace intricacy {

/** binom(n, k), exact in double precision for n <= 24. */
inline Real binomial(int n, int k) {
  if (k < 0 || k > n) return 0.0;
  k = std::min(k, n - k);
  Real r = 1.0;
  for (int i = 1; i <= k; ++i) r = r * static_cast<Real>(n - k + i) / static_cast<Real>(i);
  return r;
}

struct Atom {
  Real x;
  Real w;
};

/**
 * Symmetric probability measure on [0,1] generating a coefficient system
 * via c^n_k = integral of x^k (1-x)^(n-k).
 *
 * Supported families: Lebesgue measure (the Edelman-Sporns-Tononi weights),
 * the point mass at 1/2 (uniform weights 2^-n), the symmetric two-point
 * measure (p-symmetric weights), and finite atomic mixtures. Atomic input
 * is auto-symmetrized: the spec is replaced by half of itself plus half of
 * its reflection under x -> 1-x.
 */
class LambdaSpec {
 public:
  enum class Family { Lebesgue, UniformPoint, TwoPoint, Atomic };

  static LambdaSpec lebesgue() { return LambdaSpec(Family::Lebesgue, {}, 0.0); }

  static LambdaSpec uniform_point() {
    return LambdaSpec(Family::UniformPoint, {{0.5, 1.0}}, 0.5);
  }

  static LambdaSpec two_point(Real p) {
    if (!(p > 0.0 && p < 1.0))
      throw std::invalid_argument("LambdaSpec: p must lie in (0,1)");
    return LambdaSpec(Family::TwoPoint, symmetrized({{p, 1.0}}), p);
  }

  static LambdaSpec atomic(std::vector<Atom> atoms) {
    if (atoms.empty()) throw std::invalid_argument("LambdaSpec: no atoms");
    Real wsum = 0.0;
    for (const Atom& a : atoms) {
      if (a.x < 0.0 || a.x > 1.0)
        throw std::invalid_argument("LambdaSpec: atom outside [0,1]");
      if (a.w < 0.0) throw std::invalid_argument("LambdaSpec: negative atom weight");
      wsum += a.w;
    }
    if (std::abs(wsum - 1.0) > kSumTol)
      throw std::invalid_argument("LambdaSpec: atom weights do not sum to 1");
    return LambdaSpec(Family::Atomic, symmetrized(std::move(atoms)), 0.0);
  }

  Family family() const { return family_; }

  std::string family_name() const {
    switch (family_) {
      case Family::Lebesgue: return "ets";
      case Family::UniformPoint: return "uniform";
      case Family::TwoPoint: return "p-symmetric";
      case Family::Atomic: return "atomic";
    }
    return "unknown";
  }

  /** Two-point parameter; meaningful for the p-symmetric family only. */
  Real p() const { return p_; }

  /** Atom list (empty for Lebesgue), sorted by position. */
  const std::vector<Atom>& atoms() const { return atoms_; }

  /** integral of x^k (1-x)^m against the measure. */
  Real moment(int k, int m) const {
    if (k < 0 || m < 0) throw std::invalid_argument("LambdaSpec: negative moment order");
    if (family_ == Family::Lebesgue)
      return 1.0 / (static_cast<Real>(k + m + 1) * binomial(k + m, k));
    Real acc = 0.0;
    for (const Atom& a : atoms_)
      acc += a.w * std::pow(a.x, k) * std::pow(1.0 - a.x, m);
    return acc;
  }

  /** True when all mass sits on {0,1}, i.e. the coefficients are degenerate. */
  bool is_null() const {
    if (family_ == Family::Lebesgue) return false;
    for (const Atom& a : atoms_)
      if (a.x > 0.0 && a.x < 1.0 && a.w > 0.0) return false;
    return true;
  }

  /** Draw W from the measure (inverse CDF over the sorted atoms). */
  Real sample(rng::Stream& g) const {
    if (family_ == Family::Lebesgue) return g.next_unit();
    const Real u = g.next_unit();
    Real cum = 0.0;
    for (const Atom& a : atoms_) {
      cum += a.w;
      if (u < cum) return a.x;
    }
    return atoms_.back().x;
  }

 private:
  LambdaSpec(Family f, std::vector<Atom> atoms, Real p)
      : family_(f), atoms_(std::move(atoms)), p_(p) {}

  static std::vector<Atom> symmetrized(std::vector<Atom> atoms) {
    std::vector<Atom> sym;
    sym.reserve(2 * atoms.size());
    for (const Atom& a : atoms) {
      sym.push_back({a.x, a.w / 2.0});
      sym.push_back({1.0 - a.x, a.w / 2.0});
    }
    std::sort(sym.begin(), sym.end(), [](const Atom& a, const Atom& b) { return a.x < b.x; });
    std::vector<Atom> merged;
    for (const Atom& a : sym) {
      if (!merged.empty() && std::abs(merged.back().x - a.x) <= 1e-12)
        merged.back().w += a.w;
      else
        merged.push_back(a);
    }
    return merged;
  }

  Family family_;
  std::vector<Atom> atoms_;
  Real p_;
};

/**
 * Size-indexed intricacy coefficients: c[k] is the weight of any subset of
 * size k in a system of n variables. Construction checks only the vector
 * length; check_table reports the invariant residuals, so deliberately
 * broken tables can be built for diagnostics.
 */
class CoefficientTable {
 public:
  CoefficientTable(int n, std::vector<Real> c) : n_(n), c_(std::move(c)) {
    if (n < 1) throw std::invalid_argument("CoefficientTable: need n >= 1");
    if (c_.size() != static_cast<std::size_t>(n) + 1)
      throw std::invalid_argument("CoefficientTable: expected n+1 values");
  }

  int n() const { return n_; }
  Real at(int k) const { return c_.at(static_cast<std::size_t>(k)); }
  const std::vector<Real>& values() const { return c_; }

 private:
  int n_;
  std::vector<Real> c_;
};

inline CoefficientTable build_table(const LambdaSpec& lambda, int n) {
  if (n < 1) throw std::invalid_argument("build_table: need n >= 1");
  std::vector<Real> c(static_cast<std::size_t>(n) + 1);
  for (int k = 0; k <= n; ++k) c[k] = lambda.moment(k, n - k);
  // the measure is symmetric, so pin c[k] = c[n-k] exactly
  for (int k = 0; 2 * k <= n; ++k) {
    const Real avg = (c[k] + c[n - k]) / 2.0;
    c[k] = c[n - k] = avg;
  }
  return CoefficientTable(n, std::move(c));
}

/** kappa = 2 integral of x(1-x); throws on null measures. */
inline Real kappa(const LambdaSpec& lambda) {
  const Real value = 2.0 * lambda.moment(1, 1);
  if (!(value > 0.0))
    throw std::domain_error("kappa: null intricacy (no mass on the open interval)");
  return value;
}

/** Residuals of the three coefficient-table invariants. */
struct TableDiagnostics {
  Real negativity = 0.0;     // worst max(0, -c[k])
  Real symmetry = 0.0;       // max |c[k] - c[n-k]|
  Real normalization = 0.0;  // |sum_k binom(n,k) c[k] - 1|

  bool ok(Real tol = kSumTol) const {
    return negativity <= tol && symmetry <= tol && normalization <= tol;
  }
};

inline TableDiagnostics check_table(const CoefficientTable& table) {
  TableDiagnostics diag;
  const int n = table.n();
  Real weighted = 0.0;
  for (int k = 0; k <= n; ++k) {
    diag.negativity = std::max(diag.negativity, -table.at(k));
    diag.symmetry = std::max(diag.symmetry, std::abs(table.at(k) - table.at(n - k)));
    weighted += binomial(n, k) * table.at(k);
  }
  diag.normalization = std::abs(weighted - 1.0);
  return diag;
}

/** Max residual of c^n_k = c^(n+1)_k + c^(n+1)_(k+1) across k. */
inline Real check_projectivity(const CoefficientTable& t_n, const CoefficientTable& t_n1) {
  if (t_n1.n() != t_n.n() + 1)
    throw std::invalid_argument("check_projectivity: tables must have consecutive sizes");
  Real worst = 0.0;
  for (int k = 0; k <= t_n.n(); ++k)
    worst = std::max(worst, std::abs(t_n.at(k) - t_n1.at(k) - t_n1.at(k + 1)));
  return worst;
}

}  // namespace intricacy
