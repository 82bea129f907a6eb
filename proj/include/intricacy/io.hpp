#pragma once

#include <cmath>
#include <fstream>
#include <sstream>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include <json.hpp>

#include "intricacy/coefficients.hpp"
#include "intricacy/engine.hpp"
#include "intricacy/optimizer.hpp"
#include "intricacy/system.hpp"

namespace intricacy::io {

using nlohmann::json;

/**
 * System file schema: {"d": int, "n": int, "p": [d^n probabilities]} with
 * the fixed coordinate-0-most-significant index order. nlohmann serializes
 * doubles with shortest round-trip precision, so save/load reproduces every
 * probability bit-exactly.
 */
inline json system_to_json(const JointDistribution& dist) {
  json j;
  j["d"] = dist.shape().d();
  j["n"] = dist.shape().n();
  j["p"] = dist.probs();
  return j;
}

inline JointDistribution system_from_json(const json& j) {
  if (!j.contains("d") || !j["d"].is_number_integer())
    throw std::runtime_error("system file: field 'd' missing or not an integer");
  if (!j.contains("n") || !j["n"].is_number_integer())
    throw std::runtime_error("system file: field 'n' missing or not an integer");
  const int d = j["d"].get<int>();
  const int n = j["n"].get<int>();
  if (d < 2) throw std::runtime_error("system file: field 'd' must be at least 2");
  if (n < 1 || n > SystemShape::kMaxVars)
    throw std::runtime_error("system file: field 'n' out of range");
  const SystemShape shape(d, n);
  if (!j.contains("p") || !j["p"].is_array())
    throw std::runtime_error("system file: field 'p' missing or not an array");
  std::vector<Real> p;
  p.reserve(shape.size());
  for (const auto& v : j["p"]) {
    if (!v.is_number()) throw std::runtime_error("system file: field 'p' has a non-number");
    p.push_back(v.get<Real>());
  }
  if (p.size() != shape.size()) {
    std::ostringstream msg;
    msg << "system file: field 'p' has " << p.size() << " entries, expected d^n = "
        << shape.size();
    throw std::runtime_error(msg.str());
  }
  for (Real v : p) {
    if (v <= -kNegativityTol)
      throw std::runtime_error("system file: field 'p' has a negative probability");
  }
  const Real sum = fp::kahan_sum(p);
  if (std::abs(sum - 1.0) > 1e-9)
    throw std::runtime_error("system file: field 'p' sums further than 1e-9 from 1");
  if (std::abs(sum - 1.0) > kRenormTol) {
    for (Real& v : p) v /= sum;
  }
  return JointDistribution(shape, std::move(p));
}

inline json read_json_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open file: " + path);
  json j;
  in >> j;
  return j;
}

inline void write_json_file(const json& j, const std::string& path) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot write file: " + path);
  out << j.dump(2) << '\n';
}

inline JointDistribution load_system(const std::string& path) {
  return system_from_json(read_json_file(path));
}

inline void save_system(const JointDistribution& dist, const std::string& path) {
  write_json_file(system_to_json(dist), path);
}

/**
 * Coefficient spec schema: {"family":"ets"} | {"family":"uniform"} |
 * {"family":"p-symmetric","p":0.3} |
 * {"family":"atomic","atoms":[{"x":0.25,"w":0.5},...]}.
 */
inline LambdaSpec lambda_from_json(const json& j) {
  if (!j.contains("family") || !j["family"].is_string())
    throw std::runtime_error("coefficient spec: field 'family' missing or not a string");
  const std::string family = j["family"].get<std::string>();
  if (family == "ets") return LambdaSpec::lebesgue();
  if (family == "uniform") return LambdaSpec::uniform_point();
  if (family == "p-symmetric") {
    if (!j.contains("p") || !j["p"].is_number())
      throw std::runtime_error("coefficient spec: p-symmetric needs a numeric field 'p'");
    return LambdaSpec::two_point(j["p"].get<Real>());
  }
  if (family == "atomic") {
    if (!j.contains("atoms") || !j["atoms"].is_array())
      throw std::runtime_error("coefficient spec: atomic needs an array field 'atoms'");
    std::vector<Atom> atoms;
    for (const auto& a : j["atoms"]) {
      if (!a.contains("x") || !a.contains("w"))
        throw std::runtime_error("coefficient spec: each atom needs fields 'x' and 'w'");
      atoms.push_back({a["x"].get<Real>(), a["w"].get<Real>()});
    }
    return LambdaSpec::atomic(std::move(atoms));
  }
  throw std::runtime_error("coefficient spec: unknown family '" + family + "'");
}

inline json lambda_to_json(const LambdaSpec& lambda) {
  json j;
  j["family"] = lambda.family_name();
  if (lambda.family() == LambdaSpec::Family::TwoPoint) j["p"] = lambda.p();
  if (lambda.family() == LambdaSpec::Family::Atomic) {
    json atoms = json::array();
    for (const Atom& a : lambda.atoms()) atoms.push_back({{"x", a.x}, {"w", a.w}});
    j["atoms"] = atoms;
  }
  return j;
}

inline json result_record(Real value, const std::string& method, const SystemShape& shape,
                          const std::string& family) {
  json j;
  j["value"] = value;
  j["method"] = method;
  j["n"] = shape.n();
  j["d"] = shape.d();
  j["family"] = family;
  return j;
}

inline json estimate_record(const MCEstimate& est, const SystemShape& shape,
                            const std::string& family) {
  json j = result_record(est.mean, "mc", shape, family);
  j["stderr"] = est.std_error;
  j["samples"] = est.samples;
  j["seed"] = est.seed;
  return j;
}

inline json opt_result_to_json(const OptResult& result, const std::string& family,
                               Real support_threshold) {
  json j;
  j["value"] = result.value;
  j["entropy"] = result.entropy;
  j["iterations"] = result.iterations;
  j["converged"] = result.converged;
  j["restart_index"] = result.restart_index;
  j["family"] = family;
  const auto stats = support_stats(result.dist, support_threshold);
  j["support"] = stats.support;
  j["forbidden"] = stats.forbidden;
  j["dist"] = system_to_json(result.dist);
  return j;
}

}  // namespace intricacy::io
