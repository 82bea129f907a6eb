#pragma once

#include <cstdint>
#include <functional>
#include <optional>
#include <ostream>
#include <stdexcept>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "intricacy/intricacy.hpp"

namespace intricacy::cli {

namespace detail {

struct LambdaOptions {
  std::string family = "ets";
  double p = 0.5;
  std::string lambda_file;
};

inline void add_lambda_options(CLI::App* sub, LambdaOptions& opts) {
  sub->add_option("--family", opts.family, "Coefficient family: ets|uniform|p-symmetric|atomic")
      ->check(CLI::IsMember({"ets", "uniform", "p-symmetric", "atomic"}));
  sub->add_option("--p", opts.p, "Mixing point for the p-symmetric family");
  sub->add_option("--coeff-file", opts.lambda_file,
                  "JSON coefficient spec; overrides --family");
}

inline LambdaSpec resolve_lambda(const LambdaOptions& opts) {
  if (!opts.lambda_file.empty())
    return io::lambda_from_json(io::read_json_file(opts.lambda_file));
  if (opts.family == "ets") return LambdaSpec::lebesgue();
  if (opts.family == "uniform") return LambdaSpec::uniform_point();
  if (opts.family == "p-symmetric") return LambdaSpec::two_point(opts.p);
  throw std::runtime_error("family 'atomic' needs --coeff-file with an atom list");
}

inline void emit(const io::json& j, const std::string& output_path, std::ostream& out) {
  if (!output_path.empty()) io::write_json_file(j, output_path);
  out << j.dump(2) << '\n';
}

inline Mask mask_from_members(const std::vector<int>& members, int n) {
  Mask m = 0;
  for (int i : members) {
    if (i < 0 || i >= n) throw std::runtime_error("subsystem member out of range");
    m |= Mask{1} << i;
  }
  return m;
}

inline io::json report_to_json(const VerifyReport& report) {
  io::json j;
  j["suite"] = report.suite;
  j["seed"] = report.seed;
  j["pass"] = report.all_pass();
  io::json items = io::json::array();
  for (const auto& item : report.items) {
    items.push_back({{"name", item.name},
                     {"cases", item.cases},
                     {"residual", item.residual},
                     {"tolerance", item.tolerance},
                     {"pass", item.pass}});
  }
  j["items"] = items;
  return j;
}

}  // namespace detail

/**
 * Parses and runs one CLI invocation.  Returns 0 on success, 1 when a
 * verification suite reports a failing item, 2 on usage or input errors.
 */
inline int run_command(const std::vector<std::string>& args, std::ostream& out,
                       std::ostream& err) {
  CLI::App app{"Exchangeable interaction measures for finite discrete systems"};
  app.require_subcommand(1);
  int rc = 0;

  // compute
  auto* compute = app.add_subcommand("compute", "Evaluate a system from a JSON file");
  std::string compute_system, compute_method = "exact", compute_output;
  detail::LambdaOptions compute_lambda;
  compute->add_option("--system", compute_system, "System JSON file")->required();
  compute->add_option("--method", compute_method,
                      "exact|entropies|exchangeable")
      ->check(CLI::IsMember({"exact", "entropies", "exchangeable"}));
  detail::add_lambda_options(compute, compute_lambda);
  compute->add_option("--out,--output", compute_output, "Write the result record here too");
  compute->callback([&] {
    const JointDistribution dist = io::load_system(compute_system);
    const LambdaSpec lambda = detail::resolve_lambda(compute_lambda);
    const CoefficientTable table = build_table(lambda, dist.shape().n());
    Real value = 0.0;
    if (compute_method == "exact")
      value = intricacy_exact(dist, table);
    else if (compute_method == "entropies")
      value = intricacy_via_entropies(dist, table);
    else
      value = intricacy_exchangeable(dist, table);
    detail::emit(io::result_record(value, compute_method, dist.shape(),
                                   lambda.family_name()),
                 compute_output, out);
  });

  // estimate
  auto* estimate = app.add_subcommand("estimate", "Monte Carlo estimate of a system's value");
  std::string estimate_system, estimate_output;
  detail::LambdaOptions estimate_lambda;
  std::uint64_t estimate_samples = 100000, estimate_seed = 0;
  estimate->add_option("--system", estimate_system, "System JSON file")->required();
  detail::add_lambda_options(estimate, estimate_lambda);
  estimate->add_option("--samples", estimate_samples, "Sample count");
  estimate->add_option("--seed", estimate_seed, "Seed; identical seeds reproduce output");
  estimate->add_option("--out,--output", estimate_output, "Write the estimate record here too");
  estimate->callback([&] {
    const JointDistribution dist = io::load_system(estimate_system);
    const LambdaSpec lambda = detail::resolve_lambda(estimate_lambda);
    const MCEstimate est = intricacy_mc(dist, lambda, estimate_samples, estimate_seed);
    detail::emit(io::estimate_record(est, dist.shape(), lambda.family_name()),
                 estimate_output, out);
  });

  // maximize
  auto* maximize_cmd = app.add_subcommand("maximize", "Numerically maximize the measure");
  int max_d = 2, max_n = 2, max_restarts = 20, max_iters = 500;
  std::uint64_t max_seed = 0;
  double max_entropy = -1.0, max_entropy_tol = 1e-6, max_support_threshold = 1e-6;
  bool max_type_weights = false;
  std::string max_output;
  detail::LambdaOptions max_lambda;
  maximize_cmd->add_option("--d", max_d, "Alphabet size")->required();
  maximize_cmd->add_option("--n", max_n, "Coordinate count")->required();
  detail::add_lambda_options(maximize_cmd, max_lambda);
  maximize_cmd->add_option("--entropy-x", max_entropy,
                           "Constrain entropy to this fraction of the maximum");
  maximize_cmd->add_option("--entropy-tol", max_entropy_tol,
                           "Half-width of the entropy window, as a fraction");
  maximize_cmd->add_option("--restarts", max_restarts, "Random restarts");
  maximize_cmd->add_option("--iters", max_iters, "Ascent iterations per restart");
  maximize_cmd->add_option("--seed", max_seed, "Seed for the restart draws");
  maximize_cmd->add_option("--support-threshold", max_support_threshold,
                           "Probabilities below this count as forbidden");
  maximize_cmd->add_flag("--type-weights", max_type_weights,
                         "Optimize over exchangeable binary systems only");
  maximize_cmd->add_option("--out,--output", max_output, "Write the result here too");
  maximize_cmd->callback([&] {
    const SystemShape shape(max_d, max_n);
    const LambdaSpec lambda = detail::resolve_lambda(max_lambda);
    const CoefficientTable table = build_table(lambda, max_n);
    OptimizerConfig cfg;
    cfg.restarts = max_restarts;
    cfg.max_iters = max_iters;
    cfg.seed = max_seed;
    cfg.entropy_tol = max_entropy_tol;
    if (max_type_weights) {
      if (max_d != 2) throw std::runtime_error("--type-weights needs --d 2");
      const auto result = maximize_type_weights(max_n, table, cfg);
      io::json j;
      j["value"] = result.value;
      j["weights"] = result.weights.q;
      j["family"] = lambda.family_name();
      j["dist"] = io::system_to_json(result.dist);
      detail::emit(j, max_output, out);
      return;
    }
    const OptResult result =
        max_entropy >= 0.0
            ? maximize_with_entropy(shape, table, max_entropy, cfg,
                                    standard_witnesses(shape, max_entropy))
            : maximize(shape, table, cfg, standard_witnesses(shape));
    detail::emit(io::opt_result_to_json(result, lambda.family_name(),
                                        max_support_threshold),
                 max_output, out);
  });

  // generate
  auto* generate_cmd = app.add_subcommand("generate", "Emit a named example system");
  std::string gen_kind, gen_output;
  int gen_d = 2, gen_n = 2;
  double gen_x = 0.5;
  std::vector<int> gen_members, gen_sigma;
  generate_cmd
      ->add_option("--kind", gen_kind,
                   "iid-uniform|point-mass|synchronized|synchronized-subsystem|"
                   "chain-pair|entropy-pair|replicated-pair-chain|n3-xor|n2-permutation")
      ->required()
      ->check(CLI::IsMember({"iid-uniform", "point-mass", "synchronized",
                             "synchronized-subsystem", "chain-pair", "entropy-pair",
                             "replicated-pair-chain", "n3-xor", "n2-permutation"}));
  generate_cmd->add_option("--d", gen_d, "Alphabet size")->required();
  generate_cmd->add_option("--n", gen_n, "Coordinate count")->required();
  generate_cmd->add_option("--x", gen_x, "Entropy fraction for the entropy-driven kinds");
  generate_cmd->add_option("--members", gen_members, "Synchronized subsystem coordinates")
      ->delimiter(',');
  generate_cmd->add_option("--sigma", gen_sigma, "Permutation for n2-permutation")
      ->delimiter(',');
  generate_cmd->add_option("--out,--output", gen_output, "Write the system here too");
  generate_cmd->callback([&] {
    const SystemShape shape(gen_d, gen_n);
    ExampleKind kind = ExampleKind::iid_uniform();
    if (gen_kind == "point-mass")
      kind = ExampleKind::point_mass();
    else if (gen_kind == "synchronized")
      kind = ExampleKind::synchronized_system();
    else if (gen_kind == "synchronized-subsystem")
      kind = ExampleKind::synchronized_subsystem(detail::mask_from_members(gen_members, gen_n));
    else if (gen_kind == "chain-pair")
      kind = ExampleKind::chain_pair();
    else if (gen_kind == "entropy-pair")
      kind = ExampleKind::entropy_pair(gen_x);
    else if (gen_kind == "replicated-pair-chain")
      kind = ExampleKind::replicated_pair_chain(gen_x);
    else if (gen_kind == "n3-xor")
      kind = ExampleKind::n3_xor();
    else if (gen_kind == "n2-permutation")
      kind = ExampleKind::n2_permutation(gen_sigma);
    detail::emit(io::system_to_json(generate(kind, shape)), gen_output, out);
  });

  // coeffs
  auto* coeffs = app.add_subcommand("coeffs", "Print a coefficient table with diagnostics");
  int coeffs_n = 2;
  std::string coeffs_output;
  detail::LambdaOptions coeffs_lambda;
  coeffs->add_option("--n", coeffs_n, "Coordinate count")->required();
  detail::add_lambda_options(coeffs, coeffs_lambda);
  coeffs->add_option("--out,--output", coeffs_output, "Write the table here too");
  coeffs->callback([&] {
    const LambdaSpec lambda = detail::resolve_lambda(coeffs_lambda);
    const CoefficientTable table = build_table(lambda, coeffs_n);
    const auto diag = check_table(table);
    io::json j = io::lambda_to_json(lambda);
    j["n"] = coeffs_n;
    j["c"] = table.values();
    j["kappa"] = kappa(lambda);
    j["diagnostics"] = {{"negativity", diag.negativity},
                        {"symmetry", diag.symmetry},
                        {"normalization", diag.normalization},
                        {"ok", diag.ok()}};
    j["projectivity_residual"] =
        check_projectivity(table, build_table(lambda, coeffs_n + 1));
    detail::emit(j, coeffs_output, out);
  });

  // verify
  auto* verify_cmd = app.add_subcommand("verify", "Run a self-check suite");
  std::string verify_suite = "all", verify_output;
  std::uint64_t verify_seed = 0;
  int verify_trials = 0;
  double verify_tolerance = 0.0;
  verify_cmd->add_option("--suite", verify_suite,
                         "appendix|coefficients|additivity|bounds|oracles|all")
      ->check(CLI::IsMember({"appendix", "coefficients", "additivity", "bounds",
                             "oracles", "all"}));
  verify_cmd->add_option("--seed", verify_seed, "Seed for the random trials");
  verify_cmd->add_option("--trials", verify_trials, "Trial count override");
  verify_cmd->add_option("--tolerance", verify_tolerance, "Tolerance override");
  verify_cmd->add_option("--out,--output", verify_output, "Write the report here too");
  verify_cmd->callback([&] {
    const auto reports =
        verify_suites(verify_suite, verify_seed, verify_trials, verify_tolerance);
    bool pass = true;
    io::json suites = io::json::array();
    for (const auto& report : reports) {
      pass = pass && report.all_pass();
      suites.push_back(detail::report_to_json(report));
    }
    io::json j;
    j["pass"] = pass;
    j["suites"] = suites;
    detail::emit(j, verify_output, out);
    if (!pass) rc = 1;
  });

  std::vector<std::string> argv_storage;
  argv_storage.reserve(args.size() + 1);
  argv_storage.push_back("intricacy");
  for (const auto& a : args) argv_storage.push_back(a);
  std::vector<const char*> argv;
  argv.reserve(argv_storage.size());
  for (const auto& a : argv_storage) argv.push_back(a.c_str());

  try {
    app.parse(static_cast<int>(argv.size()), argv.data());
  } catch (const CLI::CallForHelp&) {
    out << app.help();
    return 0;
  } catch (const CLI::ParseError& e) {
    err << "error: " << e.what() << '\n';
    return 2;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << '\n';
    return 2;
  }
  return rc;
}

}  // namespace intricacy::cli
