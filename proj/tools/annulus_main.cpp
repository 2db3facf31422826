// annulus: membership certificates, dilations and canonical decompositions
// for matrix tuples measured against the annulus classes C1r / QAr.

#include <cstdio>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "annulus/decomposition.hpp"
#include "annulus/dilation.hpp"
#include "annulus/instances.hpp"
#include "annulus/tuple_io.hpp"

namespace {

using namespace annulus;

constexpr int kExitOk = 0;
constexpr int kExitInput = 2;
constexpr int kExitSingular = 3;
constexpr int kExitMembership = 4;
constexpr int kExitAmbiguous = 5;

void emit(const Json& report, const std::string& out_path) {
  std::string text = canonical_dump(report);
  if (out_path.empty()) {
    std::cout << text;
  } else {
    write_text_atomic(out_path, text);
  }
}

Json certificate_to_json(const ClassCertificate& cert) {
  Json j{{"class", class_tag_name(cert.tag)},
         {"member", cert.member},
         {"witness_norm", cert.witness_norm},
         {"witness_inv_norm", cert.witness_inv_norm},
         {"defect_min_eig", cert.defect_min_eig}};
  if (cert.tag == ClassTag::ExactC1r || cert.tag == ClassTag::ExactQAr) {
    j["defect_residual_norm"] = cert.defect_residual_norm;
    j["spectrum_residual"] = cert.spectrum_residual;
  }
  return j;
}

struct CheckArgs {
  std::string path;
  std::string out;
  std::optional<double> r_override;
  bool qa = false;
};

int cmd_check(const CheckArgs& args, const ToleranceConfig& tol) {
  LoadedTuple loaded = load_tuple_file(args.path, args.r_override);
  if (loaded.r_overridden) {
    std::cerr << "warning: overriding file radius r = " << *loaded.file_r
              << " with command-line r = " << loaded.tuple.r << "\n";
  }
  loaded.tuple.validate(tol);
  const ClassTag requested = args.qa ? ClassTag::QAr : ClassTag::C1r;

  Json operators = Json::array();
  bool all_members = true;
  for (int j = 0; j < loaded.tuple.arity(); ++j) {
    const auto certs = classify(loaded.tuple.ops[j], loaded.tuple.r, tol);
    Json cert_list = Json::array();
    for (const auto& c : certs) cert_list.push_back(certificate_to_json(c));
    operators.push_back(Json{{"index", j}, {"certificates", std::move(cert_list)}});
    if (!certificate_for(certs, requested).member) all_members = false;
  }
  CommutationCheck comm = is_doubly_commuting(loaded.tuple, tol);

  Json results{{"r", loaded.tuple.r},
               {"requested_class", class_tag_name(requested)},
               {"all_requested_members", all_members},
               {"doubly_commuting",
                Json{{"value", comm.doubly_commuting}, {"residual", comm.max_residual}}},
               {"operators", std::move(operators)}};
  emit(make_report("check", loaded.digest, tol, std::move(results), "ok"), args.out);
  return all_members ? kExitOk : kExitMembership;
}

struct DilateArgs {
  std::string path;
  std::string out;
  std::string export_model;
  std::optional<double> r_override;
  std::vector<int> nodes;
  int max_power = 3;
  int snap_level = 20;
  bool qa = false;
};

Json moments_to_json(const std::vector<MomentEntry>& table) {
  Json out = Json::array();
  for (const auto& e : table) {
    out.push_back(Json{{"n", e.powers}, {"error", e.error}});
  }
  return out;
}

Json model_summary(const DilationModel& model, const OperatorTuple& tuple, int max_power) {
  NodeClassReport node_class = verify_node_class(model);
  auto table = verify_moments(model, tuple, max_power);
  return Json{{"nodes", model.node_count},
              {"theta0", model.theta0},
              {"min_clearance", model.min_clearance},
              {"clearance_met", model.clearance_met},
              {"node_class_spectrum_residual", node_class.spectrum_residual},
              {"node_class_defect_residual", node_class.defect_residual},
              {"double_commutation_residual", node_double_commutation(model)},
              {"max_moment_error", max_moment_error(table)},
              {"moments", moments_to_json(table)}};
}

Json export_model_json(const DilationModel& model) {
  Json nodes = Json::array();
  for (const auto& z : model.nodes) nodes.push_back(Json::array({z.real(), z.imag()}));
  Json blocks = Json::array();
  for (int j = 0; j < model.arity(); ++j) {
    Json per_entry = Json::array();
    for (const auto& b : model.blocks[j]) per_entry.push_back(matrix_to_json(b));
    blocks.push_back(std::move(per_entry));
  }
  return Json{{"node_count", model.node_count}, {"theta0", model.theta0},
              {"nodes", std::move(nodes)},     {"blocks", std::move(blocks)},
              {"scale", model.scale},          {"snap_level", model.snap_level},
              {"snap_bound", model.snap_bound}};
}

int cmd_dilate(const DilateArgs& args, const ToleranceConfig& tol) {
  LoadedTuple loaded = load_tuple_file(args.path, args.r_override);
  if (loaded.r_overridden) {
    std::cerr << "warning: overriding file radius r = " << *loaded.file_r
              << " with command-line r = " << loaded.tuple.r << "\n";
  }
  const OperatorTuple& tuple = loaded.tuple;
  tuple.validate(tol);
  std::vector<int> node_counts = args.nodes.empty() ? std::vector<int>{1024} : args.nodes;

  const ClassTag requested = args.qa ? ClassTag::QAr : ClassTag::C1r;
  for (int j = 0; j < tuple.arity(); ++j) {
    const auto certs = classify(tuple.ops[j], tuple.r, tol);
    if (!certificate_for(certs, requested).member) {
      throw MembershipError("dilate: entry " + std::to_string(j) + " is not a " +
                            class_tag_name(requested) + " member at r = " +
                            std::to_string(tuple.r));
    }
  }

  Json models = Json::array();
  double snap_bound = 0.0;
  int snap_level = 0;
  double first_max = -1.0, last_max = -1.0;
  for (std::size_t i = 0; i < node_counts.size(); ++i) {
    DilationModel model =
        args.qa ? dilate_qar(tuple, node_counts[i], args.snap_level, tol)
                : build_dilation(build_symbols_auto(tuple, args.snap_level, tol), node_counts[i]);
    snap_bound = model.snap_bound;
    snap_level = model.snap_level;
    Json summary = model_summary(model, tuple, args.max_power);
    double mx = summary.at("max_moment_error").get<double>();
    if (i == 0) first_max = mx;
    last_max = mx;
    models.push_back(std::move(summary));
    if (!args.export_model.empty() && i + 1 == node_counts.size()) {
      write_text_atomic(args.export_model, canonical_dump(export_model_json(model)));
    }
  }

  Json results{{"r", tuple.r},
               {"mode", args.qa ? "qa" : "c1r"},
               {"max_power", args.max_power},
               {"models", std::move(models)}};
  if (snap_level > 0) {
    results["snap"] = Json{{"level", snap_level}, {"bound", snap_bound}};
  } else {
    results["snap"] = nullptr;
  }
  if (node_counts.size() >= 2 && first_max > 0.0) {
    results["convergence_ratio"] = last_max / first_max;
  }
  emit(make_report("dilate", loaded.digest, tol, std::move(results), "ok"), args.out);
  return kExitOk;
}

struct DecomposeArgs {
  std::string path;
  std::string out;
  std::optional<double> r_override;
  bool qa = false;
};

int cmd_decompose(const DecomposeArgs& args, const ToleranceConfig& tol) {
  LoadedTuple loaded = load_tuple_file(args.path, args.r_override);
  if (loaded.r_overridden) {
    std::cerr << "warning: overriding file radius r = " << *loaded.file_r
              << " with command-line r = " << loaded.tuple.r << "\n";
  }
  loaded.tuple.validate(tol);
  DecompositionResult result = args.qa ? tuple_decompose_qa(loaded.tuple, tol)
                                       : tuple_decompose(loaded.tuple, tol);
  Json blocks = Json::array();
  for (const auto& block : result.blocks) {
    Json labels = Json::array();
    for (int v : block.label) labels.push_back(v == 0 ? "t1" : "t2");
    blocks.push_back(Json{{"label", std::move(labels)},
                          {"dim", block.dimension()},
                          {"basis", basis_to_json(block.basis)},
                          {"certificates", block.certificates}});
  }
  Json results{{"r", loaded.tuple.r},
               {"mode", args.qa ? "qa" : "c1r"},
               {"blocks", std::move(blocks)},
               {"projector_sum_residual", result.projector_sum_residual},
               {"projector_orth_residual", result.projector_orth_residual},
               {"reduction_residual", result.reduction_residual},
               {"ambiguous", result.ambiguous},
               {"notes", result.notes}};
  std::string status = result.ambiguous ? "ambiguous" : "ok";
  emit(make_report("decompose", loaded.digest, tol, std::move(results), status), args.out);
  return result.ambiguous ? kExitAmbiguous : kExitOk;
}

struct FactorArgs {
  std::string path;
  std::string out;
  std::optional<double> r_override;
  int snap_level = 0;
};

int cmd_factor(const FactorArgs& args, const ToleranceConfig& tol) {
  LoadedTuple loaded = load_tuple_file(args.path, args.r_override);
  if (loaded.r_overridden) {
    std::cerr << "warning: overriding file radius r = " << *loaded.file_r
              << " with command-line r = " << loaded.tuple.r << "\n";
  }
  const OperatorTuple& tuple = loaded.tuple;
  tuple.validate(tol);
  UDFactorization fact = ud_factorize(tuple, tol);
  SpectralResolution res = joint_spectral_resolution(fact, tuple.r, tol);

  Json entries = Json::array();
  for (int j = 0; j < fact.arity(); ++j) {
    entries.push_back(Json{{"index", j},
                           {"unitary", matrix_to_json(fact.unitaries[j])},
                           {"positive", matrix_to_json(fact.positives[j])},
                           {"eigenvalues", res.eigenvalues[j]}});
  }
  Json results{{"r", tuple.r},
               {"all_c1r", fact.all_c1r},
               {"relation_residual", fact.relation_residual(tuple)},
               {"projection_residual", res.projection_residual()},
               {"entries", std::move(entries)},
               {"ambiguous", res.ambiguous},
               {"notes", res.notes}};
  if (args.snap_level > 0) {
    DyadicApproximation snap = snap_spectrum(fact, tuple.r, args.snap_level, tol);
    Json snapped_ops = Json::array();
    for (const auto& op : snap.snapped_ops) snapped_ops.push_back(matrix_to_json(op));
    results["snap"] = Json{{"level", snap.level},
                           {"bound", snap.bound},
                           {"op_deltas", snap.op_deltas},
                           {"inv_deltas", snap.inv_deltas},
                           {"snapped_operators", std::move(snapped_ops)}};
  } else {
    results["snap"] = nullptr;
  }
  std::string status = res.ambiguous ? "ambiguous" : "ok";
  emit(make_report("factor", loaded.digest, tol, std::move(results), status), args.out);
  return res.ambiguous ? kExitAmbiguous : kExitOk;
}

struct GenerateArgs {
  std::string kind;
  std::string out;
  double r = 0.5;
  int n = 1;
  int dim = 2;
  int d = 2;
  int half_width = 4;
  double alpha = 0.0;
  std::uint64_t seed = 1;
  std::vector<std::string> factor_paths;
};

int cmd_generate(const GenerateArgs& args, const ToleranceConfig& tol) {
  OperatorTuple tuple;
  tuple.r = args.r;
  if (args.kind == "scalar") {
    tuple.ops.push_back(gen_scalar_family(args.n, args.r, args.dim));
  } else if (args.kind == "sarason") {
    tuple.ops.push_back(gen_sarason(SarasonShiftSpec{args.alpha, args.r, args.half_width}));
  } else if (args.kind == "normal") {
    tuple = gen_normal_tuple(args.seed, args.d, args.dim, args.r);
  } else if (args.kind == "tensor") {
    if (args.factor_paths.empty()) {
      throw InvalidInputError("generate tensor: at least one --factor file is required");
    }
    std::vector<ComplexMatrix> factors;
    for (const auto& p : args.factor_paths) {
      LoadedTuple lt = load_tuple_file(p);
      for (auto& op : lt.tuple.ops) factors.push_back(std::move(op));
    }
    tuple = gen_tensor_tuple(factors, args.r, tol);
  } else {
    throw InvalidInputError("generate: unknown kind \"" + args.kind +
                            "\" (expected scalar|sarason|normal|tensor)");
  }
  tuple.validate(tol);
  std::string text = canonical_dump(tuple_to_json(tuple));
  write_text_atomic(args.out, text);
  Json results{{"kind", args.kind},
               {"output", args.out},
               {"dim", tuple.dim()},
               {"d", tuple.arity()},
               {"digest", digest_hex(text)}};
  emit(make_report("generate", digest_hex(text), tol, std::move(results), "ok"), "");
  return kExitOk;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"annulus operator toolkit: class certificates, dilations, decompositions"};
  app.require_subcommand(1);

  CheckArgs check_args;
  double check_r = -1.0;
  auto* check = app.add_subcommand("check", "class certificates and double commutation");
  check->add_option("path", check_args.path, "tuple file")->required();
  auto* check_r_opt = check->add_option("--r", check_r, "override the file radius");
  check->add_flag("--qa", check_args.qa, "require quantum-annulus membership");
  check->add_option("-o,--output", check_args.out, "write the report here");

  DilateArgs dilate_args;
  double dilate_r = -1.0;
  auto* dilate = app.add_subcommand("dilate", "quadrature dilation model and moment errors");
  dilate->add_option("path", dilate_args.path, "tuple file")->required();
  auto* dilate_r_opt = dilate->add_option("--r", dilate_r, "override the file radius");
  dilate->add_option("--nodes", dilate_args.nodes,
                     "node count, power of two >= 16 (repeat to measure convergence)");
  dilate->add_option("--max-power", dilate_args.max_power, "moment table half-width")
      ->check(CLI::Range(0, kMaxMomentPower));
  dilate->add_option("--snap-level", dilate_args.snap_level,
                     "dyadic level used when spectra touch the endpoints");
  dilate->add_flag("--qa", dilate_args.qa, "quantum-annulus route");
  dilate->add_option("--export-model", dilate_args.export_model, "dump the node blocks here");
  dilate->add_option("-o,--output", dilate_args.out, "write the report here");

  DecomposeArgs decompose_args;
  double decompose_r = -1.0;
  auto* decompose = app.add_subcommand("decompose", "2^d joint canonical decomposition");
  decompose->add_option("path", decompose_args.path, "tuple file")->required();
  auto* decompose_r_opt = decompose->add_option("--r", decompose_r, "override the file radius");
  decompose->add_flag("--qa", decompose_args.qa, "quantum-annulus route");
  decompose->add_option("-o,--output", decompose_args.out, "write the report here");

  FactorArgs factor_args;
  double factor_r = -1.0;
  auto* factor = app.add_subcommand("factor", "unitary times positive factorization");
  factor->add_option("path", factor_args.path, "tuple file")->required();
  auto* factor_r_opt = factor->add_option("--r", factor_r, "override the file radius");
  factor->add_option("--snap-level", factor_args.snap_level,
                     "also report the dyadic snapped tuple at this level");
  factor->add_option("-o,--output", factor_args.out, "write the report here");

  GenerateArgs gen_args;
  auto* generate = app.add_subcommand("generate", "write a certified instance file");
  generate->add_option("kind", gen_args.kind, "scalar|sarason|normal|tensor")->required();
  generate->add_option("-o,--output", gen_args.out, "output tuple file")->required();
  generate->add_option("--r", gen_args.r, "inner radius");
  generate->add_option("--n", gen_args.n, "scalar family index");
  generate->add_option("--dim", gen_args.dim, "dimension");
  generate->add_option("--d", gen_args.d, "tuple arity");
  generate->add_option("--half-width", gen_args.half_width, "shift half-width");
  generate->add_option("--alpha", gen_args.alpha, "shift weight exponent");
  generate->add_option("--seed", gen_args.seed, "generator seed");
  generate->add_option("--factor", gen_args.factor_paths, "tensor factor tuple file (repeat)");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    int code = app.exit(e);
    return code == 0 ? kExitOk : kExitInput;
  }

  try {
    const ToleranceConfig tol = tolerances_from_env();
    if (check->parsed()) {
      if (check_r_opt->count() > 0) check_args.r_override = check_r;
      return cmd_check(check_args, tol);
    }
    if (dilate->parsed()) {
      if (dilate_r_opt->count() > 0) dilate_args.r_override = dilate_r;
      return cmd_dilate(dilate_args, tol);
    }
    if (decompose->parsed()) {
      if (decompose_r_opt->count() > 0) decompose_args.r_override = decompose_r;
      return cmd_decompose(decompose_args, tol);
    }
    if (factor->parsed()) {
      if (factor_r_opt->count() > 0) factor_args.r_override = factor_r;
      return cmd_factor(factor_args, tol);
    }
    if (generate->parsed()) {
      return cmd_generate(gen_args, tol);
    }
  } catch (const SingularMatrixError& e) {
    std::cerr << "error: " << e.what()
              << " (smallest singular value " << e.smallest_singular_value << ")\n";
    return kExitSingular;
  } catch (const MembershipError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitMembership;
  } catch (const AmbiguityError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitAmbiguous;
  } catch (const InvalidInputError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitInput;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitInput;
  }
  return kExitOk;
}
