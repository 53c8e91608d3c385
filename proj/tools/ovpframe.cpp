// ovpframe command line: generate, classify, dualize, dilate, perturb and
// run the property suite.

#include <cstdio>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>

#include "CLI11.hpp"
#include "ovpframe/duality.hpp"
#include "ovpframe/frames.hpp"
#include "ovpframe/generate.hpp"
#include "ovpframe/json_io.hpp"
#include "ovpframe/perturb.hpp"
#include "ovpframe/transforms.hpp"
#include "ovpframe/verify.hpp"

using namespace ovp;

namespace {

json estimate_json(const NormEstimate &e) {
  return json{{"lower", e.lower}, {"upper", e.upper}, {"exact", e.exact}};
}

json bounds_json(const FrameBounds &b) {
  return json{{"a", estimate_json(b.a)}, {"b", estimate_json(b.b)}, {"c", estimate_json(b.c)},
              {"d", estimate_json(b.d)}};
}

json class_json(const FrameClass &c) {
  json j = {{"kind", to_string(c.kind)},     {"bessel", c.bessel},
            {"frame", c.frame},              {"parseval", c.parseval},
            {"riesz", c.riesz},              {"smallest_pivot", c.smallest_pivot},
            {"parseval_residual", c.parseval_residual}};
  j["riesz_residual"] = c.riesz_residual;
  return j;
}

json dual_cert_json(const DualCertificate &d) {
  return json{{"residual_left", d.residual_left}, {"residual_right", d.residual_right},
              {"verdict", d.verdict}};
}

json params_json(const PerturbParams &p) {
  return json{{"alpha", p.alpha}, {"beta", p.beta}, {"gamma", p.gamma}};
}

json perturb_json(const PerturbCertificate &c) {
  json j = {{"hypothesis_ok", c.hypothesis_ok},
            {"lower_bound", c.lower_bound},
            {"upper_bound", c.upper_bound},
            {"synth", params_json(c.synth)},
            {"perturbed_invertible", c.perturbed_invertible},
            {"measured_inverse_norm", c.measured_inverse_norm},
            {"measured_norm", c.measured_norm},
            {"bounds_respected", c.bounds_respected},
            {"formulas", c.formula_refs}};
  if (!c.reason.empty()) j["reason"] = c.reason;
  if (c.variant == 0) {
    j["checked_condition"] = c.checked_condition;
    j["sqrt_a_condition"] = c.sqrt_a_condition;
    j["conditions_disagree"] = c.conditions_disagree;
  } else {
    j["variant"] = c.variant;
    j["variant_sum"] = c.variant_sum;
    j["analysis"] = params_json(c.analysis);
    j["invertible_composite"] = c.invertible_composite;
  }
  return j;
}

void emit(const json &j, const std::string &path) {
  const std::string text = dump_canonical(j);
  if (path.empty() || path == "-") {
    std::cout << text;
  } else {
    write_text_file(path, text);
  }
}

std::pair<Index, Index> parse_dims(const std::string &s) {
  const auto comma = s.find(',');
  if (comma == std::string::npos) throw PreconditionFailed("dims", "expected d,e");
  try {
    std::size_t used = 0;
    const long long d = std::stoll(s.substr(0, comma), &used);
    if (used != comma) throw std::invalid_argument("d");
    const std::string rest = s.substr(comma + 1);
    const long long e = std::stoll(rest, &used);
    if (used != rest.size()) throw std::invalid_argument("e");
    return {static_cast<Index>(d), static_cast<Index>(e)};
  } catch (const std::logic_error &) {
    throw PreconditionFailed("dims", "expected two integers d,e, got '" + s + "'");
  }
}

double parse_exp(const std::string &s, const char *name) {
  if (s == "inf") return kInf;
  try {
    std::size_t used = 0;
    const double v = std::stod(s, &used);
    if (used == s.size()) return v;
  } catch (const std::logic_error &) {
  }
  throw PreconditionFailed(name, "expected a number or inf, got '" + s + "'");
}

}  // namespace

int main(int argc, char **argv) {
  CLI::App app{"operator-valued p-approximate Schauder frames"};
  app.require_subcommand(1);
  const Config cfg = Config::from_env();

  // gen
  std::string kind = "generic", dims = "3,2", out, rx = "2", ry = "2";
  std::uint64_t seed = 1;
  double p = 2.0;
  Index N = 4;
  auto *gen = app.add_subcommand("gen", "generate a random frame (or pair) as JSON");
  gen->add_option("--kind", kind, "generic, parseval, riesz, bessel_only, symmetric, "
                                  "orthogonal_pair, approx_dual_pair, perturbation_family");
  gen->add_option("--seed", seed);
  gen->add_option("--p", p, "sequence exponent in [1, inf)");
  gen->add_option("--dims", dims, "d,e");
  gen->add_option("--N", N, "number of blocks");
  gen->add_option("--rx", rx, "norm exponent of X (number or inf)");
  gen->add_option("--ry", ry, "norm exponent of Y (number or inf)");
  gen->add_option("-o,--output", out, "output file (stdout if omitted)");

  // check
  std::string frame_path;
  auto *check = app.add_subcommand("check", "classify a frame and certify its bounds");
  check->add_option("frame", frame_path)->required();

  // dual
  std::string params_path, dual_out;
  auto *dual = app.add_subcommand("dual", "dual frame from (U, V) parameters (canonical by default)");
  dual->add_option("frame", frame_path)->required();
  dual->add_option("--params", params_path, "JSON with matrices U ((N e) x d) and V (d x (N e))");
  dual->add_option("-o,--output", dual_out, "write the dual frame here");

  // dilate
  std::string dil_out;
  auto *dil = app.add_subcommand("dilate", "dilate a frame to a Riesz basis");
  dil->add_option("frame", frame_path)->required();
  dil->add_option("-o,--output", dil_out, "write the dilated frame here");

  // perturb
  std::string pert_path;
  int variant = 0;
  auto *pert = app.add_subcommand(
      "perturb", "certify that g stays a frame near f (variant 0: synthesis only, 1-4: pair)");
  pert->add_option("frame", frame_path)->required();
  pert->add_option("perturbed", pert_path)->required();
  pert->add_option("--variant", variant)->check(CLI::Range(0, 4));

  // verify-all
  VerifyConfig vc;
  std::string report_path;
  bool timing = false;
  auto *ver = app.add_subcommand("verify-all", "run the randomized property suite");
  ver->add_option("--only", vc.only, "theorem ids (repeatable)");
  ver->add_option("--instances", vc.instances)->check(CLI::PositiveNumber);
  ver->add_option("--seed", vc.seed);
  ver->add_option("--json", report_path, "write the report here");
  ver->add_option("--inject-fault", vc.inject_fault, "run one counterfeit of this theorem");
  ver->add_flag("--timing", timing, "include runtimes in the JSON report");
  bool list = false;
  ver->add_flag("--list", list, "print theorem ids and exit");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError &e) {
    return app.exit(e) == 0 ? 0 : 1;  // usage errors share exit 1 with other failures
  }

  try {
    if (*gen) {
      GenSpec spec;
      spec.kind = parse_kind(kind);
      spec.seed = seed;
      spec.p = p;
      std::tie(spec.d, spec.e) = parse_dims(dims);
      spec.N = N;
      spec.r_x = parse_exp(rx, "rx");
      spec.r_y = parse_exp(ry, "ry");
      const Generated g = generate(spec);
      emit(g.g ? pair_to_json(g.f, *g.g) : frame_to_json(g.f), out);
      return 0;
    }
    if (*check) {
      const FramePair f = read_frame_file(frame_path);
      json j = class_json(classify(f, cfg));
      j["bounds"] = bounds_json(frame_bounds(f, cfg));
      j["N"] = f.N();
      j["d"] = f.d();
      j["e"] = f.e();
      emit(j, "");
      return 0;
    }
    if (*dual) {
      const FramePair f = read_frame_file(frame_path);
      const Index M = f.N() * f.e();
      Matrix U = Matrix::Zero(M, f.d()), V = Matrix::Zero(f.d(), M);
      if (!params_path.empty()) {
        const json pj = read_json_file(params_path);
        if (!pj.is_object() || !pj.contains("U") || !pj.contains("V"))
          throw SchemaError("<root>", "parameter files need \"U\" and \"V\"");
        U = matrix_from_json(pj.at("U"), "U");
        V = matrix_from_json(pj.at("V"), "V");
      }
      const FramePair g = dual_from_params(f, U, V, cfg);
      if (!dual_out.empty()) write_frame_file(dual_out, g);
      emit(json{{"certificate", dual_cert_json(is_dual(f, g, cfg.residual_tol))},
                {"class", class_json(classify(g, cfg))},
                {"dual", frame_to_json(g)}},
           "");
      return 0;
    }
    if (*dil) {
      const FramePair f = read_frame_file(frame_path);
      const Dilation d = dilate(f, cfg);
      if (!dil_out.empty()) write_frame_file(dil_out, d.dilated);
      emit(json{{"class", class_json(classify(d.dilated, cfg))},
                {"complement_dim", d.W_basis.cols()},
                {"embed", matrix_to_json(d.embed)},
                {"dilated", frame_to_json(d.dilated)}},
           "");
      return 0;
    }
    if (*pert) {
      const FramePair f = read_frame_file(frame_path);
      const FramePair g = read_frame_file(pert_path);
      require_same_shape(f, g);
      const PerturbResult r = variant == 0
                                  ? perturb_synthesis_assess(f, g.Psi, std::nullopt, cfg)
                                  : perturb_pair_assess(f, g.A, g.Psi, variant, std::nullopt,
                                                        std::nullopt, cfg);
      emit(perturb_json(r.cert), "");
      return r.cert.hypothesis_ok ? 0 : 2;
    }
    if (*ver) {
      if (list) {
        for (const auto &t : theorem_catalog()) std::cout << t.id << "  " << t.statement << "\n";
        return 0;
      }
      vc.cfg = cfg;
      const Report rep = verify_all(vc);
      for (const auto &r : rep.records) {
        std::printf("%-22s %4d instances  %3d failures  worst %.3g  control %s  %.2fs\n",
                    r.id.c_str(), r.instances, r.failures, r.worst_residual,
                    r.control_detected ? "rejected" : "ACCEPTED", r.runtime);
        if (!r.first_failure.empty()) std::printf("    first failure: %s\n", r.first_failure.c_str());
      }
      std::printf("total failures: %d\n", rep.failures());
      if (!report_path.empty()) emit(report_to_json(rep, timing), report_path);
      return rep.failures() == 0 ? 0 : 1;
    }
  } catch (const std::exception &e) {
    std::fprintf(stderr, "ovpframe: %s\n", e.what());
    return 1;
  }
  return 0;
}
