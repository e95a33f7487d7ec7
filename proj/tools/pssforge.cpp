// pssforge command-line front end.
//
// Exit codes: 0 pass, 1 verification failure, 2 usage, IO or input error.

#include <CLI11.hpp>

#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>

#include "pssforge/conservation.hpp"
#include "pssforge/io.hpp"
#include "pssforge/numcheck.hpp"
#include "pssforge/properties.hpp"

using namespace pssforge;

namespace {

constexpr int kPass = 0;
constexpr int kFail = 1;
constexpr int kUsage = 2;

class UsageError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// ---------------------------------------------------------------------------
// Options

struct SourceOptions {
  std::string catalog;
  std::string branch;
  std::string sign = "+";
  int delta = 1;
  std::vector<std::string> params;
  std::string spec;
  std::string coframe;
  std::string equation;
};

struct RunConfig {
  std::string format = "json";
  std::string output;
  SourceOptions source;
  bool lemma = false;
  bool zcr = false;
  // catalog
  std::string action = "list";
  std::string name;
  // conservation
  int order = 2;
  std::string param = "eta";
  std::string center = "infinity";
  int orientation = 1;
  std::string shift;
  std::string speed;
  // curvature
  std::string solution = "kink";
  std::string fixture;
  int nx = 400, nt = 400;
  double tol = 1e-3;
  // selftest
  int cases = 200;
  std::optional<std::uint64_t> seed;
};

void add_source_options(CLI::App* cmd, SourceOptions& s) {
  cmd->add_option("--catalog", s.catalog, "Catalog entry name");
  cmd->add_option("--branch", s.branch, "Branch id, e.g. T32-II or T35s-I");
  cmd->add_option("--sign", s.sign, "Upper (+) or lower (-) sign choice")->default_val("+");
  cmd->add_option("--delta", s.delta, "+1 (pseudospherical) or -1 (spherical)")->default_val(1);
  cmd->add_option("--param", s.params, "Parameter binding name=expr (repeatable)");
  cmd->add_option("--spec", s.spec, "Branch spec JSON file");
  cmd->add_option("--coframe", s.coframe, "Coframe JSON file (bare or under \"coframe\")");
  cmd->add_option("--equation", s.equation, "Equation JSON file (bare or under \"equation\")");
}

// ---------------------------------------------------------------------------
// Input

std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw UsageError("cannot read '" + path + "'");
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

json load_object(const std::string& path, const char* key) {
  json j = parse_json(read_file(path));
  if (j.is_object() && j.contains(key)) return j.at(key);
  return j;
}

int parse_sign(const std::string& s) {
  if (s == "+" || s == "1" || s == "+1" || s == "upper") return 1;
  if (s == "-" || s == "-1" || s == "lower") return -1;
  throw UsageError("sign must be + or -, got '" + s + "'");
}

BranchSpec spec_from_flags(const SourceOptions& s) {
  BranchSpec spec;
  spec.branch = parse_branch(s.branch);
  spec.sign = parse_sign(s.sign);
  spec.delta = s.delta;
  for (const auto& p : s.params) {
    auto eq = p.find('=');
    if (eq == std::string::npos || eq == 0) throw UsageError("--param expects name=expr, got '" + p + "'");
    spec.params[p.substr(0, eq)] = parse(p.substr(eq + 1));
  }
  return spec;
}

/// Resolves the coframe and equation named by the source options.
FamilyInstance load_instance(const SourceOptions& s) {
  int given = !s.catalog.empty() + !s.branch.empty() + !s.spec.empty() + (!s.coframe.empty() || !s.equation.empty());
  if (given != 1) throw UsageError("give exactly one of --catalog, --branch, --spec or --coframe/--equation");
  if (!s.catalog.empty()) return catalog(s.catalog);
  if (!s.branch.empty()) return construct(spec_from_flags(s));
  if (!s.spec.empty()) return construct(branch_spec_from_json(load_object(s.spec, "spec")));
  if (s.coframe.empty() || s.equation.empty()) throw UsageError("--coframe and --equation go together");
  FamilyInstance inst;
  inst.name = "input";
  inst.coframe = coframe_from_json(load_object(s.coframe, "coframe"));
  inst.equation = equation_from_json(load_object(s.equation, "equation"));
  switch (inst.equation.cls) {
    case EquationClass::A:
    case EquationClass::B:
      inst.rhs = normalize(inst.equation.A * z(3) + inst.equation.B, inst.equation.context);
      break;
    case EquationClass::Generic:
      inst.rhs = inst.equation.rules.front().rhs;
      break;
  }
  inst.sign = 1;
  return inst;
}

// ---------------------------------------------------------------------------
// Output

void emit(const RunConfig& cfg, const std::string& text) {
  if (cfg.output.empty()) {
    std::cout << text;
    std::cout.flush();
    return;
  }
  std::ofstream out(cfg.output, std::ios::binary);
  if (!out) throw UsageError("cannot write '" + cfg.output + "'");
  out << text;
}

void emit_json(const RunConfig& cfg, const json& j) { emit(cfg, j.dump(2) + "\n"); }

std::string lhs_text(const EquationSpec& eq, bool latex) {
  auto show = [&](const Expr& e) { return latex ? to_latex(e) : format(e); };
  switch (eq.cls) {
    case EquationClass::A:
      if (normalize(eq.lambda).is_zero()) return show(zt());
      return show(zt() - eq.lambda * zt(2));
    case EquationClass::B:
      return show(zt(2));
    case EquationClass::Generic:
      return show(Expr::jet(eq.rules.front().var));
  }
  return "";
}

std::string latex_document(const FamilyInstance& inst) {
  std::ostringstream d;
  d << "\\documentclass{article}\n\\usepackage{amsmath}\n\\allowdisplaybreaks\n\\begin{document}\n";
  bool tag = !inst.branch.empty() && inst.branch != inst.name;
  d << "\\section*{" << inst.name << (tag ? " (" + inst.branch + ")" : "") << "}\n";
  d << "\\begin{equation*}\n" << lhs_text(inst.equation, true) << " = " << to_latex(inst.rhs) << "\n\\end{equation*}\n";
  d << "with $\\delta = " << inst.coframe.delta << "$ and\n\\begin{align*}\n";
  for (int i = 1; i <= 3; ++i) {
    d << "\\omega_{" << i << "} &= \\left(" << to_latex(inst.coframe(i, 1)) << "\\right) dx + \\left("
      << to_latex(inst.coframe(i, 2)) << "\\right) dt" << (i < 3 ? " \\\\" : "") << "\n";
  }
  d << "\\end{align*}\n";
  const auto& rel = inst.coframe.context.side_relations();
  if (!rel.empty()) {
    d << "where\n\\begin{align*}\n";
    for (std::size_t i = 0; i < rel.size(); ++i)
      d << to_latex(Expr::param(rel[i].symbol)) << "^{2} &= " << to_latex(rel[i].square)
        << (i + 1 < rel.size() ? " \\\\" : "") << "\n";
    d << "\\end{align*}\n";
  }
  d << "\\end{document}\n";
  return d.str();
}

std::string instance_text(const FamilyInstance& inst) {
  std::ostringstream t;
  t << inst.name;
  if (!inst.branch.empty()) t << " [" << (inst.branch != inst.name ? inst.branch + ", " : "") << (inst.sign > 0 ? "+" : "-") << "]";
  t << "\n  " << lhs_text(inst.equation, false) << " = " << format(inst.rhs) << "\n";
  t << "  delta = " << inst.coframe.delta << "\n";
  for (int i = 1; i <= 3; ++i)
    t << "  w" << i << " = (" << format(inst.coframe(i, 1)) << ") dx + (" << format(inst.coframe(i, 2)) << ") dt\n";
  for (const auto& r : inst.coframe.context.side_relations())
    t << "  " << r.symbol << "^2 = " << format(r.square) << "\n";
  for (const auto& f : inst.flags) t << "  flag: " << f << "\n";
  return t.str();
}

// ---------------------------------------------------------------------------
// Commands

int cmd_verify(const RunConfig& cfg) {
  FamilyInstance inst = load_instance(cfg.source);
  SurfaceReport rep = verify_describes_surface(inst.coframe, inst.equation);
  bool pass = rep.pass();
  json j;
  j["command"] = "verify";
  j["name"] = inst.name;
  if (!inst.branch.empty()) j["branch"] = inst.branch;
  j["delta"] = inst.coframe.delta;
  json res = json::array();
  for (const auto& r : rep.residuals.r) res.push_back(format(r));
  j["residuals"] = res;
  j["nondegeneracy"] = format(rep.nondegeneracy);
  j["surface"] = rep.pass();
  if (cfg.zcr) {
    bool z = is_zero(zcr_residual(zcr_matrices(inst.coframe), inst.equation));
    j["zcr"] = z;
    pass = pass && z;
  }
  if (cfg.lemma) {
    if (inst.equation.cls == EquationClass::Generic)
      throw UsageError("--lemma needs a class-a or class-b equation");
    LemmaReport lr = inst.equation.cls == EquationClass::A ? lemma1_check(inst.coframe, inst.equation)
                                                           : lemma1star_check(inst.coframe, inst.equation);
    json lj = json::object();
    for (const auto& c : lr.constraints) lj[c.name] = {{"pass", c.pass}, {"residual", c.residual}};
    j["lemma"] = lj;
    pass = pass && lr.pass();
  }
  j["pass"] = pass;
  if (cfg.format == "text") {
    std::ostringstream t;
    t << instance_text(inst);
    for (std::size_t i = 0; i < 3; ++i) t << "  residual " << i + 1 << ": " << res[i].get<std::string>() << "\n";
    t << "  nondegeneracy: " << j["nondegeneracy"].get<std::string>() << "\n";
    if (cfg.zcr) t << "  zcr: " << (j["zcr"].get<bool>() ? "zero" : "nonzero") << "\n";
    if (cfg.lemma)
      for (const auto& [k, v] : j["lemma"].items())
        if (!v["pass"].get<bool>()) t << "  constraint failed: " << k << " (" << v["residual"].get<std::string>() << ")\n";
    t << (pass ? "PASS" : "FAIL") << "\n";
    emit(cfg, t.str());
  } else if (cfg.format == "latex") {
    emit(cfg, latex_document(inst));
  } else {
    emit_json(cfg, j);
  }
  return pass ? kPass : kFail;
}

int cmd_catalog(const RunConfig& cfg) {
  if (cfg.action == "list") {
    if (cfg.format == "json") {
      emit_json(cfg, json(catalog_names()));
    } else {
      std::string t;
      for (const auto& n : catalog_names()) t += n + "\n";
      emit(cfg, t);
    }
    return kPass;
  }
  if (cfg.action != "show") throw UsageError("catalog action must be list or show");
  if (cfg.name.empty()) throw UsageError("catalog show needs a name");
  FamilyInstance inst = catalog(cfg.name);
  if (cfg.format == "text")
    emit(cfg, instance_text(inst));
  else if (cfg.format == "latex")
    emit(cfg, latex_document(inst));
  else
    emit_json(cfg, instance_to_json(inst));
  return kPass;
}

int cmd_conservation(const RunConfig& cfg) {
  FamilyInstance inst = load_instance(cfg.source);
  if (cfg.shift.empty() != cfg.speed.empty()) throw UsageError("--shift and --speed go together");
  if (!cfg.shift.empty()) inst = shifted_frame(inst, parse(cfg.shift), parse(cfg.speed));
  if (cfg.orientation != 1 && cfg.orientation != -1) throw UsageError("--orientation must be 1 or -1");
  if (cfg.center != "zero" && cfg.center != "infinity") throw UsageError("--center must be zero or infinity");
  PfaffianOptions opt;
  opt.orientation = cfg.orientation;
  ClosedFormReport cf = closed_form_check(inst.coframe, inst.equation, opt);
  json j;
  j["command"] = "conservation";
  j["name"] = inst.name;
  j["closed_form"] = {{"defect", format(cf.defect)}, {"integrability", format(cf.integrability)}, {"pass", cf.pass()}};
  bool pass = cf.pass();
  json pairs = json::array();
  try {
    auto ps = series_densities(inst.coframe, inst.equation, cfg.param,
                               cfg.center == "zero" ? SeriesCenter::Zero : SeriesCenter::Infinity, cfg.order);
    for (const auto& p : ps) {
      pairs.push_back({{"order", p.order},
                       {"density", format(p.density)},
                       {"flux", format(p.flux)},
                       {"trivial", p.trivial},
                       {"verified", p.verified}});
      pass = pass && p.verified;
    }
    j["pairs"] = pairs;
  } catch (const SeriesError& e) {
    j["pairs"] = pairs;
    j["series_error"] = e.what();
    pass = false;
  }
  j["pass"] = pass;
  if (cfg.format == "text") {
    std::ostringstream t;
    t << inst.name << "\n  closed form: " << (cf.pass() ? "pass" : "fail") << "\n";
    for (const auto& p : j["pairs"])
      t << "  [" << p["order"].get<int>() << "] T = " << p["density"].get<std::string>()
        << ", X = " << p["flux"].get<std::string>() << (p["verified"].get<bool>() ? " verified" : " NOT verified")
        << (p["trivial"].get<bool>() ? " (trivial)" : "") << "\n";
    if (j.contains("series_error")) t << "  series: " << j["series_error"].get<std::string>() << "\n";
    t << (pass ? "PASS" : "FAIL") << "\n";
    emit(cfg, t.str());
  } else {
    emit_json(cfg, j);
  }
  return pass ? kPass : kFail;
}

json curvature_json(const CurvatureReport& r) {
  return {{"max_abs_K_plus_delta", r.max_abs_K_plus_delta},
          {"mask_fraction", r.mask_fraction},
          {"nx", r.nx},
          {"nt", r.nt},
          {"hx", r.hx},
          {"ht", r.ht},
          {"threshold", r.threshold},
          {"pass", r.pass}};
}

int cmd_curvature(const RunConfig& cfg, bool nx_set, bool nt_set, bool tol_set) {
  json j;
  j["command"] = "curvature";
  bool pass = false;
  if (!cfg.fixture.empty()) {
    Grid g = fixture_grid(cfg.fixture);
    if (nx_set) g.nx = cfg.nx;
    if (nt_set) g.nt = cfg.nt;
    CurvatureField f = brioschi_curvature(metric_fixture(cfg.fixture, g));
    double expected = cfg.fixture == "flat" ? 0.0 : (cfg.fixture == "sphere" ? 1.0 : -1.0);
    double err = 0;
    for (std::size_t i = 0; i < f.K.size(); ++i)
      if (f.valid[i]) err = std::max(err, std::abs(f.K[i] - expected));
    double tol = tol_set ? cfg.tol : 1e-6;
    pass = f.count > 0 && err <= tol;
    j["fixture"] = cfg.fixture;
    j["expected_K"] = expected;
    j["max_abs_error"] = err;
    j["points"] = f.count;
    j["pass"] = pass;
  } else {
    if (cfg.source.catalog.empty()) throw UsageError("curvature needs --catalog with --solution, or --fixture");
    CurvaturePreset p;
    try {
      p = curvature_preset(cfg.source.catalog, cfg.solution, cfg.nx, cfg.nt);
    } catch (const NumericError& e) {
      throw UsageError(e.what());
    }
    j["name"] = p.instance.name;
    j["solution"] = p.sampler.name;
    try {
      CurvatureReport r = curvature_report(p.instance.coframe, p.sampler, p.grid, p.env, &p.instance.equation, cfg.tol);
      j["report"] = curvature_json(r);
      pass = r.pass;
    } catch (const NumericError& e) {
      j["error"] = e.what();
    }
    j["pass"] = pass;
  }
  if (cfg.format == "text") {
    std::ostringstream t;
    for (const auto& [k, v] : j.items())
      if (k != "command") t << k << ": " << v.dump() << "\n";
    emit(cfg, t.str());
  } else {
    emit_json(cfg, j);
  }
  return pass ? kPass : kFail;
}

int cmd_export(const RunConfig& cfg) {
  FamilyInstance inst = load_instance(cfg.source);
  if (cfg.format == "latex") {
    emit(cfg, latex_document(inst));
  } else if (cfg.format == "text") {
    emit(cfg, instance_text(inst));
  } else {
    json j;
    j["name"] = inst.name;
    j["coframe"] = coframe_to_json(inst.coframe);
    j["equation"] = equation_to_json(inst.equation);
    emit_json(cfg, j);
  }
  return kPass;
}

int cmd_selftest(const RunConfig& cfg) {
  std::uint64_t seed = cfg.seed ? *cfg.seed : seed_from_env(20240601);
  Random rng(seed);
  std::vector<PropertyResult> results{leibniz_property(rng, cfg.cases), commutation_property(rng, cfg.cases),
                                      round_trip_property(rng, cfg.cases), ring_property(rng, cfg.cases),
                                      chain_rule_fd_property(rng, std::max(1, cfg.cases / 10))};
  PropertyResult tri;
  tri.name = "oracle-triangle";
  for (Branch b : all_branches()) {
    for (int sign : {1, -1})
      for (int delta : admissible_deltas(b)) {
        auto spec = rng.branch_binding(b, sign, delta);
        ++tri.cases;
        if (!spec) {
          if (tri.failures++ == 0) tri.first_failure = branch_id(b) + ": no admissible binding";
          continue;
        }
        FamilyInstance inst = construct(*spec);
        bool ok = oracle_triangle(inst).all();
        for (const auto& [name, c] : coframe_mutations(inst)) {
          FamilyInstance m = inst;
          m.coframe = c;
          ok = ok && oracle_triangle(m).none();
        }
        if (!ok && tri.failures++ == 0) tri.first_failure = branch_id(b) + " sign " + std::to_string(sign);
      }
  }
  results.push_back(tri);
  bool pass = true;
  json j;
  j["command"] = "selftest";
  j["seed"] = seed;
  json rs = json::array();
  for (const auto& r : results) {
    json e = {{"name", r.name}, {"cases", r.cases}, {"failures", r.failures}, {"pass", r.pass()}};
    if (r.max_error > 0) e["max_error"] = r.max_error;
    if (!r.first_failure.empty()) e["first_failure"] = r.first_failure;
    rs.push_back(e);
    pass = pass && r.pass();
  }
  j["results"] = rs;
  j["pass"] = pass;
  if (cfg.format == "text") {
    std::ostringstream t;
    t << "seed " << seed << "\n";
    for (const auto& r : results)
      t << (r.pass() ? "PASS " : "FAIL ") << r.name << " (" << r.cases << " cases)"
        << (r.first_failure.empty() ? "" : ": " + r.first_failure) << "\n";
    emit(cfg, t.str());
  } else {
    emit_json(cfg, j);
  }
  return pass ? kPass : kFail;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"pssforge: verification toolkit for pseudospherical and spherical evolution equations"};
  app.require_subcommand(1);
  app.fallthrough();
  RunConfig cfg;
  auto formats = CLI::IsMember({"json", "text", "latex"});
  app.add_option("--format", cfg.format, "Output format")->check(formats)->default_val("json");
  app.add_option("-o,--output", cfg.output, "Write the report to a file instead of stdout");

  auto* verify = app.add_subcommand("verify", "Check the structure equations (and optionally ZCR and shape constraints)");
  add_source_options(verify, cfg.source);
  verify->add_flag("--lemma", cfg.lemma, "Also run the shape-constraint checker");
  verify->add_flag("--zcr", cfg.zcr, "Also check the zero-curvature representation");

  auto* cat = app.add_subcommand("catalog", "List catalog entries or show one");
  cat->add_option("action", cfg.action, "list or show")->check(CLI::IsMember({"list", "show"}));
  cat->add_option("name", cfg.name, "Entry name for show");

  auto* cons = app.add_subcommand("conservation", "Closed-form check and series conservation laws");
  add_source_options(cons, cfg.source);
  cons->add_option("--order", cfg.order, "Number of nonzero density/flux pairs")->default_val(2)->check(CLI::Range(1, 6));
  cons->add_option("--variable", cfg.param, "Expansion parameter")->default_val("eta");
  cons->add_option("--center", cfg.center, "Expansion center: zero or infinity")->default_val("infinity");
  cons->add_option("--orientation", cfg.orientation, "Pfaffian orientation 1 or -1")->default_val(1);
  cons->add_option("--shift", cfg.shift, "Pull the coframe back along z -> z + shift ...");
  cons->add_option("--speed", cfg.speed, "... and x -> x + speed t (e.g. kdv: --shift eta^2/2 --speed -3*eta^2/2)");

  auto* curv = app.add_subcommand("curvature", "Finite-difference Gaussian curvature of the induced metric");
  curv->add_option("--catalog", cfg.source.catalog, "Catalog entry (sine-gordon, kdv)");
  curv->add_option("--solution", cfg.solution, "kink, soliton or zero")->default_val("kink");
  curv->add_option("--fixture", cfg.fixture, "Analytic metric: flat, sphere or hyperbolic")
      ->check(CLI::IsMember({"flat", "sphere", "hyperbolic"}));
  auto* nx = curv->add_option("--nx", cfg.nx, "Grid points in x")->default_val(400);
  auto* nt = curv->add_option("--nt", cfg.nt, "Grid points in t")->default_val(400);
  auto* tol = curv->add_option("--tol", cfg.tol, "Tolerance on max |K + delta|, or on |K - K_exact| for fixtures (default 1e-6 there)")
                   ->default_val(1e-3);

  auto* exp = app.add_subcommand("export", "Render an instance as JSON, text or a standalone LaTeX document");
  add_source_options(exp, cfg.source);

  auto* self = app.add_subcommand("selftest", "Randomized kernel properties and the oracle triangle");
  self->add_option("--cases", cfg.cases, "Cases per property")->default_val(200)->check(CLI::PositiveNumber);
  self->add_option("--seed", cfg.seed, "Random seed (default: PSSFORGE_SEED or a fixed value)");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return kUsage;
  }

  try {
    if (*verify) return cmd_verify(cfg);
    if (*cat) return cmd_catalog(cfg);
    if (*cons) return cmd_conservation(cfg);
    if (*curv) return cmd_curvature(cfg, nx->count() > 0, nt->count() > 0, tol->count() > 0);
    if (*exp) return cmd_export(cfg);
    if (*self) return cmd_selftest(cfg);
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kUsage;
  }
  return kUsage;
}
