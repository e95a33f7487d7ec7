#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include <map>
#include <string>

#include "pssforge/conservation.hpp"
#include "pssforge/io.hpp"
#include "pssforge/numcheck.hpp"
#include "pssforge/properties.hpp"
#include "pssforge/random.hpp"

namespace py = pybind11;
using namespace pssforge;

namespace {

Context side_context(const std::map<std::string, std::string>& side) {
  Context ctx;
  for (const auto& [s, square] : side) ctx.add_side_relation(s, parse(square));
  return ctx;
}

Bindings symbol_bindings(const std::map<std::string, std::string>& values) {
  Bindings b;
  for (const auto& [k, v] : values) b.bind(parse(k), parse(v));
  return b;
}

NumericEnv numeric_env(const std::map<std::string, double>& values) {
  NumericEnv env;
  for (const auto& [k, v] : values) {
    Expr key = parse(k);
    if (key.kind() == NodeKind::Jet) env.set(key.jet_var(), v);
    else if (key.kind() == NodeKind::Param) env.set(k, v);
    else throw ExprError("'" + k + "' is neither a jet variable nor a parameter");
  }
  return env;
}

std::string verify(const std::string& coframe, const std::string& equation, bool zcr) {
  Coframe c = coframe_from_json(parse_json(coframe));
  EquationSpec eq = equation_from_json(parse_json(equation));
  SurfaceReport rep = verify_describes_surface(c, eq);
  json out;
  out["residuals"] = json::array();
  for (const auto& r : rep.residuals.r) out["residuals"].push_back(format(r));
  out["nondegeneracy"] = format(rep.nondegeneracy);
  out["surface"] = rep.pass();
  bool pass = rep.pass();
  if (zcr) {
    bool z = is_zero(zcr_residual(zcr_matrices(c), eq));
    out["zcr"] = z;
    pass = pass && z;
  }
  out["pass"] = pass;
  return out.dump();
}

std::string conservation(const std::string& coframe, const std::string& equation, const std::string& variable,
                         int order, const std::string& center) {
  Coframe c = coframe_from_json(parse_json(coframe));
  EquationSpec eq = equation_from_json(parse_json(equation));
  if (center != "zero" && center != "infinity") throw ExprError("center must be 'zero' or 'infinity'");
  json out;
  out["closed_form"] = closed_form_check(c, eq).pass();
  out["pairs"] = json::array();
  auto pairs = series_densities(c, eq, variable, center == "zero" ? SeriesCenter::Zero : SeriesCenter::Infinity, order);
  for (const auto& p : pairs)
    out["pairs"].push_back({{"order", p.order},
                            {"density", format(p.density)},
                            {"flux", format(p.flux)},
                            {"trivial", p.trivial},
                            {"verified", p.verified}});
  return out.dump();
}

std::string curvature(const std::string& entry, const std::string& solution, int nx, int nt) {
  CurvaturePreset p = curvature_preset(entry, solution, nx, nt);
  CurvatureReport r = curvature_report(p.instance.coframe, p.sampler, p.grid, p.env, &p.instance.equation);
  json out = {{"max_abs_K_plus_delta", r.max_abs_K_plus_delta},
              {"mask_fraction", r.mask_fraction},
              {"nx", r.nx},
              {"nt", r.nt},
              {"hx", r.hx},
              {"ht", r.ht},
              {"pass", r.pass}};
  return out.dump();
}

std::string properties(int cases, std::uint64_t seed) {
  Random rng(seed);
  json out = json::array();
  for (const auto& r : {leibniz_property(rng, cases), commutation_property(rng, cases), ring_property(rng, cases),
                        round_trip_property(rng, cases), chain_rule_fd_property(rng, cases)})
    out.push_back({{"name", r.name}, {"cases", r.cases}, {"failures", r.failures}, {"pass", r.pass()}});
  return out.dump();
}

}  // namespace

PYBIND11_MODULE(_core, m) {
  m.doc() = "Symbolic verification of pseudospherical and spherical evolution equations";

  auto expr_error = py::register_exception<ExprError>(m, "ExprError", PyExc_ValueError);
  py::register_exception<ParseError>(m, "ParseError", expr_error.ptr());
  py::register_exception<ConstraintError>(m, "ConstraintError", expr_error.ptr());
  py::register_exception<SeriesError>(m, "SeriesError", expr_error.ptr());
  py::register_exception<FormatError>(m, "FormatError", PyExc_ValueError);
  py::register_exception<NumericError>(m, "NumericError", PyExc_ArithmeticError);

  m.def("normalize", [](const std::string& e, const std::map<std::string, std::string>& side) {
    return format(normalize(parse(e), side_context(side)));
  }, py::arg("expr"), py::arg("side_relations") = std::map<std::string, std::string>{});
  m.def("to_latex", [](const std::string& e) { return to_latex(normalize(parse(e))); }, py::arg("expr"));
  m.def("partial", [](const std::string& e, const std::string& v) { return format(partial(parse(e), parse(v))); },
        py::arg("expr"), py::arg("var"));
  m.def("total_dx", [](const std::string& e) { return format(total_dx(parse(e))); }, py::arg("expr"));
  m.def("total_dt", [](const std::string& e) { return format(total_dt(parse(e))); }, py::arg("expr"));
  m.def("substitute", [](const std::string& e, const std::map<std::string, std::string>& b) {
    return format(substitute(parse(e), symbol_bindings(b)));
  }, py::arg("expr"), py::arg("bindings"));
  m.def("eval_numeric", [](const std::string& e, const std::map<std::string, double>& v) {
    return eval_numeric(parse(e), numeric_env(v));
  }, py::arg("expr"), py::arg("values"));

  m.def("catalog_names", [] { return catalog_names(); });
  m.def("catalog", [](const std::string& name) { return instance_to_json(catalog(name)).dump(); }, py::arg("name"));
  m.def("construct", [](const std::string& spec) {
    return instance_to_json(construct(branch_spec_from_json(parse_json(spec)))).dump();
  }, py::arg("spec"));
  m.def("verify", &verify, py::arg("coframe"), py::arg("equation"), py::arg("zcr") = false);
  m.def("conservation", &conservation, py::arg("coframe"), py::arg("equation"), py::arg("variable") = "eta",
        py::arg("order") = 2, py::arg("center") = "infinity");
  m.def("curvature", &curvature, py::arg("entry"), py::arg("solution"), py::arg("nx") = 400, py::arg("nt") = 400);
  m.def("properties", &properties, py::arg("cases") = 100, py::arg("seed") = 20240521);
}
