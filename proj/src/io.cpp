#include "pssforge/io.hpp"

#include <set>

namespace pssforge {

namespace {

void only_keys(const json& j, std::initializer_list<const char*> allowed, const std::string& what) {
  if (!j.is_object()) throw FormatError(what + ": expected an object");
  std::set<std::string> ok(allowed.begin(), allowed.end());
  for (const auto& [k, v] : j.items())
    if (!ok.count(k)) throw FormatError(what + ": unknown key '" + k + "'");
}

const json& need(const json& j, const char* key, const std::string& what) {
  if (!j.contains(key)) throw FormatError(what + ": missing key '" + key + "'");
  return j.at(key);
}

Expr expr_of(const json& j, const std::string& what) {
  if (j.is_number_integer()) return Expr::integer(j.get<long>());
  if (!j.is_string()) throw FormatError(what + ": expected an expression string");
  try {
    return parse(j.get<std::string>());
  } catch (const ParseError& e) {
    throw FormatError(what + ": " + e.what());
  }
}

int int_of(const json& j, const std::string& what) {
  if (!j.is_number_integer()) throw FormatError(what + ": expected an integer");
  return j.get<int>();
}

int delta_of(const json& j) {
  int d = int_of(j, "delta");
  if (d != 1 && d != -1) throw FormatError("delta must be +1 or -1");
  return d;
}

JetVar jet_of(const json& j, const std::string& what) {
  Expr e = expr_of(j, what);
  if (e.kind() != NodeKind::Jet) throw FormatError(what + ": expected a jet variable name");
  return e.jet_var();
}

std::string str(const Expr& e) { return format(e); }

}  // namespace

json parse_json(const std::string& text) {
  try {
    return json::parse(text);
  } catch (const json::parse_error& e) {
    throw FormatError("invalid JSON at byte " + std::to_string(e.byte) + ": " + e.what());
  }
}

json context_to_json(const Context& ctx) {
  json j = json::object();
  json sr = json::array();
  for (const auto& s : ctx.side_relations()) sr.push_back({{"symbol", s.symbol}, {"square", str(s.square)}});
  json od = json::array();
  Expr u = Expr::param("u");
  for (const auto& r : ctx.ode_rules()) {
    Expr rhs = num(0);
    for (int k = 0; k < r.order; ++k) rhs = rhs + r.coefficients[static_cast<std::size_t>(k)] * Expr::atom(r.function, u, k);
    od.push_back({{"fn", r.function}, {"order", r.order}, {"rhs", str(normalize(rhs))}});
  }
  if (!sr.empty()) j["side_relations"] = sr;
  if (!od.empty()) j["ode_rules"] = od;
  return j;
}

Context context_from_json(const json& j) {
  Context ctx;
  try {
    if (j.contains("side_relations")) {
      for (const auto& s : j.at("side_relations")) {
        only_keys(s, {"symbol", "square"}, "side relation");
        const json& sym = need(s, "symbol", "side relation");
        if (!sym.is_string()) throw FormatError("side relation: symbol must be a string");
        ctx.add_side_relation(sym.get<std::string>(), expr_of(need(s, "square", "side relation"), "square"));
      }
    }
    if (j.contains("ode_rules")) {
      for (const auto& r : j.at("ode_rules")) {
        only_keys(r, {"fn", "order", "rhs"}, "ode rule");
        const json& fn = need(r, "fn", "ode rule");
        if (!fn.is_string()) throw FormatError("ode rule: fn must be a string");
        OdeRule rule;
        rule.function = fn.get<std::string>();
        rule.order = int_of(need(r, "order", "ode rule"), "order");
        if (rule.order < 1) throw FormatError("ode rule: order must be positive");
        Expr rhs = normalize(expr_of(need(r, "rhs", "ode rule"), "rhs"));
        Expr u = Expr::param("u");
        Bindings lin;
        std::vector<Expr> slots;
        for (int k = 0; k < rule.order; ++k) {
          slots.push_back(Expr::param("__ode" + std::to_string(k)));
          lin.bind(Expr::atom(rule.function, u, k), slots.back());
        }
        Expr flat = substitute(rhs, lin);
        Expr rest = flat;
        for (int k = 0; k < rule.order; ++k) {
          Expr c = partial(flat, slots[static_cast<std::size_t>(k)]);
          rule.coefficients.push_back(c);
          rest = rest - c * slots[static_cast<std::size_t>(k)];
        }
        bool constant = true;
        for (const auto& c : rule.coefficients)
          for (const auto& sym : free_symbols(c))
            if (sym.kind() != NodeKind::Param || sym.name().rfind("__ode", 0) == 0 || sym.name() == "u") constant = false;
        if (!constant || !normalize(rest).is_zero() || !function_names(flat).empty())
          throw FormatError("ode rule for '" + rule.function + "' must be linear in " + rule.function +
                            "^(k)(u), k < order, with constant coefficients");
        ctx.add_ode_rule(std::move(rule));
      }
    }
  } catch (const ExprError& e) {
    throw FormatError(e.what());
  }
  return ctx;
}

json coframe_to_json(const Coframe& c) {
  json j;
  j["delta"] = c.delta;
  json f = json::array();
  for (const auto& row : c.f) f.push_back({str(row[0]), str(row[1])});
  j["f"] = f;
  json ctx = context_to_json(c.context);
  for (const auto& [k, v] : ctx.items()) j[k] = v;
  return j;
}

Coframe coframe_from_json(const json& j) {
  only_keys(j, {"delta", "f", "side_relations", "ode_rules"}, "coframe");
  Coframe c;
  c.delta = delta_of(need(j, "delta", "coframe"));
  const json& f = need(j, "f", "coframe");
  if (!f.is_array() || f.size() != 3) throw FormatError("coframe: f must be a 3x2 array");
  for (std::size_t i = 0; i < 3; ++i) {
    if (!f[i].is_array() || f[i].size() != 2) throw FormatError("coframe: f must be a 3x2 array");
    for (std::size_t k = 0; k < 2; ++k)
      c.f[i][k] = expr_of(f[i][k], "f" + std::to_string(i + 1) + std::to_string(k + 1));
  }
  c.context = context_from_json(j);
  return c;
}

json equation_to_json(const EquationSpec& eq) {
  json j;
  j["class"] = class_name(eq.cls);
  switch (eq.cls) {
    case EquationClass::A:
      j["lambda"] = str(eq.lambda);
      [[fallthrough]];
    case EquationClass::B:
      j["A"] = str(eq.A);
      j["B"] = str(eq.B);
      break;
    case EquationClass::Generic: {
      json rules = json::array();
      for (const auto& r : eq.rules) rules.push_back({{"var", r.var.name()}, {"rhs", str(r.rhs)}});
      j["rules"] = rules;
      break;
    }
  }
  json ctx = context_to_json(eq.context);
  for (const auto& [k, v] : ctx.items()) j[k] = v;
  return j;
}

EquationSpec equation_from_json(const json& j) {
  only_keys(j, {"class", "rules", "A", "B", "lambda", "side_relations", "ode_rules"}, "equation");
  const json& cls = need(j, "class", "equation");
  if (!cls.is_string()) throw FormatError("equation: class must be a string");
  std::string c = cls.get<std::string>();
  EquationSpec eq;
  if (c == "a") {
    Expr lam = j.contains("lambda") ? expr_of(j.at("lambda"), "lambda") : parse("lam");
    eq = EquationSpec::class_a(lam, expr_of(need(j, "A", "equation"), "A"), expr_of(need(j, "B", "equation"), "B"));
  } else if (c == "b") {
    eq = EquationSpec::class_b(expr_of(need(j, "A", "equation"), "A"), expr_of(need(j, "B", "equation"), "B"));
  } else if (c == "generic") {
    const json& rules = need(j, "rules", "equation");
    if (!rules.is_array() || rules.size() != 1)
      throw FormatError("equation: generic class takes exactly one rule");
    only_keys(rules[0], {"var", "rhs"}, "rule");
    eq = EquationSpec::generic(jet_of(need(rules[0], "var", "rule"), "var"), expr_of(need(rules[0], "rhs", "rule"), "rhs"));
  } else {
    throw FormatError("equation: class must be \"a\", \"b\" or \"generic\"");
  }
  eq.context = context_from_json(j);
  return eq;
}

json branch_spec_to_json(const BranchSpec& s) {
  json j;
  j["branch"] = branch_id(s.branch);
  j["sign"] = s.sign > 0 ? "+" : "-";
  j["delta"] = s.delta;
  json p = json::object();
  for (const auto& [k, v] : s.params) p[k] = str(v);
  j["params"] = p;
  json f = json::object();
  for (const auto& [k, v] : s.functions) {
    json e;
    e["mode"] = v.formal ? "formal" : "closed";
    if (!v.formal) {
      e["body"] = str(v.body);
      if (!v.vars.empty()) e["vars"] = v.vars;
    }
    if (v.arg) e["arg"] = str(*v.arg);
    f[k] = e;
  }
  j["functions"] = f;
  if (!s.side_relations.empty()) {
    Context ctx;
    for (const auto& r : s.side_relations) ctx.add_side_relation(r.symbol, r.square);
    j["side_relations"] = context_to_json(ctx)["side_relations"];
  }
  return j;
}

BranchSpec branch_spec_from_json(const json& j) {
  only_keys(j, {"branch", "sign", "delta", "params", "functions", "side_relations"}, "branch spec");
  BranchSpec s;
  const json& b = need(j, "branch", "branch spec");
  if (!b.is_string()) throw FormatError("branch spec: branch must be a string");
  try {
    s.branch = parse_branch(b.get<std::string>());
  } catch (const ExprError& e) {
    throw FormatError(e.what());
  }
  if (j.contains("sign")) {
    const json& sg = j.at("sign");
    if (sg == "+" || sg == 1) s.sign = 1;
    else if (sg == "-" || sg == -1) s.sign = -1;
    else throw FormatError("branch spec: sign must be \"+\" or \"-\"");
  }
  if (j.contains("delta")) s.delta = delta_of(j.at("delta"));
  if (j.contains("params")) {
    if (!j.at("params").is_object()) throw FormatError("branch spec: params must be an object");
    for (const auto& [k, v] : j.at("params").items()) s.params[k] = expr_of(v, "param " + k);
  }
  if (j.contains("functions")) {
    if (!j.at("functions").is_object()) throw FormatError("branch spec: functions must be an object");
    for (const auto& [k, v] : j.at("functions").items()) {
      only_keys(v, {"mode", "body", "vars", "arg"}, "function " + k);
      FunctionSpec f;
      std::string mode = v.value("mode", std::string("formal"));
      if (mode == "closed") {
        f.formal = false;
        f.body = expr_of(need(v, "body", "function " + k), "body");
        if (v.contains("vars")) {
          if (!v.at("vars").is_array()) throw FormatError("function " + k + ": vars must be an array");
          for (const auto& x : v.at("vars")) {
            if (!x.is_string()) throw FormatError("function " + k + ": vars must be strings");
            f.vars.push_back(x.get<std::string>());
          }
        }
      } else if (mode != "formal") {
        throw FormatError("function " + k + ": mode must be \"formal\" or \"closed\"");
      }
      if (v.contains("arg")) f.arg = expr_of(v.at("arg"), "arg");
      s.functions[k] = f;
    }
  }
  if (j.contains("side_relations"))
    for (const auto& r : context_from_json(j).side_relations()) s.side_relations.push_back(r);
  return s;
}

json instance_to_json(const FamilyInstance& inst) {
  json j;
  j["name"] = inst.name;
  j["branch"] = inst.branch;
  j["sign"] = inst.sign > 0 ? "+" : "-";
  j["equation"] = equation_to_json(inst.equation);
  j["rhs"] = str(inst.rhs);
  j["coframe"] = coframe_to_json(inst.coframe);
  j["flags"] = inst.flags;
  json b = json::object();
  for (const auto& [k, v] : inst.bindings) b[k] = str(v);
  j["bindings"] = b;
  j["free_parameters"] = inst.free_parameters;
  return j;
}

}  // namespace pssforge
