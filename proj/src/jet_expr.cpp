#include "pssforge/jet_expr.hpp"

#include <cmath>
#include <set>

namespace pssforge {

namespace {

void walk(const Expr& e, const std::function<void(const Expr&)>& f) {
  f(e);
  for (const auto& c : e.children()) walk(c, f);
}

std::string symbol_key(const Expr& e) {
  switch (e.kind()) {
    case NodeKind::Param: return "p:" + e.name();
    case NodeKind::Jet: return "j:" + e.jet_var().name();
    case NodeKind::Atom: return "f:" + e.name();
    default: throw ExprError("bindings may only target parameters, jet variables or atoms");
  }
}

std::set<std::string> value_keys(const Expr& e, const std::set<std::string>& skip_params) {
  std::set<std::string> out;
  walk(e, [&](const Expr& n) {
    if (n.kind() == NodeKind::Param && skip_params.count(n.name())) return;
    if (n.kind() == NodeKind::Param || n.kind() == NodeKind::Jet || n.kind() == NodeKind::Atom)
      out.insert(symbol_key(n));
  });
  return out;
}

void check_acyclic(const Bindings& b) {
  std::map<std::string, std::set<std::string>> edges;
  for (const auto& [k, v] : b.symbols) {
    auto keys = value_keys(v, {});
    edges[symbol_key(k)].insert(keys.begin(), keys.end());
  }
  for (const auto& f : b.functions) {
    auto keys = value_keys(f.body, std::set<std::string>(f.params.begin(), f.params.end()));
    edges["f:" + f.name].insert(keys.begin(), keys.end());
  }
  std::map<std::string, int> state;
  std::function<void(const std::string&)> visit = [&](const std::string& n) {
    state[n] = 1;
    auto it = edges.find(n);
    if (it != edges.end()) {
      for (const auto& m : it->second) {
        if (!edges.count(m)) continue;
        if (state[m] == 1) throw ExprError("cyclic binding detected involving '" + m.substr(2) + "'");
        if (state[m] == 0) visit(m);
      }
    }
    state[n] = 2;
  };
  for (const auto& [n, _] : edges)
    if (state[n] == 0) visit(n);
}

}  // namespace

Expr normalize(const Expr& e, const Context& ctx) { return Algebra(ctx).normalize(e); }

Expr partial(const Expr& e, JetVar v, const Context& ctx) { return partial(e, Expr::jet(v), ctx); }

Expr partial(const Expr& e, const Expr& symbol, const Context& ctx) {
  Algebra alg(ctx);
  return alg.to_expr(alg.partial(alg.from_expr(e), symbol));
}

Expr total_dx(const Expr& e, const Context& ctx) {
  Algebra alg(ctx);
  return alg.to_expr(alg.total_dx(alg.from_expr(e)));
}

Expr total_dt(const Expr& e, const Context& ctx) {
  Algebra alg(ctx);
  return alg.to_expr(alg.total_dt(alg.from_expr(e)));
}

RatFunc substitute(const Algebra& alg, const RatFunc& f, const Bindings& bindings) {
  check_acyclic(bindings);
  std::map<Expr, RatFunc> simple;
  for (const auto& [k, v] : bindings.symbols) {
    Expr key = k;
    if (k.kind() == NodeKind::Atom) {
      RatFunc kr = alg.kernel(k);
      if (kr.num.size() != 1 || !kr.den.empty() || kr.num.leading().first.size() != 1)
        throw ExprError("atom binding key reduces to a non-atom under the context");
      key = kr.num.leading().first[0].first;
    }
    simple.emplace(key, alg.from_expr(v));
  }

  struct Prepared {
    std::vector<Expr> placeholders;
    RatFunc body;
  };
  std::map<std::string, Prepared> functions;
  for (const auto& fb : bindings.functions) {
    Prepared p;
    Bindings rename;
    for (std::size_t i = 0; i < fb.params.size(); ++i) {
      Expr ph = Expr::param("__arg" + std::to_string(i) + "_" + fb.name);
      p.placeholders.push_back(ph);
      rename.bind(parse(fb.params[i]), ph);
    }
    RatFunc body = alg.from_expr(fb.body);
    p.body = rename.symbols.empty() ? body : substitute(alg, body, rename);
    functions.emplace(fb.name, std::move(p));
  }

  KernelMap map;
  map = [&](const Expr& k) -> std::optional<RatFunc> {
    if (auto it = simple.find(k); it != simple.end()) return it->second;
    if (k.kind() != NodeKind::Atom) return std::nullopt;
    auto it = functions.find(k.name());
    if (it == functions.end()) return std::nullopt;
    const Prepared& p = it->second;
    if (p.placeholders.size() != k.children().size())
      throw ExprError("function binding for '" + k.name() + "' has the wrong number of arguments");
    RatFunc d = p.body;
    for (std::size_t i = 0; i < p.placeholders.size(); ++i)
      for (int j = 0; j < k.deriv()[i]; ++j) d = alg.partial(d, p.placeholders[i]);
    std::map<Expr, RatFunc> args;
    for (std::size_t i = 0; i < p.placeholders.size(); ++i)
      args.emplace(p.placeholders[i], alg.substitute(alg.from_expr(k.children()[i]), map));
    return alg.substitute(d, [&](const Expr& kk) -> std::optional<RatFunc> {
      if (auto a = args.find(kk); a != args.end()) return a->second;
      return std::nullopt;
    });
  };
  return alg.substitute(f, map);
}

Expr substitute(const Expr& e, const Bindings& bindings, const Context& ctx) {
  Algebra alg(ctx);
  return alg.to_expr(substitute(alg, alg.from_expr(e), bindings));
}

NumericFunction numeric_function(std::vector<std::function<double(double)>> derivatives) {
  return [ds = std::move(derivatives)](std::span<const double> args, std::span<const int> deriv) {
    if (args.size() != 1) throw NumericError("numeric routine expects one argument");
    auto k = static_cast<std::size_t>(deriv[0]);
    if (k >= ds.size())
      throw NumericError("derivative order " + std::to_string(k) + " exceeds what the routine supplies");
    return ds[k](args[0]);
  };
}

double eval_numeric(const Expr& e, const NumericEnv& env) {
  switch (e.kind()) {
    case NodeKind::Constant:
      return e.value().get_d();
    case NodeKind::Param: {
      auto it = env.params.find(e.name());
      if (it == env.params.end()) throw NumericError("unbound parameter '" + e.name() + "'");
      return it->second;
    }
    case NodeKind::Jet: {
      auto it = env.jets.find(e.jet_var());
      if (it == env.jets.end()) throw NumericError("unbound jet variable '" + e.jet_var().name() + "'");
      return it->second;
    }
    case NodeKind::Atom: {
      auto it = env.functions.find(e.name());
      if (it == env.functions.end()) throw NumericError("unbound function '" + e.name() + "'");
      std::vector<double> args;
      for (const auto& a : e.children()) args.push_back(eval_numeric(a, env));
      return it->second(args, e.deriv());
    }
    case NodeKind::Apply: {
      double u = eval_numeric(e.children()[0], env);
      switch (e.builtin()) {
        case Builtin::Sin: return std::sin(u);
        case Builtin::Cos: return std::cos(u);
        case Builtin::Sinh: return std::sinh(u);
        case Builtin::Cosh: return std::cosh(u);
        case Builtin::Exp: return std::exp(u);
      }
      break;
    }
    case NodeKind::Sum: {
      double s = 0;
      for (const auto& c : e.children()) s += eval_numeric(c, env);
      return s;
    }
    case NodeKind::Product: {
      double p = 1;
      for (const auto& c : e.children()) p *= eval_numeric(c, env);
      return p;
    }
    case NodeKind::Power: {
      double b = eval_numeric(e.children()[0], env);
      int n = e.exponent();
      if (n < 0 && std::fabs(b) < 1e-300) throw NumericError("division by a value below 1e-300");
      return std::pow(b, n);
    }
  }
  throw NumericError("unknown expression node");
}

std::vector<Expr> free_symbols(const Expr& e) {
  std::set<Expr> out;
  walk(e, [&](const Expr& n) {
    if (n.kind() == NodeKind::Param || n.kind() == NodeKind::Jet) out.insert(n);
  });
  return {out.begin(), out.end()};
}

std::vector<std::string> function_names(const Expr& e) {
  std::set<std::string> out;
  walk(e, [&](const Expr& n) {
    if (n.kind() == NodeKind::Atom) out.insert(n.name());
  });
  return {out.begin(), out.end()};
}

bool contains_t_derivative(const Expr& e) {
  bool found = false;
  walk(e, [&](const Expr& n) {
    if (n.kind() == NodeKind::Jet && n.jet_var().t) found = true;
  });
  return found;
}

}  // namespace pssforge
