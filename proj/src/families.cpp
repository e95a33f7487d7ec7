#include "pssforge/families.hpp"

#include <algorithm>
#include <functional>
#include <set>

namespace pssforge {

namespace {

struct BranchInfo {
  Branch branch;
  const char* id;
  std::vector<int> deltas;
  std::vector<std::string> params;
};

const std::vector<BranchInfo>& branch_table() {
  static const std::vector<BranchInfo> table = {
      {Branch::T32_I, "T32-I", {1}, {"lam", "a", "b"}},
      {Branch::T32_II, "T32-II", {1}, {"lam", "eta", "alpha"}},
      {Branch::T33, "T33", {1, -1}, {"lam", "gamma", "sigma", "r"}},
      {Branch::T35_I, "T35-I", {1}, {"lam", "eta", "rho"}},
      {Branch::T35_II, "T35-II", {1, -1}, {"lam", "eta", "gamma", "sigma", "r"}},
      {Branch::T32s_I, "T32s-I", {1}, {"a", "b", "alpha", "m", "n"}},
      {Branch::T32s_II, "T32s-II", {1}, {"eta", "alpha", "beta"}},
      {Branch::T33s_I, "T33s-I", {1, -1}, {"r"}},
      {Branch::T33s_II, "T33s-II", {1, -1}, {"gamma", "mu", "r", "m"}},
      {Branch::T35s_I, "T35s-I", {1}, {"eta", "rho", "r"}},
      {Branch::T35s_II, "T35s-II", {1, -1}, {"eta", "gamma", "mu", "r", "m"}},
  };
  return table;
}

const BranchInfo& info(Branch b) {
  for (const auto& i : branch_table())
    if (i.branch == b) return i;
  throw ExprError("unknown branch");
}

enum class Rel { NonZero, NonNegative, Zero, Binary };

struct Constraint {
  std::string text;
  Expr value;
  Rel rel;
};

struct FunctionSlot {
  std::string name;
  Expr arg;                        // normalized default argument (single-argument functions)
  std::vector<std::string> vars;   // default closed-form variables
};

/// Branch formulas before sign, delta and parameter bindings are applied.
struct Draft {
  EquationClass cls = EquationClass::B;
  Expr rhs;
  std::array<std::array<Expr, 2>, 3> f;
  Context ctx;
  std::vector<FunctionSlot> functions;
  std::vector<Constraint> constraints;
  std::vector<std::string> flags;
};

class Builder {
 public:
  explicit Builder(Draft& d) : d_(d) {}
  Expr P(const std::string& s) const { return parse(s); }
  Expr Dx(const Expr& e, int n = 1) const {
    Algebra alg(d_.ctx);
    RatFunc r = alg.from_expr(e);
    for (int i = 0; i < n; ++i) r = alg.total_dx(r);
    return alg.to_expr(r);
  }
  void radical(const std::string& symbol, const std::string& square) {
    d_.ctx.add_side_relation(symbol, P(square));
  }
  void require(const std::string& text, const std::string& value, Rel rel) {
    d_.constraints.push_back({text, P(value), rel});
  }
  void require(const std::string& text, const Expr& value, Rel rel) { d_.constraints.push_back({text, value, rel}); }
  void set(int i, int j, const Expr& e) { d_.f[static_cast<std::size_t>(i - 1)][static_cast<std::size_t>(j - 1)] = e; }

 private:
  Draft& d_;
};

Draft draft(Branch b) {
  Draft d;
  Builder B(d);
  auto P = [&](const std::string& s) { return B.P(s); };
  const Expr E = P("z - lam*z2");
  const Expr W = P("z2 + m");
  switch (b) {
    case Branch::T32_I: {
      d.cls = EquationClass::A;
      Expr psi = P("psi(z,z1,z2)");
      d.functions.push_back({"psi", {}, {"z", "z1", "z2"}});
      d.rhs = B.Dx(psi) + P("a") * psi + P("b") * E;
      B.set(1, 1, P("mp*a"));
      B.set(1, 2, P("pm*b"));
      B.set(2, 1, E);
      B.set(2, 2, psi);
      B.set(3, 1, P("pm") * E);
      B.set(3, 2, P("pm") * psi);
      B.require("a in {0,1}", "a", Rel::Binary);
      B.require("b in {0,1}", "b", Rel::Binary);
      B.require("a^2 + b^2 != 0", "a^2 + b^2", Rel::NonZero);
      B.require("a*psi + b*(z - lam*z2) != 0", P("a") * psi + P("b") * E, Rel::NonZero);
      break;
    }
    case Branch::T32_II: {
      d.cls = EquationClass::A;
      Expr h = P("h(z)");
      d.functions.push_back({"h", P("z"), {"u"}});
      Expr Dh = B.Dx(h), D2h = B.Dx(h, 2), D3h = B.Dx(h, 3);
      d.rhs = P("mp") * D3h - B.Dx(E * h) - E * Dh;
      Expr K = E + P("pm*eta^2/2 + mp*alpha^2/2");
      Expr f21 = K / P("alpha");
      Expr f22 = (P("mp") * D2h - P("eta") * Dh - K * h) / P("alpha");
      B.set(1, 1, P("eta"));
      B.set(1, 2, P("mp") * Dh - P("eta") * h);
      B.set(2, 1, f21);
      B.set(2, 2, f22);
      B.set(3, 1, P("pm") * f21 + P("alpha"));
      B.set(3, 2, P("pm") * f22 - P("alpha") * h);
      B.require("alpha != 0", "alpha", Rel::NonZero);
      B.require("h' != 0", "h'(z)", Rel::NonZero);
      break;
    }
    case Branch::T33: {
      d.cls = EquationClass::A;
      B.radical("sq", "gamma + delta*sigma^2");
      Expr phi = P("phi(lam*z1^2 - z^2)"), dphi = P("phi'(lam*z1^2 - z^2)");
      d.functions.push_back({"phi", P("lam*z1^2 - z^2"), {"u"}});
      Expr G = P("2*z1") * dphi;
      d.rhs = B.Dx(P("gamma") * G, 2) - B.Dx(E * phi) - P("2*delta*r^2*z1") * dphi;
      B.set(1, 1, num(0));
      B.set(1, 2, P("-2*r*z1") * dphi);
      B.set(2, 1, P("sigma/gamma") * E + P("pm*r*sq/gamma"));
      B.set(2, 2, P("sigma") * B.Dx(G) + (P("-sigma/gamma") * E + P("mp*r*sq/gamma")) * phi);
      B.set(3, 1, P("pm") * (P("sq/gamma") * E + P("pm*delta*sigma*r/gamma")));
      B.set(3, 2, P("pm") * (P("sq") * B.Dx(G) + (P("-sq/gamma") * E + P("mp*delta*sigma*r/gamma")) * phi));
      B.require("r*gamma != 0", "r*gamma", Rel::NonZero);
      B.require("gamma + delta*sigma^2 >= 0", "gamma + delta*sigma^2", Rel::NonNegative);
      B.require("phi' != 0", dphi, Rel::NonZero);
      break;
    }
    case Branch::T35_I: {
      d.cls = EquationClass::A;
      B.radical("sq", "rho^2 - 1");
      Expr phi = P("phi(z,z1)");
      d.functions.push_back({"phi", {}, {"z", "z1"}});
      Expr Dphi = B.Dx(phi);
      d.rhs = B.Dx(phi, 2) - B.Dx(E * phi);
      B.set(1, 1, P("eta"));
      B.set(1, 2, P("-eta") * phi);
      B.set(2, 1, P("-rho") * E + P("pm*eta*sq"));
      B.set(2, 2, P("-rho") * Dphi + (P("rho") * E + P("mp*eta*sq")) * phi);
      B.set(3, 1, P("mp*sq") * E + P("rho*eta"));
      B.set(3, 2, P("mp*sq") * Dphi + (P("pm*sq") * E - P("eta*rho")) * phi);
      B.require("eta != 0", "eta", Rel::NonZero);
      B.require("rho != 0", "rho", Rel::NonZero);
      B.require("rho^2 - 1 >= 0", "rho^2 - 1", Rel::NonNegative);
      B.require("D_x phi != 0", Dphi, Rel::NonZero);
      break;
    }
    case Branch::T35_II: {
      d.cls = EquationClass::A;
      B.radical("sq", "gamma + delta*sigma^2");
      Expr ell = P("ell(lam*z1^2 - z^2)"), dell = P("ell'(lam*z1^2 - z^2)");
      d.functions.push_back({"ell", P("lam*z1^2 - z^2"), {"u"}});
      Expr Q = P("gamma*eta^2 + r^2");
      Expr Pf = (P("2*eta*gamma*z1") * dell + P("r") * ell) / Q;
      Expr N = (P("-2*r*z1") * dell + P("eta") * ell) / Q;
      Expr DP = B.Dx(Pf);
      d.rhs = P("1/eta") * B.Dx(-Pf, 2) + P("1/eta") * B.Dx(N * E) + P("2*delta*z1") * dell;
      B.set(1, 1, P("eta"));
      B.set(1, 2, N);
      B.set(2, 1, P("sigma/gamma") * E + P("mp*r*sq/gamma"));
      B.set(2, 2, P("-sigma/(eta*gamma)") * DP + P("sigma/(eta*gamma)") * N * E + P("mp*sq/gamma") * Pf);
      B.set(3, 1, P("pm") * (P("sq/gamma") * E + P("mp*delta*sigma*r/gamma")));
      B.set(3, 2, P("pm") * (P("-sq/(eta*gamma)") * DP + P("sq/(eta*gamma)") * N * E +
                             P("mp*delta*sigma/gamma") * Pf));
      B.require("gamma + delta*sigma^2 >= 0", "gamma + delta*sigma^2", Rel::NonNegative);
      B.require("(gamma*eta^2 + r^2)*eta*gamma != 0", "(gamma*eta^2 + r^2)*eta*gamma", Rel::NonZero);
      B.require("ell' != 0", dell, Rel::NonZero);
      break;
    }
    case Branch::T32s_I: {
      Expr psi = P("psi(z,z1,z2)");
      d.functions.push_back({"psi", {}, {"z", "z1", "z2"}});
      d.rhs = B.Dx(psi) + P("a") * psi + P("b*z2 + pm*n*(1 - a)*alpha");
      Expr f21 = P("z2 + alpha");
      Expr f22 = psi + P("mp*(1 - a)*(m/2*z1^2 + n*z1) - alpha*b");
      B.set(1, 1, P("mp*a"));
      B.set(1, 2, P("(1 - a)*(m*z1 + n) + pm*b"));
      B.set(2, 1, f21);
      B.set(2, 2, f22);
      B.set(3, 1, P("pm") * f21);
      B.set(3, 2, P("pm") * f22 - P("(1 - a)*m"));
      B.require("a in {0,1}", "a", Rel::Binary);
      B.require("b in {0,1}", "b", Rel::Binary);
      B.require("(a - 1)*alpha*m = 0", "(a - 1)*alpha*m", Rel::Zero);
      B.require("(a - 1)*b = 0", "(a - 1)*b", Rel::Zero);
      B.require("a*psi + b*z2 + m^2 + n^2 != 0", P("a") * psi + P("b*z2 + m^2 + n^2"), Rel::NonZero);
      break;
    }
    case Branch::T32s_II: {
      Expr h = P("h(z)");
      d.functions.push_back({"h", P("z"), {"u"}});
      Expr Dh = B.Dx(h), D2h = B.Dx(h, 2), D3h = B.Dx(h, 3);
      Expr D = P("alpha + mp*beta");
      Expr m = P("pm*(alpha^2 - beta^2 - eta^2)");
      d.rhs = P("mp") * D3h - B.Dx((z(2) + m) * h) - z(2) * Dh;
      Expr q = z(2) / D;
      B.set(1, 1, P("eta"));
      B.set(1, 2, P("mp") * Dh - P("eta") * h);
      B.set(2, 1, q + P("beta"));
      B.set(2, 2, (P("mp") * D2h - P("eta") * Dh) / D - (q + P("beta")) * h);
      B.set(3, 1, P("pm") * q + P("alpha"));
      B.set(3, 2, (-D2h + P("mp*eta") * Dh) / D + P("mp") * (q + P("pm*alpha")) * h);
      B.require("alpha -+ beta != 0", D, Rel::NonZero);
      B.require("h' != 0", "h'(z)", Rel::NonZero);
      break;
    }
    case Branch::T33s_I: {
      Expr psi = P("psi(z,z1,z2)");
      d.functions.push_back({"psi", {}, {"z", "z1", "z2"}});
      d.functions.push_back({"phi", P("z1"), {"u"}});
      d.ctx.add_ode_rule({"phi", 2, {P("-(r^2 - delta)"), num(0)}});
      Expr phi = P("phi(z1)");
      d.rhs = B.Dx(psi);
      B.set(1, 1, num(0));
      B.set(1, 2, P("-phi'(z1)"));
      B.set(2, 1, z(2));
      B.set(2, 2, psi + P("pm*r") * phi);
      B.set(3, 1, P("pm*r*z2"));
      B.set(3, 2, P("pm*r") * psi + P("delta") * phi);
      B.require("phi != 0", phi, Rel::NonZero);
      B.require("psi not constant", B.Dx(psi), Rel::NonZero);
      d.flags.push_back("zcr-for-differential-consequence");
      break;
    }
    case Branch::T33s_II: {
      B.radical("sq", "gamma + delta*mu^2");
      Expr phi = P("phi(2*m*z + z1^2)"), dphi = P("phi'(2*m*z + z1^2)");
      d.functions.push_back({"phi", P("2*m*z + z1^2"), {"u"}});
      Expr G = P("2*z1") * dphi;
      d.rhs = -B.Dx(P("gamma") * G, 2) - B.Dx(W * phi) + P("2*delta*r^2*z1") * dphi;
      B.set(1, 1, num(0));
      B.set(1, 2, P("-2*r*z1") * dphi);
      B.set(2, 1, P("mu/gamma") * W + P("mp*r*sq/gamma"));
      B.set(2, 2, P("-mu") * B.Dx(G) + (P("-mu/gamma") * W + P("pm*r*sq/gamma")) * phi);
      B.set(3, 1, P("pm*sq/gamma") * W - P("delta*r*mu/gamma"));
      B.set(3, 2, P("mp*sq") * B.Dx(G) + (P("mp*sq/gamma") * W + P("delta*r*mu/gamma")) * phi);
      B.require("gamma != 0", "gamma", Rel::NonZero);
      B.require("gamma + delta*mu^2 >= 0", "gamma + delta*mu^2", Rel::NonNegative);
      B.require("phi' != 0", dphi, Rel::NonZero);
      break;
    }
    case Branch::T35s_I: {
      B.radical("sq", "rho^2 - 1");
      Expr phi = P("phi(z,z1)");
      d.functions.push_back({"phi", {}, {"z", "z1"}});
      Expr Dphi = B.Dx(phi);
      Expr Y = phi - P("r/eta^2*exp(-z1)");
      d.rhs = B.Dx(Y, 2) - B.Dx(z(2) * phi) + P("r*exp(-z1)");
      B.set(1, 1, P("eta"));
      B.set(1, 2, P("-eta") * phi);
      B.set(2, 1, P("-rho*z2 + pm*eta*sq"));
      B.set(2, 2, P("-rho") * Dphi + P("rho*z2 + mp*eta*sq") * Y);
      B.set(3, 1, P("mp*sq*z2 + eta*rho"));
      B.set(3, 2, P("mp*sq") * Dphi + P("pm*sq*z2 - eta*rho") * Y);
      B.require("eta != 0", "eta", Rel::NonZero);
      B.require("rho^2 - 1 >= 0", "rho^2 - 1", Rel::NonNegative);
      B.require("D_x phi != 0", Dphi, Rel::NonZero);
      break;
    }
    case Branch::T35s_II: {
      B.radical("sq", "gamma + delta*mu^2");
      Expr ell = P("ell(z1^2 + 2*m*z)"), dell = P("ell'(z1^2 + 2*m*z)");
      d.functions.push_back({"ell", P("z1^2 + 2*m*z"), {"u"}});
      Expr Q = P("gamma*eta^2 + r^2");
      Expr Pf = (P("2*eta*gamma*z1") * dell - P("r") * ell) / Q;
      Expr N = (P("2*r*z1") * dell + P("eta") * ell) / Q;
      Expr DP = B.Dx(Pf);
      d.rhs = P("1/eta") * B.Dx(Pf, 2) + P("1/eta") * B.Dx(N * W) - P("2*delta*z1") * dell;
      B.set(1, 1, P("eta"));
      B.set(1, 2, N);
      B.set(2, 1, P("mu/gamma") * W + P("mp*r*sq/gamma"));
      B.set(2, 2, P("mu/(eta*gamma)") * DP + P("mu/(eta*gamma)") * N * W + P("pm*sq/gamma") * Pf);
      B.set(3, 1, P("pm") * (P("sq/gamma") * W + P("mp*delta*mu*r/gamma")));
      B.set(3, 2, P("pm") * (P("sq/(eta*gamma)") * DP + P("sq/(eta*gamma)") * N * W +
                             P("pm*delta*mu/gamma") * Pf));
      B.require("gamma + delta*mu^2 >= 0", "gamma + delta*mu^2", Rel::NonNegative);
      B.require("(gamma*eta^2 + r^2)*gamma*eta != 0", "(gamma*eta^2 + r^2)*gamma*eta", Rel::NonZero);
      B.require("ell' != 0", dell, Rel::NonZero);
      break;
    }
  }
  return d;
}

void check_constraint(const Constraint& c, const Expr& v) {
  bool ok = true;
  switch (c.rel) {
    case Rel::NonZero:
      ok = !v.is_zero();
      break;
    case Rel::Zero:
      ok = v.is_zero();
      break;
    case Rel::NonNegative:
      ok = !v.is_constant() || sgn(v.value()) >= 0;
      break;
    case Rel::Binary:
      ok = !v.is_constant() || v.is_zero() || v.is_one();
      break;
  }
  if (!ok) throw ConstraintError("constraint violated: " + c.text + " (value " + format(v) + ")");
}

}  // namespace

const std::vector<Branch>& all_branches() {
  static const std::vector<Branch> out = [] {
    std::vector<Branch> v;
    for (const auto& i : branch_table()) v.push_back(i.branch);
    return v;
  }();
  return out;
}

std::string branch_id(Branch b) { return info(b).id; }

Branch parse_branch(const std::string& id) {
  for (const auto& i : branch_table())
    if (id == i.id) return i.branch;
  throw ExprError("unknown branch '" + id + "'");
}

std::vector<int> admissible_deltas(Branch b) { return info(b).deltas; }

std::vector<std::string> branch_parameters(Branch b) { return info(b).params; }

std::vector<std::string> binary_parameters(Branch b) {
  if (b == Branch::T32_I || b == Branch::T32s_I) return {"a", "b"};
  return {};
}

std::pair<Expr, Expr> as_AB(const Expr& rhs, const Context& ctx) {
  Algebra alg(ctx);
  RatFunc r = alg.from_expr(rhs);
  for (const auto& s : free_symbols(alg.to_expr(r))) {
    if (s.kind() != NodeKind::Jet) continue;
    if (s.jet_var().t) throw ExprError("right-hand side must not contain t-derivatives");
    if (s.jet_var().order >= 4)
      throw ExprError("right-hand side depends on " + s.jet_var().name() + "; only z..z3 are allowed");
  }
  RatFunc A = alg.partial(r, z(3));
  if (alg.contains_symbol(A, z(3))) throw ExprError("right-hand side is not linear in z3");
  RatFunc B = alg.sub(r, alg.mul(A, alg.jet(JetVar::x(3))));
  if (A.is_zero() && B.is_zero()) throw ExprError("A and B vanish identically (A^2 + B^2 = 0)");
  return {alg.to_expr(A), alg.to_expr(B)};
}

FamilyInstance construct(const BranchSpec& spec) {
  const BranchInfo& bi = info(spec.branch);
  if (spec.sign != 1 && spec.sign != -1) throw ExprError("sign must be +1 or -1");
  if (std::find(bi.deltas.begin(), bi.deltas.end(), spec.delta) == bi.deltas.end())
    throw ConstraintError(std::string("branch ") + bi.id + " admits only delta = 1");
  if (spec.branch == Branch::T32s_II && spec.params.count("m"))
    throw ExprError("m is derived in branch T32s-II and cannot be bound");

  Draft d = draft(spec.branch);

  Bindings bind;
  bind.bind("pm", num(spec.sign)).bind("mp", num(-spec.sign)).bind("delta", num(spec.delta));
  std::set<std::string> bound_radicals;
  for (const auto& [k, v] : spec.params) {
    if (k == "pm" || k == "mp" || k == "delta") throw ExprError("'" + k + "' is fixed by sign and delta");
    bind.bind(k, v);
    if (d.ctx.side_relation(k)) bound_radicals.insert(k);
  }

  // Final context: radicals and ODE rules with bindings applied.
  Context ctx;
  ctx.set_max_jet_order(d.ctx.max_jet_order());
  for (const auto& s : spec.side_relations) ctx.add_side_relation(s.symbol, s.square);
  Bindings scalar_only = bind;
  for (const auto& s : d.ctx.side_relations()) {
    if (bound_radicals.count(s.symbol)) continue;
    ctx.add_side_relation(s.symbol, substitute(s.square, scalar_only, ctx));
  }
  for (const auto& r : d.ctx.ode_rules()) {
    OdeRule rr = r;
    for (auto& c : rr.coefficients) c = substitute(c, scalar_only, ctx);
    ctx.add_ode_rule(rr);
  }

  for (const auto& [name, fs] : spec.functions) {
    auto slot = std::find_if(d.functions.begin(), d.functions.end(),
                             [&](const FunctionSlot& s) { return s.name == name; });
    if (slot == d.functions.end())
      throw ExprError("branch " + std::string(bi.id) + " has no function '" + name + "'");
    if (fs.arg && slot->arg.kind() != NodeKind::Constant) {
      Expr want = substitute(slot->arg, scalar_only, ctx);
      if (!normalize(*fs.arg - want, ctx).is_zero())
        throw ExprError("argument of '" + name + "' must be " + format(want));
    }
    if (fs.formal) continue;
    std::vector<std::string> vars = fs.vars.empty() ? slot->vars : fs.vars;
    bind.bind_function(name, vars, substitute(fs.body, scalar_only, ctx));
  }

  auto fin = [&](const Expr& e) { return substitute(e, bind, ctx); };

  for (const auto& r : ctx.ode_rules()) {
    // A closed form must satisfy its ODE rule.
    auto it = spec.functions.find(r.function);
    if (it == spec.functions.end() || it->second.formal) continue;
    Expr u = Expr::param("__u");
    Expr lhs = Expr::atom(r.function, u, r.order);
    for (int j = 0; j < r.order; ++j) lhs = lhs - r.coefficients[static_cast<std::size_t>(j)] * Expr::atom(r.function, u, j);
    Context plain;
    for (const auto& s : ctx.side_relations()) plain.add_side_relation(s.symbol, s.square);
    if (!substitute(lhs, bind, plain).is_zero())
      throw ConstraintError("closed form of '" + r.function + "' does not satisfy its ODE rule");
  }

  if (spec.branch == Branch::T33s_I) {
    Expr gap = normalize(fin(parse("r^2 - delta")), ctx);
    if (gap.is_zero())
      throw ConstraintError("r^2 - delta = 0 is not covered by branch T33s-I (only r^2 - delta > 0 or < 0)");
  }

  FamilyInstance inst;
  inst.branch = bi.id;
  inst.name = bi.id;
  inst.sign = spec.sign;
  inst.flags = d.flags;
  for (const auto& [k, v] : spec.params) inst.bindings[k] = v;

  for (const auto& c : d.constraints) check_constraint(c, fin(c.value));

  for (const auto& r : bound_radicals) {
    Expr sq = substitute(d.ctx.side_relation(r)->square, scalar_only, ctx);
    Expr v = spec.params.at(r);
    if (!normalize(v * v - sq, ctx).is_zero())
      throw ConstraintError("binding for radical '" + r + "' does not square to " + format(sq));
  }

  inst.coframe.delta = spec.delta;
  inst.coframe.context = ctx;
  for (std::size_t i = 0; i < 3; ++i)
    for (std::size_t j = 0; j < 2; ++j) inst.coframe.f[i][j] = fin(d.f[i][j]);
  inst.rhs = fin(d.rhs);
  auto [A, B] = as_AB(inst.rhs, ctx);
  if (d.cls == EquationClass::A)
    inst.equation = EquationSpec::class_a(fin(parse("lam")), A, B);
  else
    inst.equation = EquationSpec::class_b(A, B);
  inst.equation.context = ctx;
  return inst;
}

// ---------------------------------------------------------------------------
// Catalog

namespace {

FunctionSpec closed(const std::string& body, std::vector<std::string> vars = {}) {
  FunctionSpec f;
  f.formal = false;
  f.body = parse(body);
  f.vars = std::move(vars);
  return f;
}

FamilyInstance second_order_entry(const std::string& name, const std::string& psi,
                                  std::map<std::string, Expr> params = {}) {
  BranchSpec s;
  s.branch = Branch::T33s_I;
  s.functions["psi"] = closed(psi, {"z", "z1", "z2"});
  s.params = std::move(params);
  FamilyInstance inst = construct(s);
  inst.name = name;
  inst.free_parameters = {"r"};
  return inst;
}

FamilyInstance sine_gordon() {
  FamilyInstance inst;
  inst.name = "sine-gordon";
  inst.branch = "none";
  inst.coframe.delta = 1;
  inst.coframe.f = {{{num(0), parse("sin(z)/eta")}, {parse("eta"), parse("cos(z)/eta")}, {z(1), num(0)}}};
  inst.rhs = parse("sin(z)");
  inst.equation = EquationSpec::generic(JetVar::time(1), inst.rhs);
  inst.free_parameters = {"eta"};
  return inst;
}

FamilyInstance ch_family(const std::string& name, int sign, std::map<std::string, Expr> params,
                         const std::string& h) {
  BranchSpec s;
  s.branch = Branch::T32_II;
  s.sign = sign;
  s.params = std::move(params);
  s.functions["h"] = closed(h, {"u"});
  FamilyInstance inst = construct(s);
  inst.name = name;
  inst.free_parameters = {"alpha"};
  return inst;
}

}  // namespace

const std::vector<std::string>& catalog_names() {
  static const std::vector<std::string> names = {
      "sine-gordon", "camassa-holm", "kdv",        "ch-r",
      "alt-ch-r",    "kraenkel",     "hunter-saxton", "calogero",
      "tzitzeica",   "bullough-dodd", "dodd-bullough-mikhailov", "tzitzeica-dodd-bullough",
      "rabelo",      "liouville-linked", "deep-water"};
  return names;
}

FamilyInstance catalog(const std::string& name) {
  if (name == "nls" || name == "nls+")
    throw ExprError("'" + name + "' is out of scope: vector-valued systems are not supported");
  if (name == "sine-gordon") return sine_gordon();
  if (name == "camassa-holm") return ch_family(name, 1, {{"lam", num(1)}}, "u + 1");
  if (name == "kdv") return ch_family(name, -1, {{"lam", num(0)}}, "u");
  if (name == "ch-r") return ch_family(name, 1, {}, "u + m");
  if (name == "alt-ch-r") {
    BranchSpec s;
    s.branch = Branch::T32s_II;
    s.side_relations.push_back({"s", parse("r - eta^2")});
    s.params = {{"alpha", num(0)}, {"beta", parse("s")}};
    FamilyInstance inst = construct(s);
    inst.name = name;
    inst.free_parameters = {"eta"};
    return inst;
  }
  if (name == "kraenkel") return second_order_entry(name, "alpha*(z1^2 + z*z2) + beta*z");
  if (name == "deep-water")
    return second_order_entry(name, "alpha*(z1^2 + z*z2) + beta*z",
                              {{"alpha", parse("-3*k/(2*c)")}, {"beta", parse("k^2/c")}});
  if (name == "hunter-saxton") return second_order_entry(name, "-z*z2 - z1^2/2");
  if (name == "calogero") return second_order_entry(name, "-z*z2 - Phi(z1)");
  if (name == "tzitzeica") return second_order_entry(name, "exp(z) - exp(-2*z)");
  if (name == "bullough-dodd") return second_order_entry(name, "-exp(-z) + exp(2*z)");
  if (name == "dodd-bullough-mikhailov") return second_order_entry(name, "-exp(z) - exp(-2*z)");
  if (name == "tzitzeica-dodd-bullough") return second_order_entry(name, "exp(-z) + exp(-2*z)");
  if (name == "rabelo") return second_order_entry(name, "z + z*z1^2 + z^2*z2/2");
  if (name == "liouville-linked") {
    BranchSpec s;
    s.branch = Branch::T35s_I;
    s.side_relations.push_back({"q", parse("1 - 4*eta^4")});
    s.params = {{"r", num(1)}, {"rho", parse("1/(2*eta^2)")}, {"sq", parse("q/(2*eta^2)")}};
    s.functions["phi"] = closed("(exp(-z1) + exp(z1))/(2*eta^2)", {"z", "z1"});
    FamilyInstance inst = construct(s);
    inst.name = name;
    inst.free_parameters = {"eta"};
    return inst;
  }
  throw ExprError("unknown catalog entry '" + name + "'");
}

FamilyInstance rescaled_second_order_family(int sign, const std::map<std::string, Expr>& params) {
  if (sign != 1 && sign != -1) throw ExprError("sign must be +1 or -1");
  Context ctx;
  Bindings b;
  b.bind("pm", num(sign)).bind("mp", num(-sign));
  for (const auto& [k, v] : params) b.bind(k, v);
  auto P = [&](const std::string& s) { return substitute(parse(s), b, ctx); };
  FamilyInstance inst;
  inst.name = "rescaled-second-order";
  inst.branch = "T32s-I";
  inst.sign = sign;
  inst.coframe.delta = 1;
  Expr f22 = P("eta*(psi(z,z1,z2) + mp*m*eta/2*z1^2 + mp*n*z1)");
  inst.coframe.f = {{{num(0), P("m*eta*z1 + n")}, {P("eta*z2"), f22}, {P("pm*eta*z2"), P("pm") * f22 - P("m")}}};
  inst.coframe.f[2][1] = normalize(inst.coframe.f[2][1], ctx);
  inst.rhs = total_dx(P("psi(z,z1,z2)"), ctx);
  auto [A, B] = as_AB(inst.rhs, ctx);
  inst.equation = EquationSpec::class_b(A, B);
  inst.free_parameters = {"eta"};
  for (const auto& [k, v] : params) inst.bindings[k] = v;
  return inst;
}

FamilyInstance shifted_frame(const FamilyInstance& inst, const Expr& shift, const Expr& speed) {
  for (const Expr* e : {&shift, &speed})
    for (const auto& s : free_symbols(*e))
      if (s.kind() == NodeKind::Jet) throw ExprError("shift and speed must be free of jet variables");
  const Context& ctx = inst.coframe.context;
  Bindings hold, move;
  hold.bind(z(0), sym("__shifted"));
  move.bind("__shifted", z(0) + shift);
  FamilyInstance out = inst;
  for (int i = 1; i <= 3; ++i) {
    Expr f1 = substitute(substitute(inst.coframe(i, 1), hold, ctx), move, ctx);
    Expr f2 = substitute(substitute(inst.coframe(i, 2), hold, ctx), move, ctx);
    out.coframe(i, 1) = f1;
    out.coframe(i, 2) = normalize(f2 - speed * f1, ctx);
  }
  if (!structure_residuals(out.coframe, out.equation).zero())
    throw ExprError("the shifted frame does not describe the equation: (z, x) -> (z + " + format(shift) + ", x + " +
                    format(speed) + " t) is not a symmetry");
  out.name = inst.name + "-shifted";
  out.flags.push_back("shifted-frame");
  out.bindings["shift"] = shift;
  out.bindings["speed"] = speed;
  return out;
}

}  // namespace pssforge
