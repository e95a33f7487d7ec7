#include "pssforge/coframe.hpp"

#include <algorithm>

namespace pssforge {

const char* class_name(EquationClass c) {
  switch (c) {
    case EquationClass::A: return "a";
    case EquationClass::B: return "b";
    case EquationClass::Generic: return "generic";
  }
  return "?";
}

EquationSpec EquationSpec::class_a(const Expr& lambda, const Expr& A, const Expr& B) {
  EquationSpec eq;
  eq.cls = EquationClass::A;
  eq.lambda = lambda;
  eq.A = A;
  eq.B = B;
  eq.rules.push_back({JetVar::time(0), lambda * zt(2) + A * z(3) + B});
  return eq;
}

EquationSpec EquationSpec::class_b(const Expr& A, const Expr& B) {
  EquationSpec eq;
  eq.cls = EquationClass::B;
  eq.A = A;
  eq.B = B;
  eq.rules.push_back({JetVar::time(2), A * z(3) + B});
  return eq;
}

EquationSpec EquationSpec::generic(JetVar var, const Expr& rhs) {
  if (!var.t) throw ExprError("evolution rules rewrite a t-derivative variable");
  EquationSpec eq;
  eq.rules.push_back({var, rhs});
  return eq;
}

Context merged_context(const Coframe& c, const EquationSpec& eq) {
  Context ctx = c.context;
  ctx.merge(eq.context);
  return ctx;
}

// ---------------------------------------------------------------------------

RuleReducer::RuleReducer(const Algebra& alg, const EquationSpec& eq) : alg_(alg), cls_(eq.cls) {
  for (const auto& r : eq.rules) {
    if (!r.var.t) throw ExprError("evolution rules rewrite a t-derivative variable");
    RatFunc rhs = alg.from_expr(r.rhs);
    for (const auto& s : alg.symbols(rhs)) {
      if (s.kind() == NodeKind::Jet && s.jet_var().t && cls_ != EquationClass::A)
        throw ExprError("rule for " + r.var.name() + " must not contain t-derivatives");
    }
    base_.emplace_back(r.var, std::move(rhs));
  }
}

std::optional<RatFunc> RuleReducer::image(JetVar v) const {
  if (!v.t) return std::nullopt;
  for (const auto& [var, rhs] : base_) {
    if (v.order == var.order) return rhs;
    if (cls_ == EquationClass::A || v.order < var.order) continue;
    if (auto it = prolonged_.find(v); it != prolonged_.end()) return it->second;
    auto lower = image({v.order - 1, true});
    RatFunc next = alg_.total_dx(*lower);
    prolonged_.emplace(v, next);
    return next;
  }
  return std::nullopt;
}

RatFunc RuleReducer::reduce(const RatFunc& f) const {
  if (base_.empty()) return f;
  return alg_.substitute(f, [&](const Expr& k) -> std::optional<RatFunc> {
    if (k.kind() != NodeKind::Jet) return std::nullopt;
    return image(k.jet_var());
  });
}

RatFunc RuleReducer::time_derivative(const RatFunc& f) const { return reduce(alg_.total_dt(f)); }

// ---------------------------------------------------------------------------

bool ResidualTriple::zero() const {
  return std::all_of(r.begin(), r.end(), [](const Expr& e) { return e.is_zero(); });
}

namespace {

struct Frame {
  RatFunc f[3][2];
};

Frame load(const Algebra& alg, const Coframe& c) {
  Frame fr;
  for (int i = 0; i < 3; ++i)
    for (int j = 0; j < 2; ++j) {
      fr.f[i][j] = alg.from_expr(c.f[static_cast<std::size_t>(i)][static_cast<std::size_t>(j)]);
      if (j == 0) {
        for (const auto& s : alg.symbols(fr.f[i][j]))
          if (s.kind() == NodeKind::Jet && s.jet_var().t)
            throw ExprError("dx-coefficients of a coframe must not contain t-derivatives");
      }
    }
  return fr;
}

void check_delta(int delta) {
  if (delta != 1 && delta != -1) throw ExprError("delta must be +1 or -1");
}

}  // namespace

ResidualTriple structure_residuals(const Coframe& c, const EquationSpec& eq) {
  check_delta(c.delta);
  Context ctx = merged_context(c, eq);
  Algebra alg(ctx);
  RuleReducer rr(alg, eq);
  Frame fr = load(alg, c);
  auto& f = fr.f;
  auto Tt = [&](const RatFunc& g) { return rr.time_derivative(g); };
  auto Dx = [&](const RatFunc& g) { return alg.total_dx(g); };
  auto m = [&](const RatFunc& a, const RatFunc& b) { return alg.mul(a, b); };

  RatFunc r1 = alg.add(alg.sub(Dx(f[0][1]), Tt(f[0][0])), alg.sub(m(f[2][1], f[1][0]), m(f[2][0], f[1][1])));
  RatFunc r2 = alg.add(alg.sub(Dx(f[1][1]), Tt(f[1][0])), alg.sub(m(f[2][0], f[0][1]), m(f[0][0], f[2][1])));
  RatFunc r3 = alg.add(alg.sub(Dx(f[2][1]), Tt(f[2][0])),
                       alg.scale(alg.sub(m(f[1][0], f[0][1]), m(f[0][0], f[1][1])), c.delta));
  ResidualTriple out;
  out.r[0] = alg.to_expr(rr.reduce(r1));
  out.r[1] = alg.to_expr(rr.reduce(r2));
  out.r[2] = alg.to_expr(rr.reduce(r3));
  return out;
}

SurfaceReport verify_describes_surface(const Coframe& c, const EquationSpec& eq) {
  SurfaceReport rep;
  rep.residuals = structure_residuals(c, eq);
  rep.residuals_zero = rep.residuals.zero();
  Context ctx = merged_context(c, eq);
  Algebra alg(ctx);
  rep.nondegeneracy = alg.normalize(c(1, 1) * c(2, 2) - c(1, 2) * c(2, 1));
  rep.nondegenerate = !rep.nondegeneracy.is_zero();
  return rep;
}

// ---------------------------------------------------------------------------
// Complex 2x2 matrices over rational functions

namespace {

struct C {
  RatFunc re, im;
};
using CM = std::array<std::array<C, 2>, 2>;

struct CAlg {
  const Algebra& a;
  C add(const C& x, const C& y) const { return {a.add(x.re, y.re), a.add(x.im, y.im)}; }
  C sub(const C& x, const C& y) const { return {a.sub(x.re, y.re), a.sub(x.im, y.im)}; }
  C mul(const C& x, const C& y) const {
    return {a.sub(a.mul(x.re, y.re), a.mul(x.im, y.im)), a.add(a.mul(x.re, y.im), a.mul(x.im, y.re))};
  }
  C neg(const C& x) const { return {a.neg(x.re), a.neg(x.im)}; }
  CM add(const CM& x, const CM& y) const {
    CM o;
    for (int i = 0; i < 2; ++i)
      for (int j = 0; j < 2; ++j) o[i][j] = add(x[i][j], y[i][j]);
    return o;
  }
  CM sub(const CM& x, const CM& y) const {
    CM o;
    for (int i = 0; i < 2; ++i)
      for (int j = 0; j < 2; ++j) o[i][j] = sub(x[i][j], y[i][j]);
    return o;
  }
  CM mul(const CM& x, const CM& y) const {
    CM o;
    for (int i = 0; i < 2; ++i)
      for (int j = 0; j < 2; ++j) o[i][j] = add(mul(x[i][0], y[0][j]), mul(x[i][1], y[1][j]));
    return o;
  }
  CM map(const CM& x, const std::function<RatFunc(const RatFunc&)>& f) const {
    CM o;
    for (int i = 0; i < 2; ++i)
      for (int j = 0; j < 2; ++j) o[i][j] = {f(x[i][j].re), f(x[i][j].im)};
    return o;
  }
  C det(const CM& x) const { return sub(mul(x[0][0], x[1][1]), mul(x[0][1], x[1][0])); }
  CM adjugate(const CM& x) const {
    CM o;
    o[0][0] = x[1][1];
    o[0][1] = neg(x[0][1]);
    o[1][0] = neg(x[1][0]);
    o[1][1] = x[0][0];
    return o;
  }
};

CM load(const Algebra& a, const Matrix2& m) {
  CM o;
  for (int i = 0; i < 2; ++i)
    for (int j = 0; j < 2; ++j) o[i][j] = {a.from_expr(m[i][j].re), a.from_expr(m[i][j].im)};
  return o;
}

Matrix2 store(const Algebra& a, const CM& m) {
  Matrix2 o;
  for (int i = 0; i < 2; ++i)
    for (int j = 0; j < 2; ++j) o[i][j] = {a.to_expr(m[i][j].re), a.to_expr(m[i][j].im)};
  return o;
}

}  // namespace

Matrix2 real_matrix(const Expr& a, const Expr& b, const Expr& c, const Expr& d) {
  Matrix2 m;
  m[0][0] = {a, num(0)};
  m[0][1] = {b, num(0)};
  m[1][0] = {c, num(0)};
  m[1][1] = {d, num(0)};
  return m;
}

ZcrPair zcr_matrices(const Coframe& c) {
  check_delta(c.delta);
  Algebra alg(c.context);
  ZcrPair p;
  p.context = c.context;
  p.algebra = c.delta == 1 ? LieAlgebra::SL2 : LieAlgebra::SU2;
  Expr half = frac(1, 2);
  for (int col = 1; col <= 2; ++col) {
    auto n = [&](const Expr& e) { return alg.normalize(half * e); };
    const Expr &f1 = c(1, col), &f2 = c(2, col), &f3 = c(3, col);
    Matrix2 m;
    if (c.delta == 1) {
      m = real_matrix(n(f2), n(f1 - f3), n(f1 + f3), n(-f2));
    } else {
      m[0][0] = {num(0), n(f2)};
      m[0][1] = {n(f1), n(f3)};
      m[1][0] = {n(-f1), n(f3)};
      m[1][1] = {num(0), n(-f2)};
    }
    (col == 1 ? p.X : p.T) = m;
  }
  return p;
}

Matrix2 zcr_residual(const ZcrPair& p, const EquationSpec& eq) {
  Context ctx = p.context;
  ctx.merge(eq.context);
  Algebra alg(ctx);
  CAlg ca{alg};
  RuleReducer rr(alg, eq);
  CM X = load(alg, p.X), T = load(alg, p.T);
  CM dtX = ca.map(X, [&](const RatFunc& f) { return rr.time_derivative(f); });
  CM dxT = ca.map(T, [&](const RatFunc& f) { return alg.total_dx(f); });
  CM comm = ca.sub(ca.mul(X, T), ca.mul(T, X));
  CM z = ca.add(ca.sub(dtX, dxT), comm);
  z = ca.map(z, [&](const RatFunc& f) { return rr.reduce(f); });
  return store(alg, z);
}

bool is_zero(const Matrix2& m) {
  for (const auto& row : m)
    for (const auto& e : row)
      if (!e.re.is_zero() || !e.im.is_zero()) return false;
  return true;
}

std::pair<Complex, Complex> traces(const ZcrPair& p) {
  Algebra alg(p.context);
  auto tr = [&](const Matrix2& m) {
    return Complex{alg.normalize(m[0][0].re + m[1][1].re), alg.normalize(m[0][0].im + m[1][1].im)};
  };
  return {tr(p.X), tr(p.T)};
}

Matrix2 conjugate(const Matrix2& M, const Matrix2& S, const Context& ctx) {
  Algebra alg(ctx);
  CAlg ca{alg};
  CM s = load(alg, S);
  return store(alg, ca.mul(ca.mul(s, load(alg, M)), ca.adjugate(s)));
}

ZcrPair gauge_transform(const ZcrPair& p, const Matrix2& S, const EquationSpec* eq) {
  Context ctx = p.context;
  if (eq) ctx.merge(eq->context);
  Algebra alg(ctx);
  CAlg ca{alg};
  CM s = load(alg, S);
  C d = ca.det(s);
  if (!alg.sub(d.re, alg.constant(1)).is_zero() || !d.im.is_zero())
    throw ExprError("gauge matrix must have determinant 1, got " + format(alg.to_expr(d.re)) +
                    (d.im.is_zero() ? "" : " + i*(" + format(alg.to_expr(d.im)) + ")"));
  for (const auto& row : s)
    for (const auto& e : row)
      for (const auto* part : {&e.re, &e.im})
        for (const auto& sym : alg.symbols(*part))
          if (sym.kind() == NodeKind::Jet && sym.jet_var().t)
            throw ExprError("gauge matrix must not contain t-derivatives");
  CM sinv = ca.adjugate(s);
  EquationSpec none;
  // class-a laws are not prolonged, so D_t S stays formal there
  RuleReducer rr(alg, eq && eq->cls != EquationClass::A ? *eq : none);
  CM dxS = ca.map(s, [&](const RatFunc& f) { return alg.total_dx(f); });
  CM dtS = ca.map(s, [&](const RatFunc& f) { return rr.time_derivative(f); });
  CM X = ca.add(ca.mul(ca.mul(s, load(alg, p.X)), sinv), ca.mul(dxS, sinv));
  CM T = ca.add(ca.mul(ca.mul(s, load(alg, p.T)), sinv), ca.mul(dtS, sinv));
  ZcrPair out;
  out.X = store(alg, X);
  out.T = store(alg, T);
  out.algebra = p.algebra;
  out.context = ctx;
  return out;
}

// ---------------------------------------------------------------------------
// Shape-constraint checkers

bool LemmaReport::pass() const {
  return std::all_of(constraints.begin(), constraints.end(), [](const ConstraintResult& c) { return c.pass; });
}

std::vector<std::string> LemmaReport::failed() const {
  std::vector<std::string> out;
  for (const auto& c : constraints)
    if (!c.pass) out.push_back(c.name);
  return out;
}

namespace {

LemmaReport lemma_check(const Coframe& c, const EquationSpec& eq, const Decomposition& given, bool star) {
  check_delta(c.delta);
  if (star && eq.cls != EquationClass::B)
    throw ExprError("the z_2t shape checker needs a class-b equation");
  if (!star && eq.cls != EquationClass::A)
    throw ExprError("the z_t - lam z_2t shape checker needs a class-a equation");
  Context ctx = merged_context(c, eq);
  Algebra alg(ctx);
  Frame fr = load(alg, c);
  auto& f = fr.f;
  const RatFunc zero;
  RatFunc Z = alg.jet(JetVar::x(0)), Z1 = alg.jet(JetVar::x(1)), Z2 = alg.jet(JetVar::x(2));
  RatFunc lam = star ? zero : alg.from_expr(eq.lambda);
  RatFunc A = alg.from_expr(eq.A), B = alg.from_expr(eq.B);
  RatFunc delta = alg.constant(c.delta);
  // E multiplies the slope constants in f_p1: z - lam z2 or z2.
  RatFunc E = star ? Z2 : alg.sub(Z, alg.mul(lam, Z2));
  std::string slope = star ? "mu" : "sigma";

  auto jet_free = [&](const RatFunc& r) {
    for (const auto& s : alg.symbols(r))
      if (s.kind() == NodeKind::Jet) return false;
    return true;
  };
  auto depends_only = [&](const RatFunc& r, int max_order) {
    for (const auto& s : alg.symbols(r))
      if (s.kind() == NodeKind::Jet && (s.jet_var().t || s.jet_var().order > max_order)) return false;
    return true;
  };
  auto sum01 = [&](const RatFunc& g) {
    return alg.add(alg.mul(Z1, alg.partial(g, z(0))), alg.mul(Z2, alg.partial(g, z(1))));
  };
  auto pick = [&](const std::string& key, const std::function<RatFunc()>& fallback) {
    auto it = given.find(key);
    return it != given.end() ? alg.from_expr(it->second) : fallback();
  };

  LemmaReport rep;
  auto add = [&](const std::string& name, const RatFunc& residual, bool extra_ok = true) {
    rep.constraints.push_back({name, extra_ok && residual.is_zero(), format(alg.to_expr(residual))});
  };

  RatFunc eta = pick("eta", [&] { return f[0][0]; });
  add("f11_constant", alg.sub(f[0][0], eta), jet_free(eta));

  RatFunc s[2], al[2];
  for (int p = 0; p < 2; ++p) {
    const RatFunc& fp1 = f[p + 1][0];
    std::string idx = std::to_string(p + 2);
    if (star) {
      s[p] = pick("mu" + idx, [&] { return alg.partial(fp1, z(2)); });
      al[p] = pick("alpha" + idx, [&] { return alg.sub(fp1, alg.mul(s[p], Z2)); });
    } else {
      s[p] = pick("sigma" + idx, [&] { return alg.partial(fp1, z(0)); });
      al[p] = pick("alpha" + idx, [&] {
        RatFunc mu = alg.partial(fp1, z(2));
        return alg.sub(alg.sub(fp1, alg.mul(mu, Z2)), alg.mul(s[p], Z));
      });
    }
    RatFunc shape = alg.sub(fp1, alg.add(alg.mul(s[p], E), al[p]));
    add("f" + idx + "1_shape", shape, jet_free(s[p]) && jet_free(al[p]));
  }
  RatFunc s2 = s[0], s3 = s[1], a2 = al[0], a3 = al[1];
  RatFunc& f12 = f[0][1];
  RatFunc& f22 = f[1][1];
  RatFunc& f32 = f[2][1];

  add("f12_depends_on_z_z1", zero, depends_only(f12, 1));
  add("f22_depends_on_z_z1_z2", zero, depends_only(f22, 2));
  add("f32_depends_on_z_z1_z2", zero, depends_only(f32, 2));

  RatFunc norm = alg.add(alg.mul(s2, s2), alg.mul(s3, s3));
  add("A_equation", alg.sub(alg.mul(norm, A), alg.add(alg.mul(s2, alg.partial(f22, z(2))),
                                                       alg.mul(s3, alg.partial(f32, z(2))))));

  RatFunc phi_def = alg.sub(alg.mul(s3, f22), alg.mul(s2, f32));
  RatFunc phi = pick("phi", [&] { return phi_def; });
  add("phi_definition", alg.sub(phi_def, phi), depends_only(phi, 1));

  add("alpha_combination",
      alg.sub(alg.sub(alg.mul(a3, f22), alg.mul(a2, f32)), alg.sub(sum01(f12), alg.mul(E, phi))));

  RatFunc b_rhs = alg.sub(sum01(alg.add(alg.mul(s2, f22), alg.mul(s3, f32))),
                          alg.mul(eta, alg.add(alg.mul(s2, f32), alg.mul(delta, alg.mul(s3, f22)))));
  RatFunc b_bracket = alg.add(alg.mul(alg.mul(alg.mul(s2, s3), alg.add(alg.constant(1), delta)), E),
                              alg.add(alg.mul(s2, a3), alg.mul(delta, alg.mul(s3, a2))));
  b_rhs = alg.add(b_rhs, alg.mul(b_bracket, f12));
  add("B_equation", alg.sub(alg.mul(norm, B), b_rhs));

  RatFunc eta_lhs = alg.mul(eta, alg.sub(alg.mul(s3, f32), alg.mul(delta, alg.mul(s2, f22))));
  RatFunc eta_bracket =
      alg.add(alg.mul(alg.sub(alg.mul(s3, s3), alg.mul(delta, alg.mul(s2, s2))), E),
              alg.sub(alg.mul(s3, a3), alg.mul(delta, alg.mul(s2, a2))));
  add("eta_equation", alg.sub(eta_lhs, alg.add(sum01(phi), alg.mul(eta_bracket, f12))));

  rep.constraints.push_back({slope + "_nonzero", !norm.is_zero(), format(alg.to_expr(norm))});
  RatFunc nondeg = alg.sub(alg.mul(eta, f22), alg.mul(alg.add(alg.mul(s2, E), a2), f12));
  rep.constraints.push_back({"w1_w2_nondegenerate", !nondeg.is_zero(), format(alg.to_expr(nondeg))});

  rep.decomposition["eta"] = alg.to_expr(eta);
  rep.decomposition[slope + "2"] = alg.to_expr(s2);
  rep.decomposition[slope + "3"] = alg.to_expr(s3);
  rep.decomposition["alpha2"] = alg.to_expr(a2);
  rep.decomposition["alpha3"] = alg.to_expr(a3);
  rep.decomposition["phi"] = alg.to_expr(phi);
  return rep;
}

}  // namespace

LemmaReport lemma1_check(const Coframe& c, const EquationSpec& eq, const Decomposition& d) {
  return lemma_check(c, eq, d, false);
}

LemmaReport lemma1star_check(const Coframe& c, const EquationSpec& eq, const Decomposition& d) {
  return lemma_check(c, eq, d, true);
}

}  // namespace pssforge
