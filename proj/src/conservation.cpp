#include "pssforge/conservation.hpp"

#include <algorithm>

namespace pssforge {

namespace {

using Series = std::map<int, RatFunc>;

const Expr& angle() {
  static const Expr a = Expr::param(kAngle);
  return a;
}

RatFunc at(const Series& s, int k) {
  auto it = s.find(k);
  return it == s.end() ? RatFunc{} : it->second;
}

void accumulate(const Algebra& alg, Series& s, int k, const RatFunc& v) {
  RatFunc r = alg.add(at(s, k), v);
  if (r.is_zero()) s.erase(k);
  else s[k] = std::move(r);
}

Series smul(const Algebra& alg, const Series& a, const Series& b, int hi) {
  Series out;
  for (const auto& [i, x] : a)
    for (const auto& [j, y] : b)
      if (i + j <= hi) accumulate(alg, out, i + j, alg.mul(x, y));
  return out;
}

Series sadd(const Algebra& alg, const Series& a, const Series& b, const mpq_class& cb = 1) {
  Series out = a;
  for (const auto& [k, v] : b) accumulate(alg, out, k, alg.scale(v, cb));
  return out;
}

int lowest(const Series& s, int fallback) { return s.empty() ? fallback : s.begin()->first; }

/// Laurent coefficients of f in eps.
Series laurent(const Algebra& alg, const RatFunc& f, const Expr& eps) {
  int shift = 0;
  std::vector<Factor> rest;
  for (const auto& fac : f.den) {
    if (!fac.poly.contains(eps)) {
      rest.push_back(fac);
    } else if (fac.poly == Poly::kernel(eps)) {
      shift = fac.exponent;
    } else {
      throw SeriesError("coefficient is not a Laurent polynomial in the expansion parameter");
    }
  }
  RatFunc restden{Poly::constant(1), rest};
  Series out;
  for (int e = 0; e <= f.num.degree_in(eps); ++e) {
    Poly c = f.num.coefficient(eps, e);
    if (c.is_zero()) continue;
    RatFunc r = alg.mul(alg.from_poly(c), restden);
    if (alg.contains_symbol(r, eps))
      throw SeriesError("expansion parameter occurs inside a function argument");
    out[e - shift] = r;
  }
  return out;
}

/// sin and cos (each truncated at order hi) of rho0 + delta, where delta has
/// no eps^0 term and rho0 = quadrant * pi/2.
std::pair<Series, Series> trig(const Algebra& alg, const Series& delta, int quadrant, int hi) {
  Series S, C;
  C[0] = alg.constant(1);
  Series power;
  power[0] = alg.constant(1);
  mpq_class fact = 1;
  for (int n = 1; n <= std::max(hi, 0); ++n) {
    power = smul(alg, power, delta, hi);
    if (power.empty()) break;
    fact *= n;
    mpq_class sign = ((n / 2) % 2 == 0) ? 1 : -1;
    if (n % 2) S = sadd(alg, S, power, sign / fact);
    else C = sadd(alg, C, power, sign / fact);
  }
  static const int s0[] = {0, 1, 0, -1};
  static const int c0[] = {1, 0, -1, 0};
  int q = ((quadrant % 4) + 4) % 4;
  Series sinr = sadd(alg, sadd(alg, {}, C, s0[q]), S, c0[q]);
  Series cosr = sadd(alg, sadd(alg, {}, C, c0[q]), S, -s0[q]);
  return {sinr, cosr};
}

/// Order-by-order solution of rho_x = f31 + sin(rho) f11 + cos(rho) f21.
class Expansion {
 public:
  Expansion(const Algebra& alg, const Coframe& c, const std::string& param, SeriesCenter center)
      : alg_(alg), eps_(Expr::param("__eps")) {
    Bindings b;
    b.bind(param, center == SeriesCenter::Infinity ? num(1) / eps_ : eps_);
    for (int i = 0; i < 3; ++i)
      for (int j = 0; j < 2; ++j) {
        RatFunc f = substitute(alg_, alg_.from_expr(c.f[static_cast<std::size_t>(i)][static_cast<std::size_t>(j)]), b);
        F_[i][j] = laurent(alg_, f, eps_);
      }
    int lo = std::min({lowest(F_[0][0], 0), lowest(F_[1][0], 0), lowest(F_[2][0], 0)});
    if (lo >= 0)
      throw SeriesError("the dx coefficients have no negative power of the expansion variable; "
                        "the recursion for rho would be differential, not algebraic");
    m_ = -lo;
    const RatFunc a11 = at(F_[0][0], lo), a21 = at(F_[1][0], lo), a31 = at(F_[2][0], lo);
    static const int s0[] = {0, 1, 0, -1};
    static const int c0[] = {1, 0, -1, 0};
    bool solvable = false;
    for (int q = 0; q < 4 && quadrant_ < 0; ++q) {
      RatFunc lead = alg_.add(a31, alg_.add(alg_.scale(a11, s0[q]), alg_.scale(a21, c0[q])));
      if (!lead.is_zero()) continue;
      solvable = true;
      RatFunc J = alg_.sub(alg_.scale(a11, c0[q]), alg_.scale(a21, s0[q]));
      if (J.is_zero()) continue;
      quadrant_ = q;
      J_ = J;
    }
    std::string rel = format(alg_.to_expr(a31)) + " + (" + format(alg_.to_expr(a11)) + ")*sin(rho0) + (" +
                      format(alg_.to_expr(a21)) + ")*cos(rho0) = 0";
    if (!solvable) throw SeriesError("leading-order relation has no constant solution: " + rel);
    if (quadrant_ < 0)
      throw SeriesError("leading-order relation " + rel +
                        " has only degenerate (double) roots; the next order is not linear in rho_1");
    rho_.push_back(RatFunc{});
  }

  int quadrant() const { return quadrant_; }
  const Series& F(int i, int j) const { return F_[i][j]; }
  const std::vector<RatFunc>& rho() const { return rho_; }
  const Expr& eps() const { return eps_; }

  Series delta(int upto) const {
    Series d;
    for (int i = 1; i <= upto && i < static_cast<int>(rho_.size()); ++i)
      if (!rho_[static_cast<std::size_t>(i)].is_zero()) d[i] = rho_[static_cast<std::size_t>(i)];
    return d;
  }

  void extend(int K) {
    const Expr u = Expr::param("__u");
    for (int k = static_cast<int>(rho_.size()); k <= K; ++k) {
      int j = k - m_;
      Series d = delta(k - 1);
      d[k] = alg_.kernel(u);
      auto [sinr, cosr] = trig(alg_, d, quadrant_, k);
      RatFunc coef = at(F_[2][0], j);
      coef = alg_.add(coef, at(smul(alg_, sinr, F_[0][0], j), j));
      coef = alg_.add(coef, at(smul(alg_, cosr, F_[1][0], j), j));
      if (j >= 1) coef = alg_.sub(coef, alg_.total_dx(rho_[static_cast<std::size_t>(j)]));
      RatFunc lin = alg_.partial(coef, u);
      if (!alg_.sub(lin, J_).is_zero())
        throw SeriesError("order " + std::to_string(k) + " of the angle series is not linear in rho_" +
                          std::to_string(k));
      RatFunc rest = alg_.substitute(coef, [&](const Expr& kk) -> std::optional<RatFunc> {
        if (kk == u) return RatFunc{};
        return std::nullopt;
      });
      rho_.push_back(alg_.neg(alg_.div(rest, J_)));
    }
  }

  int m() const { return m_; }

 private:
  const Algebra& alg_;
  Expr eps_;
  Series F_[3][2];
  int m_ = 0;
  int quadrant_ = -1;
  RatFunc J_;
  std::vector<RatFunc> rho_;
};

int top_x_order(const Algebra& alg, const RatFunc& f) {
  int n = -1;
  for (const auto& s : alg.symbols(f))
    if (s.kind() == NodeKind::Jet && !s.jet_var().t) n = std::max(n, s.jet_var().order);
  return n;
}

Context combined(const Context& a, const Context& b) {
  Context c = a;
  c.merge(b);
  return c;
}

}  // namespace

Pfaffian pfaffian(const Coframe& c, const PfaffianOptions& opt) {
  if (c.delta == -1 && !opt.spherical)
    throw ExprError("the Pfaffian is defined for pseudospherical coframes; pass the spherical flag for delta = -1");
  if (opt.orientation != 1 && opt.orientation != -1) throw ExprError("orientation must be +1 or -1");
  Algebra alg(c.context);
  Expr s = Expr::apply(opt.spherical ? Builtin::Sinh : Builtin::Sin, angle());
  Expr co = Expr::apply(opt.spherical ? Builtin::Cosh : Builtin::Cos, angle());
  Expr o = num(opt.orientation);
  Pfaffian p;
  p.hyperbolic = opt.spherical;
  p.rho_x = alg.normalize(c(3, 1) + o * (s * c(1, 1) + co * c(2, 1)));
  p.rho_t = alg.normalize(c(3, 2) + o * (s * c(1, 2) + co * c(2, 2)));
  return p;
}

ClosedFormReport closed_form_check(const Coframe& c, const EquationSpec& eq, const PfaffianOptions& opt) {
  Pfaffian p = pfaffian(c, opt);
  Context ctx = merged_context(c, eq);
  Algebra alg(ctx);
  RuleReducer red(alg, eq);
  std::map<std::string, RatFunc> dx{{kAngle, alg.from_expr(p.rho_x)}};
  std::map<std::string, RatFunc> dt{{kAngle, alg.from_expr(p.rho_t)}};
  Expr s = Expr::apply(opt.spherical ? Builtin::Sinh : Builtin::Sin, angle());
  Expr co = Expr::apply(opt.spherical ? Builtin::Cosh : Builtin::Cos, angle());
  RatFunc a = alg.from_expr(co * c(1, 1) - s * c(2, 1));
  RatFunc b = alg.from_expr(co * c(1, 2) - s * c(2, 2));
  ClosedFormReport r;
  r.defect = alg.to_expr(alg.sub(alg.total_dx(b, &dx), red.reduce(alg.total_dt(a, &dt))));
  RatFunc rx = alg.from_expr(p.rho_x), rt = alg.from_expr(p.rho_t);
  r.integrability = alg.to_expr(alg.sub(red.reduce(alg.total_dt(rx, &dt)), alg.total_dx(rt, &dx)));
  return r;
}

AngleSeries angle_series(const Coframe& c, const std::string& param, SeriesCenter center, int terms) {
  Algebra alg(c.context);
  Expansion ex(alg, c, param, center);
  ex.extend(terms - 1);
  AngleSeries out;
  out.quadrant = ex.quadrant();
  for (int k = 0; k < terms; ++k) out.terms.push_back(alg.to_expr(ex.rho()[static_cast<std::size_t>(k)]));
  return out;
}

std::vector<ConservedPair> series_densities(const Coframe& c, const EquationSpec& eq, const std::string& param,
                                            SeriesCenter center, int n) {
  if (n < 1 || n > 6) throw SeriesError("series order must be between 1 and 6");
  Context ctx = merged_context(c, eq);
  Algebra alg(ctx);
  Expansion ex(alg, c, param, center);
  const int lo_a = std::min(lowest(ex.F(0, 0), 0), lowest(ex.F(1, 0), 0));
  const int lo_b = std::min(lowest(ex.F(0, 1), 0), lowest(ex.F(1, 1), 0));
  const int reach = std::max({ex.m(), -lo_a, -lo_b});
  const int start = std::min(lo_a, lo_b);
  std::vector<ConservedPair> out;
  for (int j = start; static_cast<int>(out.size()) < n; ++j) {
    // the remaining coefficients vanish up to the search horizon
    if (j > start + 4 * n + 8) break;
    int K = j + reach;
    ex.extend(std::max(K, 0));
    auto [sinr, cosr] = trig(alg, ex.delta(K), ex.quadrant(), K);
    RatFunc a = alg.sub(at(smul(alg, cosr, ex.F(0, 0), j), j), at(smul(alg, sinr, ex.F(1, 0), j), j));
    RatFunc b = alg.sub(at(smul(alg, cosr, ex.F(0, 1), j), j), at(smul(alg, sinr, ex.F(1, 1), j), j));
    if (a.is_zero() && b.is_zero()) continue;
    ConservedPair p;
    p.density = alg.to_expr(a);
    p.flux = alg.to_expr(b);
    p.order = j;
    p.trivial = top_x_order(alg, a) < 0 || euler_operator(p.density, ctx).is_zero();
    p.verified = verify_conserved(p, eq, ctx);
    out.push_back(std::move(p));
  }
  return out;
}

Expr conservation_defect(const ConservedPair& p, const EquationSpec& eq, const Context& ctx) {
  Context merged = combined(ctx, eq.context);
  Algebra alg(merged);
  RuleReducer red(alg, eq);
  RatFunc flux = red.reduce(alg.from_expr(p.flux));
  return alg.to_expr(red.reduce(alg.sub(red.time_derivative(alg.from_expr(p.density)), alg.total_dx(flux))));
}

bool verify_conserved(const ConservedPair& p, const EquationSpec& eq, const Context& ctx) {
  return conservation_defect(p, eq, ctx).is_zero();
}

Expr euler_operator(const Expr& f, const Context& ctx) {
  Algebra alg(ctx);
  RatFunc F = alg.from_expr(f);
  int n = top_x_order(alg, F);
  RatFunc out;
  for (int k = 0; k <= n; ++k) {
    RatFunc d = alg.partial(F, z(k));
    for (int i = 0; i < k; ++i) d = alg.neg(alg.total_dx(d));
    out = alg.add(out, d);
  }
  return alg.to_expr(out);
}

ConservedPair strip_exact(const ConservedPair& p, const EquationSpec& eq, const Context& ctx) {
  Context merged = combined(ctx, eq.context);
  Algebra alg(merged);
  RuleReducer red(alg, eq);
  RatFunc d = alg.from_expr(p.density), fl = alg.from_expr(p.flux);
  for (int iter = 0; iter < 64; ++iter) {
    int n = top_x_order(alg, d);
    if (n <= 0) break;
    Expr zn = z(n), zm = z(n - 1);
    RatFunc den{Poly::constant(1), d.den};
    if (alg.contains_symbol(den, zn) || alg.contains_symbol(den, zm)) break;
    if (d.num.degree_in(zn) != 1) break;
    Poly c = d.num.coefficient(zn, 1);
    bool nested = false;
    for (const auto& k : d.num.kernels())
      if (k != zn && k != zm && (alg.contains_symbol(alg.kernel(k), zn) || alg.contains_symbol(alg.kernel(k), zm)))
        nested = true;
    if (nested) break;
    Poly H;
    for (const auto& [mono, coef] : c.terms()) {
      int e = 0;
      Monomial rest;
      for (const auto& [k, x] : mono) {
        if (k == zm) e = x;
        else rest.emplace_back(k, x);
      }
      H += Poly::term(rest, coef / (e + 1)) * Poly::kernel(zm, e + 1);
    }
    RatFunc Hr = alg.mul(alg.from_poly(H), den);
    d = alg.sub(d, alg.total_dx(Hr));
    fl = alg.sub(fl, red.time_derivative(Hr));
    if (top_x_order(alg, d) == n && d.num.degree_in(zn) >= 1) break;
  }
  ConservedPair out = p;
  out.density = alg.to_expr(d);
  out.flux = alg.to_expr(fl);
  out.trivial = top_x_order(alg, d) < 0 || euler_operator(out.density, merged).is_zero();
  out.verified = verify_conserved(out, eq, merged);
  return out;
}

}  // namespace pssforge
