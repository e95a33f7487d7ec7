#include <algorithm>
#include <set>

#include "pssforge/algebra.hpp"

namespace pssforge {

namespace {

bool is_apply(const Expr& k, Builtin fn) { return k.kind() == NodeKind::Apply && k.builtin() == fn; }

void collect_symbols(const Expr& e, std::set<Expr>& out) {
  if (e.kind() == NodeKind::Param || e.kind() == NodeKind::Jet) {
    out.insert(e);
    return;
  }
  for (const auto& c : e.children()) collect_symbols(c, out);
}

void add_den(std::vector<Factor>& den, const Poly& q, int e) {
  for (auto& f : den) {
    if (f.poly == q) {
      f.exponent += e;
      return;
    }
  }
  den.push_back({q, e});
}

}  // namespace

Algebra::Algebra(const Context& ctx) : ctx_(ctx) {
  Context plain;
  plain.set_max_jet_order(ctx.max_jet_order());
  Algebra base(plain, 0);
  for (const auto& s : ctx.side_relations()) {
    RatFunc sq = base.from_expr(s.square);
    if (!sq.is_polynomial())
      throw ExprError("side relation for '" + s.symbol + "' must have a polynomial square");
    squares_.emplace(s.symbol, sq.num);
  }
}

Algebra::Algebra(const Context& ctx, int) : ctx_(ctx) {}

RatFunc Algebra::constant(const mpq_class& c) const { return {Poly::constant(c), {}}; }

RatFunc Algebra::from_poly(const Poly& p) const { return {reduce(p), {}}; }

// ---------------------------------------------------------------------------
// Kernels

RatFunc Algebra::atom_kernel(const Expr& atom) const {
  const OdeRule* rule = atom.children().size() == 1 ? ctx_.ode_rule(atom.name()) : nullptr;
  if (rule == nullptr || atom.deriv()[0] < rule->order) return {Poly::kernel(atom), {}};
  int shift = atom.deriv()[0] - rule->order;
  RatFunc out;
  for (int j = 0; j < rule->order; ++j) {
    RatFunc c = from_expr(rule->coefficients[static_cast<std::size_t>(j)]);
    if (c.is_zero()) continue;
    Expr lower = Expr::atom(atom.name(), atom.children()[0], j + shift);
    out = add(out, mul(c, atom_kernel(lower)));
  }
  return out;
}

RatFunc Algebra::apply_kernel(Builtin fn, const RatFunc& arg) const {
  if (arg.is_zero()) {
    bool zero_value = fn == Builtin::Sin || fn == Builtin::Sinh;
    return constant(zero_value ? 0 : 1);
  }
  bool flip = fn != Builtin::Exp && sgn(arg.num.leading().second) < 0;
  RatFunc a = flip ? neg(arg) : arg;
  RatFunc k{Poly::kernel(Expr::apply(fn, to_expr(a))), {}};
  if (flip && (fn == Builtin::Sin || fn == Builtin::Sinh)) return neg(k);
  return k;
}

RatFunc Algebra::kernel(const Expr& k) const {
  switch (k.kind()) {
    case NodeKind::Jet:
      if (k.jet_var().order > ctx_.max_jet_order())
        throw ExprError("jet order of " + k.jet_var().name() + " exceeds the maximum of " +
                        std::to_string(ctx_.max_jet_order()));
      return {Poly::kernel(k), {}};
    case NodeKind::Param:
      return {Poly::kernel(k), {}};
    case NodeKind::Atom: {
      std::vector<Expr> args;
      for (const auto& a : k.children()) args.push_back(normalize(a));
      return atom_kernel(Expr::atom(k.name(), std::move(args),
                                    std::vector<int>(k.deriv().begin(), k.deriv().end())));
    }
    case NodeKind::Apply:
      return apply_kernel(k.builtin(), from_expr(k.children()[0]));
    default:
      return from_expr(k);
  }
}

// ---------------------------------------------------------------------------
// Conversion

RatFunc Algebra::from_expr(const Expr& e) const {
  switch (e.kind()) {
    case NodeKind::Constant:
      return constant(e.value());
    case NodeKind::Param:
    case NodeKind::Jet:
    case NodeKind::Atom:
    case NodeKind::Apply:
      return kernel(e);
    case NodeKind::Sum: {
      RatFunc acc;
      for (const auto& c : e.children()) acc = add(acc, from_expr(c));
      return acc;
    }
    case NodeKind::Product: {
      RatFunc acc = constant(1);
      for (const auto& c : e.children()) {
        acc = mul(acc, from_expr(c));
        if (acc.is_zero()) break;
      }
      return acc;
    }
    case NodeKind::Power:
      return pow(from_expr(e.children()[0]), e.exponent());
  }
  throw ExprError("unknown expression node");
}

Expr Algebra::term_expr(const Monomial& m, const mpq_class& c) const {
  std::vector<Expr> factors;
  if (c != 1 || m.empty()) factors.push_back(Expr::constant(c));
  for (const auto& [k, e] : m) factors.push_back(Expr::power(k, e));
  return Expr::product(std::move(factors));
}

Expr Algebra::poly_expr(const Poly& p) const {
  if (p.is_zero()) return Expr::integer(0);
  std::vector<Expr> terms;
  for (auto it = p.terms().rbegin(); it != p.terms().rend(); ++it)
    terms.push_back(term_expr(it->first, it->second));
  return Expr::sum(std::move(terms));
}

Expr Algebra::to_expr(const RatFunc& r) const {
  Expr n = poly_expr(r.num);
  if (r.den.empty() || r.num.is_zero()) return n;
  std::vector<Expr> factors{n};
  for (const auto& f : r.den) factors.push_back(Expr::power(poly_expr(f.poly), -f.exponent));
  return Expr::product(std::move(factors));
}

// ---------------------------------------------------------------------------
// Reduction

Poly Algebra::reduce(const Poly& p) const {
  std::vector<std::pair<Monomial, mpq_class>> work(p.terms().begin(), p.terms().end());
  Poly out;
  while (!work.empty()) {
    auto [m, c] = std::move(work.back());
    work.pop_back();

    std::optional<std::size_t> hit;
    int exp_count = 0;
    bool exp_power = false;
    for (std::size_t i = 0; i < m.size() && !hit; ++i) {
      const auto& [k, e] = m[i];
      if (e >= 2 && k.kind() == NodeKind::Param && squares_.count(k.name())) hit = i;
      if (e >= 2 && (is_apply(k, Builtin::Sin) || is_apply(k, Builtin::Cosh))) hit = i;
      if (is_apply(k, Builtin::Exp)) {
        ++exp_count;
        if (e >= 2) exp_power = true;
      }
    }

    if (hit) {
      Monomial rest = m;
      auto& [k, e] = rest[*hit];
      Poly repl;
      if (k.kind() == NodeKind::Param) {
        repl = squares_.at(k.name());
      } else if (is_apply(k, Builtin::Sin)) {
        repl = Poly::constant(1) - Poly::kernel(Expr::apply(Builtin::Cos, k.children()[0]), 2);
      } else {
        repl = Poly::constant(1) + Poly::kernel(Expr::apply(Builtin::Sinh, k.children()[0]), 2);
      }
      e -= 2;
      if (e == 0) rest.erase(rest.begin() + static_cast<std::ptrdiff_t>(*hit));
      for (const auto& [rm, rc] : repl.terms()) work.emplace_back(multiply(rest, rm), c * rc);
      continue;
    }

    if (exp_count >= 2 || exp_power) {
      Monomial rest;
      std::vector<Expr> arg_terms;
      for (const auto& [k, e] : m) {
        if (is_apply(k, Builtin::Exp))
          arg_terms.push_back(Expr::product({Expr::integer(e), k.children()[0]}));
        else
          rest.emplace_back(k, e);
      }
      RatFunc merged = apply_kernel(Builtin::Exp, from_expr(Expr::sum(std::move(arg_terms))));
      for (const auto& [rm, rc] : merged.num.terms()) work.emplace_back(multiply(rest, rm), c * rc);
      continue;
    }

    out.add_term(m, c);
  }
  return out;
}

void Algebra::insert_factor(Poly& num, std::vector<Factor>& den, const Poly& p, int e) const {
  std::vector<std::pair<Poly, int>> work{{p, e}};
  while (!work.empty()) {
    auto [q, k] = std::move(work.back());
    work.pop_back();
    q = reduce(q);
    if (q.is_zero()) throw ExprError("division by zero");

    bool rationalized = false;
    for (const auto& [name, sq] : squares_) {
      Expr s = Expr::param(name);
      if (!q.contains(s)) continue;
      Poly a = q.coefficient(s, 0);
      Poly b = q.coefficient(s, 1);
      Poly conj = a - b * Poly::kernel(s);
      num = reduce(num * conj.pow(k));
      work.emplace_back(a * a - b * b * sq, k);
      rationalized = true;
      break;
    }
    if (rationalized) continue;

    mpq_class c = q.content();
    q = q.scaled(1 / c);
    mpq_class ck = 1;
    for (int i = 0; i < k; ++i) ck *= c;
    num = num.scaled(1 / ck);

    Monomial g = q.monomial_gcd();
    if (!g.empty()) {
      Poly rest;
      for (const auto& [m, v] : q.terms()) rest.add_term(*divide(m, g), v);
      q = std::move(rest);
      for (const auto& [kern, ex] : g) {
        if (is_apply(kern, Builtin::Exp)) {
          RatFunc inv = apply_kernel(
              Builtin::Exp, from_expr(Expr::product({Expr::integer(-ex * k), kern.children()[0]})));
          num = reduce(num * inv.num);
        } else {
          add_den(den, Poly::kernel(kern), ex * k);
        }
      }
    }
    if (q.is_constant()) {
      num = num.scaled(1 / q.constant_value());
      continue;
    }
    add_den(den, q, k);
  }
}

void Algebra::cancel(Poly& num, std::vector<Factor>& den) const {
  if (num.is_zero()) {
    den.clear();
    return;
  }
  for (auto& f : den) {
    while (f.exponent > 0) {
      auto q = num.divide_exact(f.poly);
      if (!q) break;
      num = std::move(*q);
      --f.exponent;
    }
  }
  std::erase_if(den, [](const Factor& f) { return f.exponent == 0; });
  std::sort(den.begin(), den.end(),
            [](const Factor& a, const Factor& b) { return compare(a.poly, b.poly) < 0; });
}

RatFunc Algebra::finish(Poly num, std::vector<Factor> den) const {
  num = reduce(num);
  cancel(num, den);
  return {std::move(num), std::move(den)};
}

// ---------------------------------------------------------------------------
// Arithmetic

RatFunc Algebra::add(const RatFunc& a, const RatFunc& b) const {
  if (a.is_zero()) return b;
  if (b.is_zero()) return a;
  if (a.den.empty() && b.den.empty()) return {reduce(a.num + b.num), {}};
  std::vector<Factor> lcm = a.den;
  for (const auto& f : b.den) {
    auto it = std::find_if(lcm.begin(), lcm.end(), [&](const Factor& g) { return g.poly == f.poly; });
    if (it == lcm.end())
      lcm.push_back(f);
    else
      it->exponent = std::max(it->exponent, f.exponent);
  }
  auto lift = [&](const RatFunc& r) {
    Poly n = r.num;
    for (const auto& f : lcm) {
      int have = 0;
      for (const auto& g : r.den)
        if (g.poly == f.poly) have = g.exponent;
      if (f.exponent > have) n = n * f.poly.pow(f.exponent - have);
    }
    return n;
  };
  Poly num = lift(a) + lift(b);
  return finish(std::move(num), std::move(lcm));
}

RatFunc Algebra::neg(const RatFunc& a) const { return scale(a, -1); }

RatFunc Algebra::sub(const RatFunc& a, const RatFunc& b) const { return add(a, neg(b)); }

RatFunc Algebra::scale(const RatFunc& a, const mpq_class& c) const {
  if (sgn(c) == 0) return {};
  return {a.num.scaled(c), a.den};
}

RatFunc Algebra::mul(const RatFunc& a, const RatFunc& b) const {
  if (a.is_zero() || b.is_zero()) return {};
  if (a.is_constant()) return scale(b, a.num.constant_value());
  if (b.is_constant()) return scale(a, b.num.constant_value());
  std::vector<Factor> den = a.den;
  for (const auto& f : b.den) add_den(den, f.poly, f.exponent);
  return finish(a.num * b.num, std::move(den));
}

RatFunc Algebra::div(const RatFunc& a, const RatFunc& b) const {
  if (b.is_zero()) throw ExprError("division by zero");
  if (a.is_zero()) return {};
  if (b.is_constant()) return scale(a, 1 / b.num.constant_value());
  Poly num = a.num;
  for (const auto& f : b.den) num = num * f.poly.pow(f.exponent);
  std::vector<Factor> den = a.den;
  insert_factor(num, den, b.num, 1);
  return finish(std::move(num), std::move(den));
}

RatFunc Algebra::pow(const RatFunc& a, int e) const {
  if (e < 0) return pow(div(constant(1), a), -e);
  RatFunc result = constant(1);
  RatFunc base = a;
  while (e > 0) {
    if (e & 1) result = mul(result, base);
    e >>= 1;
    if (e > 0) base = mul(base, base);
  }
  return result;
}

// ---------------------------------------------------------------------------
// Derivations and substitution

RatFunc Algebra::derive_kernel(const Expr& k, const BaseDerivation& base,
                               std::map<Expr, RatFunc>& cache) const {
  if (auto it = cache.find(k); it != cache.end()) return it->second;
  RatFunc out;
  switch (k.kind()) {
    case NodeKind::Param:
    case NodeKind::Jet:
      out = base(k);
      break;
    case NodeKind::Atom: {
      auto args = k.children();
      for (std::size_t i = 0; i < args.size(); ++i) {
        RatFunc du = derive(from_expr(args[i]), base);
        if (du.is_zero()) continue;
        std::vector<int> d(k.deriv().begin(), k.deriv().end());
        ++d[i];
        Expr next = Expr::atom(k.name(), std::vector<Expr>(args.begin(), args.end()), d);
        out = add(out, mul(atom_kernel(next), du));
      }
      break;
    }
    case NodeKind::Apply: {
      RatFunc u = from_expr(k.children()[0]);
      RatFunc du = derive(u, base);
      if (du.is_zero()) break;
      RatFunc outer;
      switch (k.builtin()) {
        case Builtin::Sin: outer = apply_kernel(Builtin::Cos, u); break;
        case Builtin::Cos: outer = neg(apply_kernel(Builtin::Sin, u)); break;
        case Builtin::Sinh: outer = apply_kernel(Builtin::Cosh, u); break;
        case Builtin::Cosh: outer = apply_kernel(Builtin::Sinh, u); break;
        case Builtin::Exp: outer = apply_kernel(Builtin::Exp, u); break;
      }
      out = mul(outer, du);
      break;
    }
    default:
      throw ExprError("derivative of a non-kernel");
  }
  cache.emplace(k, out);
  return out;
}

RatFunc Algebra::derive(const RatFunc& f, const BaseDerivation& base) const {
  if (f.is_zero() || f.is_constant()) return {};
  std::map<Expr, RatFunc> cache;
  auto dpoly = [&](const Poly& p) {
    RatFunc acc;
    for (const auto& k : p.kernels()) {
      RatFunc dk = derive_kernel(k, base, cache);
      if (dk.is_zero()) continue;
      acc = add(acc, mul(from_poly(p.partial(k)), dk));
    }
    return acc;
  };
  RatFunc inv_den{Poly::constant(1), f.den};
  RatFunc out = mul(dpoly(f.num), inv_den);
  for (std::size_t i = 0; i < f.den.size(); ++i) {
    RatFunc df = dpoly(f.den[i].poly);
    if (df.is_zero()) continue;
    RatFunc scaled_inv{Poly::constant(-f.den[i].exponent), f.den};
    scaled_inv.den[i].exponent += 1;
    out = add(out, mul(mul(RatFunc{f.num, {}}, df), scaled_inv));
  }
  return out;
}

RatFunc Algebra::eval_poly(const Poly& p, const std::function<RatFunc(const Expr&)>& k) const {
  RatFunc acc;
  for (const auto& [m, c] : p.terms()) {
    RatFunc t = constant(c);
    for (const auto& [kern, e] : m) {
      t = mul(t, pow(k(kern), e));
      if (t.is_zero()) break;
    }
    acc = add(acc, t);
  }
  return acc;
}

RatFunc Algebra::substitute(const RatFunc& f, const KernelMap& map) const {
  std::map<Expr, std::optional<RatFunc>> cache;
  bool changed = false;
  std::function<std::optional<RatFunc>(const Expr&)> image = [&](const Expr& k) -> std::optional<RatFunc> {
    if (auto it = cache.find(k); it != cache.end()) return it->second;
    std::optional<RatFunc> r = map(k);
    if (!r && (k.kind() == NodeKind::Atom || k.kind() == NodeKind::Apply)) {
      std::vector<Expr> args;
      bool any = false;
      for (const auto& a : k.children()) {
        RatFunc before = from_expr(a);
        RatFunc after = substitute(before, map);
        Expr e = to_expr(after);
        if (!(e == a)) any = true;
        args.push_back(std::move(e));
      }
      if (any) {
        if (k.kind() == NodeKind::Atom)
          r = atom_kernel(Expr::atom(k.name(), std::move(args),
                                     std::vector<int>(k.deriv().begin(), k.deriv().end())));
        else
          r = apply_kernel(k.builtin(), from_expr(args[0]));
      }
    }
    if (r) changed = true;
    cache.emplace(k, r);
    return r;
  };

  auto value = [&](const Expr& k) -> RatFunc {
    auto r = image(k);
    return r ? *r : RatFunc{Poly::kernel(k), {}};
  };

  for (const auto& k : f.num.kernels()) image(k);
  for (const auto& fac : f.den)
    for (const auto& k : fac.poly.kernels()) image(k);
  if (!changed) return f;

  RatFunc num = eval_poly(f.num, value);
  RatFunc den = constant(1);
  for (const auto& fac : f.den) den = mul(den, pow(eval_poly(fac.poly, value), fac.exponent));
  return div(num, den);
}

RatFunc Algebra::total_dx(const RatFunc& f, const std::map<std::string, RatFunc>* extra) const {
  return derive(f, [&](const Expr& s) -> RatFunc {
    if (s.kind() == NodeKind::Jet) {
      JetVar v = s.jet_var();
      return jet({v.order + 1, v.t});
    }
    if (extra != nullptr) {
      if (auto it = extra->find(s.name()); it != extra->end()) return it->second;
    }
    return {};
  });
}

RatFunc Algebra::total_dt(const RatFunc& f, const std::map<std::string, RatFunc>* extra) const {
  return derive(f, [&](const Expr& s) -> RatFunc {
    if (s.kind() == NodeKind::Jet) {
      JetVar v = s.jet_var();
      if (v.t) throw ExprError("total_dt of a t-derivative variable " + v.name() + " is not supported");
      return jet({v.order, true});
    }
    if (extra != nullptr) {
      if (auto it = extra->find(s.name()); it != extra->end()) return it->second;
    }
    return {};
  });
}

RatFunc Algebra::partial(const RatFunc& f, const Expr& symbol) const {
  if (symbol.kind() != NodeKind::Param && symbol.kind() != NodeKind::Jet)
    throw ExprError("partial derivatives are taken with respect to a parameter or jet variable");
  return derive(f, [&](const Expr& s) -> RatFunc { return s == symbol ? constant(1) : RatFunc{}; });
}

std::vector<Expr> Algebra::symbols(const RatFunc& f) const {
  std::set<Expr> out;
  for (const auto& k : f.num.kernels()) collect_symbols(k, out);
  for (const auto& fac : f.den)
    for (const auto& k : fac.poly.kernels()) collect_symbols(k, out);
  return {out.begin(), out.end()};
}

bool Algebra::contains_symbol(const RatFunc& f, const Expr& symbol) const {
  auto s = symbols(f);
  return std::find(s.begin(), s.end(), symbol) != s.end();
}

}  // namespace pssforge
