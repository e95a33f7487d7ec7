#include "pssforge/expr.hpp"

#include <algorithm>
#include <functional>

namespace pssforge {

std::string JetVar::name() const {
  std::string s = "z";
  if (order > 0) s += std::to_string(order);
  if (t) s += "t";
  return s;
}

const char* builtin_name(Builtin fn) {
  switch (fn) {
    case Builtin::Sin: return "sin";
    case Builtin::Cos: return "cos";
    case Builtin::Sinh: return "sinh";
    case Builtin::Cosh: return "cosh";
    case Builtin::Exp: return "exp";
  }
  return "?";
}

namespace {

std::size_t mix(std::size_t seed, std::size_t v) {
  return seed ^ (v + 0x9e3779b97f4a7c15ULL + (seed << 6) + (seed >> 2));
}

std::size_t compute_hash(const Expr::Node& n) {
  std::size_t h = std::hash<int>{}(static_cast<int>(n.kind));
  switch (n.kind) {
    case NodeKind::Constant:
      h = mix(h, std::hash<std::string>{}(n.value.get_str()));
      break;
    case NodeKind::Param:
      h = mix(h, std::hash<std::string>{}(n.name));
      break;
    case NodeKind::Jet:
      h = mix(h, static_cast<std::size_t>(n.jet.order * 2 + (n.jet.t ? 1 : 0)));
      break;
    case NodeKind::Atom:
      h = mix(h, std::hash<std::string>{}(n.name));
      for (int d : n.deriv) h = mix(h, static_cast<std::size_t>(d));
      break;
    case NodeKind::Apply:
      h = mix(h, static_cast<std::size_t>(n.fn));
      break;
    case NodeKind::Power:
      h = mix(h, static_cast<std::size_t>(n.exponent + 1000));
      break;
    default:
      break;
  }
  for (const auto& a : n.args) h = mix(h, a.hash());
  return h;
}

std::shared_ptr<const Expr::Node> finish(Expr::Node n) {
  n.hash = compute_hash(n);
  return std::make_shared<const Expr::Node>(std::move(n));
}

int kind_rank(NodeKind k) {
  switch (k) {
    case NodeKind::Jet: return 0;
    case NodeKind::Atom: return 1;
    case NodeKind::Apply: return 2;
    case NodeKind::Param: return 3;
    case NodeKind::Constant: return 4;
    case NodeKind::Power: return 5;
    case NodeKind::Product: return 6;
    case NodeKind::Sum: return 7;
  }
  return 8;
}

}  // namespace

Expr::Expr() {
  static const std::shared_ptr<const Node> zero = constant(0).node_;
  node_ = zero;
}

Expr Expr::constant(const mpq_class& value) {
  Node n;
  n.kind = NodeKind::Constant;
  n.value = value;
  n.value.canonicalize();
  return Expr(finish(std::move(n)));
}

Expr Expr::integer(long value) { return constant(mpq_class(value)); }

Expr Expr::rational(long num, long den) {
  if (den == 0) throw ExprError("division by zero in rational constant");
  mpq_class q(num, den);
  q.canonicalize();
  return constant(q);
}

Expr Expr::param(std::string name) {
  Node n;
  n.kind = NodeKind::Param;
  n.name = std::move(name);
  return Expr(finish(std::move(n)));
}

Expr Expr::jet(JetVar v) {
  if (v.order < 0) throw ExprError("negative jet order");
  Node n;
  n.kind = NodeKind::Jet;
  n.jet = v;
  return Expr(finish(std::move(n)));
}

Expr Expr::atom(std::string name, std::vector<Expr> args, std::vector<int> deriv) {
  if (args.empty()) throw ExprError("atom '" + name + "' needs at least one argument");
  if (deriv.empty()) deriv.assign(args.size(), 0);
  if (deriv.size() != args.size())
    throw ExprError("atom '" + name + "': derivative index does not match argument count");
  for (int d : deriv)
    if (d < 0) throw ExprError("atom '" + name + "': negative derivative order");
  Node n;
  n.kind = NodeKind::Atom;
  n.name = std::move(name);
  n.args = std::move(args);
  n.deriv = std::move(deriv);
  return Expr(finish(std::move(n)));
}

Expr Expr::atom(std::string name, Expr arg, int order) {
  return atom(std::move(name), std::vector<Expr>{std::move(arg)}, std::vector<int>{order});
}

Expr Expr::apply(Builtin fn, Expr arg) {
  Node n;
  n.kind = NodeKind::Apply;
  n.fn = fn;
  n.args.push_back(std::move(arg));
  return Expr(finish(std::move(n)));
}

Expr Expr::sum(std::vector<Expr> terms) {
  if (terms.empty()) return integer(0);
  if (terms.size() == 1) return terms.front();
  Node n;
  n.kind = NodeKind::Sum;
  for (auto& t : terms) {
    if (t.kind() == NodeKind::Sum) {
      for (const auto& c : t.children()) n.args.push_back(c);
    } else {
      n.args.push_back(std::move(t));
    }
  }
  return Expr(finish(std::move(n)));
}

Expr Expr::product(std::vector<Expr> factors) {
  if (factors.empty()) return integer(1);
  if (factors.size() == 1) return factors.front();
  Node n;
  n.kind = NodeKind::Product;
  for (auto& f : factors) {
    if (f.kind() == NodeKind::Product) {
      for (const auto& c : f.children()) n.args.push_back(c);
    } else {
      n.args.push_back(std::move(f));
    }
  }
  return Expr(finish(std::move(n)));
}

Expr Expr::power(Expr base, int exponent) {
  if (exponent == 1) return base;
  if (base.kind() == NodeKind::Power) return power(base.children()[0], base.exponent() * exponent);
  Node n;
  n.kind = NodeKind::Power;
  n.exponent = exponent;
  n.args.push_back(std::move(base));
  return Expr(finish(std::move(n)));
}

NodeKind Expr::kind() const { return node_->kind; }
const mpq_class& Expr::value() const { return node_->value; }
const std::string& Expr::name() const { return node_->name; }
JetVar Expr::jet_var() const { return node_->jet; }
Builtin Expr::builtin() const { return node_->fn; }
std::span<const int> Expr::deriv() const { return node_->deriv; }
std::span<const Expr> Expr::children() const { return node_->args; }
int Expr::exponent() const { return node_->exponent; }
std::size_t Expr::hash() const { return node_->hash; }

bool Expr::is_zero() const { return kind() == NodeKind::Constant && sgn(value()) == 0; }
bool Expr::is_one() const { return kind() == NodeKind::Constant && value() == 1; }

bool Expr::is_kernel() const {
  switch (kind()) {
    case NodeKind::Param:
    case NodeKind::Jet:
    case NodeKind::Atom:
    case NodeKind::Apply:
      return true;
    default:
      return false;
  }
}

std::strong_ordering compare(const Expr& a, const Expr& b) {
  if (a.node_ == b.node_) return std::strong_ordering::equal;
  const auto& x = *a.node_;
  const auto& y = *b.node_;
  if (auto c = kind_rank(x.kind) <=> kind_rank(y.kind); c != 0) return c;
  switch (x.kind) {
    case NodeKind::Constant: {
      int c = cmp(x.value, y.value);
      return c < 0 ? std::strong_ordering::less
                   : (c > 0 ? std::strong_ordering::greater : std::strong_ordering::equal);
    }
    case NodeKind::Param:
      return x.name <=> y.name;
    case NodeKind::Jet:
      // z, z1, z2, ... before zt, z1t, ...
      if (auto c = x.jet.t <=> y.jet.t; c != 0) return c;
      return x.jet.order <=> y.jet.order;
    case NodeKind::Atom:
      if (auto c = x.name <=> y.name; c != 0) return c;
      if (auto c = x.deriv <=> y.deriv; c != 0) return c;
      break;
    case NodeKind::Apply:
      if (auto c = static_cast<int>(x.fn) <=> static_cast<int>(y.fn); c != 0) return c;
      break;
    case NodeKind::Power:
      if (auto c = x.exponent <=> y.exponent; c != 0) return c;
      break;
    default:
      break;
  }
  if (auto c = x.args.size() <=> y.args.size(); c != 0) return c;
  for (std::size_t i = 0; i < x.args.size(); ++i) {
    if (auto c = compare(x.args[i], y.args[i]); c != 0) return c;
  }
  return std::strong_ordering::equal;
}

Expr operator+(const Expr& a, const Expr& b) { return Expr::sum({a, b}); }
Expr operator-(const Expr& a, const Expr& b) { return Expr::sum({a, -b}); }
Expr operator-(const Expr& a) {
  if (a.is_constant()) return Expr::constant(-a.value());
  return Expr::product({Expr::integer(-1), a});
}
Expr operator*(const Expr& a, const Expr& b) { return Expr::product({a, b}); }
Expr operator/(const Expr& a, const Expr& b) { return Expr::product({a, Expr::power(b, -1)}); }
Expr pow(const Expr& base, int exponent) { return Expr::power(base, exponent); }
Expr sin(const Expr& e) { return Expr::apply(Builtin::Sin, e); }
Expr cos(const Expr& e) { return Expr::apply(Builtin::Cos, e); }
Expr sinh(const Expr& e) { return Expr::apply(Builtin::Sinh, e); }
Expr cosh(const Expr& e) { return Expr::apply(Builtin::Cosh, e); }
Expr exp(const Expr& e) { return Expr::apply(Builtin::Exp, e); }

}  // namespace pssforge
