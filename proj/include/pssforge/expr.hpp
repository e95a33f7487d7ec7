#pragma once

#include <gmpxx.h>

#include <compare>
#include <cstddef>
#include <memory>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

namespace pssforge {

/// Jet coordinate: z_k (order k, t = false) or z_{kt} (t = true).
struct JetVar {
  int order = 0;
  bool t = false;

  friend auto operator<=>(const JetVar&, const JetVar&) = default;

  static JetVar x(int k) { return {k, false}; }
  static JetVar time(int k) { return {k, true}; }

  /// z, z1, z2, ..., zt, z1t, z2t, ...
  std::string name() const;
};

enum class Builtin { Sin, Cos, Sinh, Cosh, Exp };

const char* builtin_name(Builtin fn);

enum class NodeKind { Constant, Param, Jet, Atom, Apply, Sum, Product, Power };

/// Errors raised by the symbolic kernel.
class ExprError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class Expr;

/// Immutable expression tree over jet variables, parameters and formal
/// function atoms. Coefficients are exact rationals.
///
/// Atoms carry a name, one or more argument expressions and a partial
/// derivative multi-index (one entry per argument). A single-argument atom
/// with derivative index {2} is written h''(arg).
class Expr {
 public:
  struct Node;

  Expr();  // the constant 0

  static Expr constant(const mpq_class& value);
  static Expr integer(long value);
  static Expr rational(long num, long den);
  static Expr param(std::string name);
  static Expr jet(JetVar v);
  static Expr atom(std::string name, std::vector<Expr> args, std::vector<int> deriv);
  static Expr atom(std::string name, Expr arg, int order = 0);
  static Expr apply(Builtin fn, Expr arg);
  static Expr sum(std::vector<Expr> terms);
  static Expr product(std::vector<Expr> factors);
  static Expr power(Expr base, int exponent);

  NodeKind kind() const;
  const mpq_class& value() const;
  const std::string& name() const;
  JetVar jet_var() const;
  Builtin builtin() const;
  std::span<const int> deriv() const;
  std::span<const Expr> children() const;
  int exponent() const;

  bool is_constant() const { return kind() == NodeKind::Constant; }
  bool is_zero() const;
  bool is_one() const;
  /// Parameter, jet variable, atom or builtin application: the
  /// indeterminates of the polynomial layer.
  bool is_kernel() const;

  std::size_t hash() const;

  /// Structural total order. Kernels sort jet variables first, then atoms
  /// and builtin applications, then parameters.
  friend std::strong_ordering compare(const Expr& a, const Expr& b);
  friend bool operator==(const Expr& a, const Expr& b) { return compare(a, b) == 0; }
  friend bool operator<(const Expr& a, const Expr& b) { return compare(a, b) < 0; }

  const Node* get() const { return node_.get(); }

 private:
  explicit Expr(std::shared_ptr<const Node> node) : node_(std::move(node)) {}
  std::shared_ptr<const Node> node_;
};

struct Expr::Node {
  NodeKind kind = NodeKind::Constant;
  mpq_class value;
  std::string name;
  JetVar jet;
  Builtin fn = Builtin::Sin;
  std::vector<int> deriv;
  std::vector<Expr> args;
  int exponent = 1;
  std::size_t hash = 0;
};

// Tree-building operators. They do not simplify beyond flattening; use
// normalize() for canonical form.
Expr operator+(const Expr& a, const Expr& b);
Expr operator-(const Expr& a, const Expr& b);
Expr operator-(const Expr& a);
Expr operator*(const Expr& a, const Expr& b);
Expr operator/(const Expr& a, const Expr& b);
Expr pow(const Expr& base, int exponent);
Expr sin(const Expr& e);
Expr cos(const Expr& e);
Expr sinh(const Expr& e);
Expr cosh(const Expr& e);
Expr exp(const Expr& e);

inline Expr z(int k = 0) { return Expr::jet(JetVar::x(k)); }
inline Expr zt(int k = 0) { return Expr::jet(JetVar::time(k)); }
inline Expr sym(const std::string& name) { return Expr::param(name); }
inline Expr num(long n) { return Expr::integer(n); }
inline Expr frac(long n, long d) { return Expr::rational(n, d); }

}  // namespace pssforge
