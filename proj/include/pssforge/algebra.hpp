#pragma once

#include <gmpxx.h>

#include <functional>
#include <map>
#include <optional>
#include <utility>
#include <vector>

#include "pssforge/context.hpp"
#include "pssforge/expr.hpp"

namespace pssforge {

/// Sorted (kernel, exponent) pairs with positive exponents.
using Monomial = std::vector<std::pair<Expr, int>>;

/// Graded lexicographic order: total degree first, then the exponent of the
/// earliest kernel (jet variables < atoms < builtins < parameters).
struct MonomialLess {
  bool operator()(const Monomial& a, const Monomial& b) const;
};

int degree(const Monomial& m);
Monomial multiply(const Monomial& a, const Monomial& b);
/// a / b when b divides a.
std::optional<Monomial> divide(const Monomial& a, const Monomial& b);

/// Sparse multivariate polynomial with exact rational coefficients over
/// kernel indeterminates. Terms are kept in ascending graded-lex order.
class Poly {
 public:
  using Terms = std::map<Monomial, mpq_class, MonomialLess>;

  Poly() = default;
  static Poly constant(const mpq_class& c);
  static Poly kernel(const Expr& k, int exponent = 1);
  static Poly term(Monomial m, const mpq_class& c);

  const Terms& terms() const { return terms_; }
  bool is_zero() const { return terms_.empty(); }
  bool is_constant() const;
  mpq_class constant_value() const;
  std::size_t size() const { return terms_.size(); }

  void add_term(const Monomial& m, const mpq_class& c);
  Poly& operator+=(const Poly& o);
  Poly& operator-=(const Poly& o);
  friend Poly operator+(Poly a, const Poly& b) { return a += b; }
  friend Poly operator-(Poly a, const Poly& b) { return a -= b; }
  friend Poly operator*(const Poly& a, const Poly& b);
  Poly scaled(const mpq_class& c) const;
  Poly times(const Monomial& m, const mpq_class& c) const;
  Poly pow(int e) const;

  bool contains(const Expr& k) const;
  int degree_in(const Expr& k) const;
  /// Coefficient polynomial of k^e.
  Poly coefficient(const Expr& k, int e) const;
  /// Formal derivative with respect to a kernel.
  Poly partial(const Expr& k) const;
  std::vector<Expr> kernels() const;

  /// Signed rational c such that p / c has coprime integer coefficients and
  /// a positive leading coefficient.
  mpq_class content() const;
  Monomial monomial_gcd() const;
  const std::pair<const Monomial, mpq_class>& leading() const { return *terms_.rbegin(); }
  std::optional<Poly> divide_exact(const Poly& d) const;

  friend bool operator==(const Poly& a, const Poly& b);
  friend std::strong_ordering compare(const Poly& a, const Poly& b);

 private:
  Terms terms_;
};

struct Factor {
  Poly poly;
  int exponent = 1;
};

/// Rational function num / prod(factor^exponent). Denominator factors are
/// primitive, non-constant and free of side-relation symbols.
struct RatFunc {
  Poly num;
  std::vector<Factor> den;

  bool is_zero() const { return num.is_zero(); }
  bool is_polynomial() const { return den.empty(); }
  bool is_constant() const { return den.empty() && num.is_constant(); }
};

/// Derivative of a parameter or jet variable; atoms and builtin
/// applications are differentiated by the chain rule.
using BaseDerivation = std::function<RatFunc(const Expr& symbol)>;
/// Replacement for a kernel, or nullopt to keep it (arguments of atoms and
/// builtins are still rewritten).
using KernelMap = std::function<std::optional<RatFunc>(const Expr& kernel)>;

/// Canonical rational-function arithmetic under a Context: side relations,
/// sin^2 -> 1 - cos^2, cosh^2 -> 1 + sinh^2 and ODE rules are applied on
/// every result.
class Algebra {
 public:
  explicit Algebra(const Context& ctx);

  const Context& context() const { return ctx_; }

  RatFunc from_expr(const Expr& e) const;
  Expr to_expr(const RatFunc& r) const;
  Expr normalize(const Expr& e) const { return to_expr(from_expr(e)); }

  RatFunc zero() const { return {}; }
  RatFunc constant(const mpq_class& c) const;
  RatFunc from_poly(const Poly& p) const;
  /// Kernel with normalized arguments; applies ODE rules.
  RatFunc kernel(const Expr& k) const;
  RatFunc symbol(const std::string& name) const { return kernel(Expr::param(name)); }
  RatFunc jet(JetVar v) const { return kernel(Expr::jet(v)); }

  RatFunc add(const RatFunc& a, const RatFunc& b) const;
  RatFunc sub(const RatFunc& a, const RatFunc& b) const;
  RatFunc neg(const RatFunc& a) const;
  RatFunc mul(const RatFunc& a, const RatFunc& b) const;
  RatFunc div(const RatFunc& a, const RatFunc& b) const;
  RatFunc pow(const RatFunc& a, int e) const;
  RatFunc scale(const RatFunc& a, const mpq_class& c) const;

  RatFunc derive(const RatFunc& f, const BaseDerivation& base) const;
  RatFunc substitute(const RatFunc& f, const KernelMap& map) const;

  /// D_x with z_k -> z_{k+1}, z_{kt} -> z_{(k+1)t}; params constant unless
  /// listed in `extra`.
  RatFunc total_dx(const RatFunc& f, const std::map<std::string, RatFunc>* extra = nullptr) const;
  /// Vertical D_t with z_k -> z_{kt}; rejects t-derivative inputs.
  RatFunc total_dt(const RatFunc& f, const std::map<std::string, RatFunc>* extra = nullptr) const;
  RatFunc partial(const RatFunc& f, const Expr& symbol) const;

  bool contains_symbol(const RatFunc& f, const Expr& symbol) const;
  /// Every parameter / jet variable occurring anywhere (also inside atoms).
  std::vector<Expr> symbols(const RatFunc& f) const;

 private:
  Algebra(const Context& ctx, int);
  Poly reduce(const Poly& p) const;
  RatFunc finish(Poly num, std::vector<Factor> den) const;
  void insert_factor(Poly& num, std::vector<Factor>& den, const Poly& p, int e) const;
  void cancel(Poly& num, std::vector<Factor>& den) const;
  RatFunc eval_poly(const Poly& p, const std::function<RatFunc(const Expr&)>& k) const;
  RatFunc derive_kernel(const Expr& k, const BaseDerivation& base,
                        std::map<Expr, RatFunc>& cache) const;
  RatFunc atom_kernel(const Expr& atom) const;
  RatFunc apply_kernel(Builtin fn, const RatFunc& arg) const;
  Expr term_expr(const Monomial& m, const mpq_class& c) const;
  Expr poly_expr(const Poly& p) const;

  const Context& ctx_;
  std::map<std::string, Poly> squares_;
};

}  // namespace pssforge
