#pragma once

#include <array>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "pssforge/algebra.hpp"
#include "pssforge/context.hpp"
#include "pssforge/expr.hpp"
#include "pssforge/jet_expr.hpp"

namespace pssforge {

/// Coefficients f_ij of w_i = f_i1 dx + f_i2 dt and the sign delta
/// (+1: pseudospherical, -1: spherical).
struct Coframe {
  std::array<std::array<Expr, 2>, 3> f;
  int delta = 1;
  Context context;

  const Expr& operator()(int i, int j) const { return f[static_cast<std::size_t>(i - 1)][static_cast<std::size_t>(j - 1)]; }
  Expr& operator()(int i, int j) { return f[static_cast<std::size_t>(i - 1)][static_cast<std::size_t>(j - 1)]; }
};

enum class EquationClass { A, B, Generic };

const char* class_name(EquationClass c);

struct EvolutionRule {
  JetVar var;
  Expr rhs;
};

/// Evolution law. Class A: z_t -> lam z_2t + A z3 + B with z_2t left
/// formal. Class B: z_2t -> A z3 + B. Generic: z_kt -> rhs. Class B and
/// generic rules are prolonged: z_(k+j)t -> D_x^j rhs.
struct EquationSpec {
  EquationClass cls = EquationClass::Generic;
  std::vector<EvolutionRule> rules;
  Expr A;
  Expr B;
  Expr lambda;
  Context context;

  static EquationSpec none() { return {}; }
  static EquationSpec class_a(const Expr& lambda, const Expr& A, const Expr& B);
  static EquationSpec class_b(const Expr& A, const Expr& B);
  static EquationSpec generic(JetVar var, const Expr& rhs);
};

/// Context of a coframe merged with that of its equation.
Context merged_context(const Coframe& c, const EquationSpec& eq);

/// Applies the evolution rules (with prolongation) to rational functions.
class RuleReducer {
 public:
  RuleReducer(const Algebra& alg, const EquationSpec& eq);

  RatFunc reduce(const RatFunc& f) const;
  /// T_t = total_dt followed by rule reduction.
  RatFunc time_derivative(const RatFunc& f) const;
  const Algebra& algebra() const { return alg_; }

 private:
  std::optional<RatFunc> image(JetVar v) const;

  const Algebra& alg_;
  EquationClass cls_;
  std::vector<std::pair<JetVar, RatFunc>> base_;
  mutable std::map<JetVar, RatFunc> prolonged_;
};

struct ResidualTriple {
  std::array<Expr, 3> r;
  bool zero() const;
};

ResidualTriple structure_residuals(const Coframe& c, const EquationSpec& eq);

struct SurfaceReport {
  ResidualTriple residuals;
  Expr nondegeneracy;
  bool residuals_zero = false;
  bool nondegenerate = false;
  bool pass() const { return residuals_zero && nondegenerate; }
};

SurfaceReport verify_describes_surface(const Coframe& c, const EquationSpec& eq);

struct Complex {
  Expr re;
  Expr im;
};

using Matrix2 = std::array<std::array<Complex, 2>, 2>;

enum class LieAlgebra { SL2, SU2 };

struct ZcrPair {
  Matrix2 X;
  Matrix2 T;
  LieAlgebra algebra = LieAlgebra::SL2;
  Context context;
};

ZcrPair zcr_matrices(const Coframe& c);
/// D_t X - D_x T + [X, T], rule-reduced and normalized.
Matrix2 zcr_residual(const ZcrPair& p, const EquationSpec& eq);
bool is_zero(const Matrix2& m);
/// Trace of each matrix, normalized.
std::pair<Complex, Complex> traces(const ZcrPair& p);

/// Real 2x2 matrix helper.
Matrix2 real_matrix(const Expr& a, const Expr& b, const Expr& c, const Expr& d);

/// X^S = S X S^-1 + D_x S S^-1, T^S = S T S^-1 + D_t S S^-1. D_t is formal
/// unless `eq` is a class-b or generic law.
ZcrPair gauge_transform(const ZcrPair& p, const Matrix2& S, const EquationSpec* eq = nullptr);
/// S M S^-1 for unimodular S.
Matrix2 conjugate(const Matrix2& M, const Matrix2& S, const Context& ctx);

struct ConstraintResult {
  std::string name;
  bool pass = false;
  std::string residual;
};

struct LemmaReport {
  std::vector<ConstraintResult> constraints;
  std::map<std::string, Expr> decomposition;
  bool pass() const;
  std::vector<std::string> failed() const;
};

/// Constants and phi of the coframe shape; keys eta, sigma2, sigma3,
/// alpha2, alpha3, phi (class A) or eta, mu2, mu3, alpha2, alpha3, phi
/// (class B). Missing keys are extracted from the coframe.
using Decomposition = std::map<std::string, Expr>;

LemmaReport lemma1_check(const Coframe& c, const EquationSpec& eq, const Decomposition& d = {});
LemmaReport lemma1star_check(const Coframe& c, const EquationSpec& eq, const Decomposition& d = {});

}  // namespace pssforge
