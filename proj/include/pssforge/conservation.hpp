#pragma once

#include <string>
#include <vector>

#include "pssforge/coframe.hpp"

namespace pssforge {

/// Name of the angle parameter used in Pfaffian expressions.
inline constexpr const char* kAngle = "varrho";

struct PfaffianOptions {
  /// +1: d rho = w3 + sin(rho) w1 + cos(rho) w2; -1 flips the last two signs.
  int orientation = 1;
  /// Spherical surfaces: cosh/sinh analog (experimental, not integrable).
  bool spherical = false;
};

/// rho_x and rho_t as expressions in the jet variables and sin/cos (or
/// sinh/cosh) of the angle parameter.
struct Pfaffian {
  Expr rho_x;
  Expr rho_t;
  bool hyperbolic = false;
};

Pfaffian pfaffian(const Coframe& c, const PfaffianOptions& opt = {});

struct ClosedFormReport {
  /// dx^dt coefficient of d(cos(rho) w1 - sin(rho) w2).
  Expr defect;
  /// D_t rho_x - D_x rho_t.
  Expr integrability;
  bool pass() const { return defect.is_zero() && integrability.is_zero(); }
};

ClosedFormReport closed_form_check(const Coframe& c, const EquationSpec& eq, const PfaffianOptions& opt = {});

/// Raised when the series recursion cannot proceed.
class SeriesError : public ExprError {
 public:
  using ExprError::ExprError;
};

enum class SeriesCenter { Zero, Infinity };

struct ConservedPair {
  Expr density;
  Expr flux;
  /// Exponent of the expansion variable (param or 1/param).
  int order = 0;
  bool trivial = false;
  bool verified = false;
};

/// Expands rho in powers of eps = param (center zero) or 1/param (center
/// infinity), solves the Pfaffian order by order and returns the first n
/// nonzero coefficient pairs of cos(rho) w1 - sin(rho) w2. Fewer are
/// returned when the remaining coefficients vanish up to order 4n + 8
/// past the first.
std::vector<ConservedPair> series_densities(const Coframe& c, const EquationSpec& eq, const std::string& param,
                                            SeriesCenter center, int n);

/// Coefficients rho_0, rho_1, ... of the last series_densities-style expansion
/// (rho_0 as a multiple of pi/2).
struct AngleSeries {
  int quadrant = 0;
  std::vector<Expr> terms;
};
AngleSeries angle_series(const Coframe& c, const std::string& param, SeriesCenter center, int terms);

/// T_t density - D_x flux, rule-reduced.
Expr conservation_defect(const ConservedPair& p, const EquationSpec& eq, const Context& ctx = {});
bool verify_conserved(const ConservedPair& p, const EquationSpec& eq, const Context& ctx = {});

/// Variational derivative sum_k (-D_x)^k d/dz_k; zero iff f is an exact
/// x-derivative (for f free of t-derivatives).
Expr euler_operator(const Expr& f, const Context& ctx = {});

/// Removes D_x-exact terms that are linear in the top jet variable and
/// adjusts the flux by the matching T_t term.
ConservedPair strip_exact(const ConservedPair& p, const EquationSpec& eq, const Context& ctx = {});

}  // namespace pssforge
