#pragma once

#include <string>
#include <utility>
#include <vector>

#include "pssforge/random.hpp"

namespace pssforge {

struct PropertyResult {
  std::string name;
  int cases = 0;
  int failures = 0;
  std::string first_failure;
  /// Largest observed error (numeric properties only).
  double max_error = 0;
  bool pass() const { return cases > 0 && failures == 0; }
};

/// D_x(e1 e2) = D_x(e1) e2 + e1 D_x(e2).
PropertyResult leibniz_property(Random& rng, int cases);
/// d/dz_k D_x(e) = D_x(d/dz_k e) + d/dz_(k-1) e for t-free e.
PropertyResult commutation_property(Random& rng, int cases);
/// normalize(parse(format(e))) = normalize(e).
PropertyResult round_trip_property(Random& rng, int cases);
/// Associativity, commutativity and distributivity under normalize.
PropertyResult ring_property(Random& rng, int cases);
/// Symbolic partials against central differences, with the formal atom
/// h bound to sin(u) + u^2/2. Error is |fd - exact| / max(1, |exact|).
PropertyResult chain_rule_fd_property(Random& rng, int points, double tol = 1e-6);

struct OracleVerdict {
  bool structure = false;
  bool zcr = false;
  bool lemma = false;
  bool agree() const { return structure == zcr && zcr == lemma; }
  bool all() const { return structure && zcr && lemma; }
  bool none() const { return !structure && !zcr && !lemma; }
};

/// Structure residuals, ZCR residual and the shape checker of the
/// instance's class (class a or b).
OracleVerdict oracle_triangle(const FamilyInstance& inst);

/// Single-entry perturbations of the coframe, each breaking one shape
/// or compatibility condition: slope, f11, f12, f22, f32.
std::vector<std::pair<std::string, Coframe>> coframe_mutations(const FamilyInstance& inst);

/// Z(X^S, T^S) - S Z(X, T) S^-1 = 0 with formal D_t, and Z(X^S, T^S) = 0
/// modulo the instance's law. `detail` receives the first failure.
bool gauge_identity(const FamilyInstance& inst, const Matrix2& S, std::string* detail = nullptr);

}  // namespace pssforge
