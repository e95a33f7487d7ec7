#pragma once

#include <cstdint>
#include <optional>
#include <random>
#include <string>
#include <vector>

#include "pssforge/families.hpp"

namespace pssforge {

/// Seed from PSSFORGE_SEED when set and numeric, otherwise `fallback`.
std::uint64_t seed_from_env(std::uint64_t fallback);

struct ExprShape {
  int depth = 3;
  /// Highest x-derivative order of the leaves.
  int max_order = 3;
  bool t_jets = false;
  bool builtins = true;
  /// Single-argument formal atoms named here, e.g. {"h"}.
  std::vector<std::string> atoms;
  std::vector<std::string> params;
  /// Allow negative powers (rational functions).
  bool quotients = false;
};

/// Seeded generator of rationals, expressions, parameter bindings and
/// gauge matrices.
class Random {
 public:
  explicit Random(std::uint64_t seed) : engine_(seed) {}

  std::mt19937_64& engine() { return engine_; }
  long integer(long lo, long hi);
  double uniform(double lo, double hi);
  /// p/q with 1 <= |p| <= max_num, 1 <= q <= max_den.
  Expr rational(long max_num = 5, long max_den = 4);
  Expr expression(const ExprShape& shape);
  /// Polynomial in z, ..., z_max_order with small rational coefficients.
  Expr polynomial(int max_order, int terms, int max_degree = 2);

  /// Branch spec with every parameter bound to a random nonzero rational
  /// and formal functions; retries until construct() accepts it.
  std::optional<BranchSpec> branch_binding(Branch b, int sign, int delta, int attempts = 200);

  /// L(p) U(q) with L = [[1,0],[p,1]], U = [[1,q],[0,1]] and p, q random
  /// polynomials, so det = 1 and the entries stay polynomial.
  Matrix2 unimodular(int max_order = 2);

 private:
  std::mt19937_64 engine_;
};

}  // namespace pssforge
