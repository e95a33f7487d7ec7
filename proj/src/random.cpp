#include "pssforge/random.hpp"

#include <cstdlib>

namespace pssforge {

std::uint64_t seed_from_env(std::uint64_t fallback) {
  const char* s = std::getenv("PSSFORGE_SEED");
  if (!s || !*s) return fallback;
  char* end = nullptr;
  unsigned long long v = std::strtoull(s, &end, 10);
  if (*end) return fallback;
  return v;
}

long Random::integer(long lo, long hi) { return std::uniform_int_distribution<long>(lo, hi)(engine_); }

double Random::uniform(double lo, double hi) { return std::uniform_real_distribution<double>(lo, hi)(engine_); }

Expr Random::rational(long max_num, long max_den) {
  long p = integer(1, max_num);
  if (integer(0, 1)) p = -p;
  return Expr::rational(p, integer(1, max_den));
}

Expr Random::polynomial(int max_order, int terms, int max_degree) {
  std::vector<Expr> out;
  for (int i = 0; i < terms; ++i) {
    std::vector<Expr> f{rational()};
    int deg = static_cast<int>(integer(0, max_degree));
    for (int d = 0; d < deg; ++d) f.push_back(z(static_cast<int>(integer(0, max_order))));
    out.push_back(Expr::product(f));
  }
  return Expr::sum(out);
}

Expr Random::expression(const ExprShape& shape) {
  auto leaf = [&]() -> Expr {
    long pick = integer(0, shape.params.empty() ? 2 : 3);
    if (pick == 0) return rational();
    if (pick == 3) return sym(shape.params[static_cast<std::size_t>(integer(0, static_cast<long>(shape.params.size()) - 1))]);
    int k = static_cast<int>(integer(0, shape.max_order));
    if (shape.t_jets && integer(0, 3) == 0) return zt(k);
    return z(k);
  };
  if (shape.depth <= 0) return leaf();
  ExprShape sub = shape;
  sub.depth = shape.depth - 1;
  long kinds = 4 + (shape.builtins ? 1 : 0) + (shape.atoms.empty() ? 0 : 1);
  long pick = integer(0, kinds);
  if (pick == 0) return leaf();
  if (pick == 1) return expression(sub) + expression(sub);
  if (pick == 2) return expression(sub) * expression(sub);
  if (pick == 3) {
    int e = static_cast<int>(integer(2, 3));
    if (shape.quotients && integer(0, 2) == 0) e = -1;
    return pow(expression(sub), e);
  }
  if (pick == 4) return expression(sub) - expression(sub);
  if (shape.builtins && pick == 5) {
    static const Builtin fns[] = {Builtin::Sin, Builtin::Cos, Builtin::Sinh, Builtin::Cosh, Builtin::Exp};
    return Expr::apply(fns[integer(0, 4)], expression(sub));
  }
  const auto& name = shape.atoms[static_cast<std::size_t>(integer(0, static_cast<long>(shape.atoms.size()) - 1))];
  return Expr::atom(name, expression(sub), 0);
}

std::optional<BranchSpec> Random::branch_binding(Branch b, int sign, int delta, int attempts) {
  for (int i = 0; i < attempts; ++i) {
    BranchSpec s;
    s.branch = b;
    s.sign = sign;
    s.delta = delta;
    for (const auto& p : branch_parameters(b)) s.params[p] = rational();
    for (const auto& p : binary_parameters(b)) s.params[p] = num(integer(0, 1));
    try {
      construct(s);
      return s;
    } catch (const ConstraintError&) {
    }
  }
  return std::nullopt;
}

Matrix2 Random::unimodular(int max_order) {
  Expr p = polynomial(max_order, static_cast<int>(integer(1, 3)));
  Expr q = polynomial(max_order, static_cast<int>(integer(1, 3)));
  return real_matrix(num(1), q, p, num(1) + p * q);
}

}  // namespace pssforge
