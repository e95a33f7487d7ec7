#include <doctest.h>

#include <cmath>
#include <numbers>
#include <thread>

#include "pssforge/jet_expr.hpp"
#include "pssforge/properties.hpp"
#include "pssforge/random.hpp"

using namespace pssforge;

namespace {

Expr n(const std::string& text, const Context& ctx = {}) { return normalize(parse(text), ctx); }

bool same(const Expr& a, const std::string& b, const Context& ctx = {}) { return normalize(a, ctx) == n(b, ctx); }

}  // namespace

TEST_CASE("parse builds the expected trees") {
  CHECK(same(parse("z1^2 - z*z2"), "z1*z1 - z2*z"));
  Expr e = parse("h''(z)*z1 + h'(z)*z2");
  CHECK(e == Expr::atom("h", z(), 2) * z(1) + Expr::atom("h", z(), 1) * z(2));
  Expr phi = parse("phi'(lam*z1^2 - z^2)");
  REQUIRE(phi.kind() == NodeKind::Atom);
  CHECK(phi.name() == "phi");
  CHECK(phi.deriv()[0] == 1);
  CHECK(normalize(phi.children()[0]) == n("lam*z1^2 - z^2"));
  CHECK(parse("z3t") == zt(3));
  CHECK(parse("zt") == zt(0));
  CHECK(normalize(parse("3/4")) == frac(3, 4));
  CHECK(parse("psi[0,1,0](z,z1,z2)") == Expr::atom("psi", {z(), z(1), z(2)}, {0, 1, 0}));
}

TEST_CASE("parse reports errors with positions") {
  try {
    parse("z1 + * z");
    FAIL("expected a parse error");
  } catch (const ParseError& e) {
    CHECK(e.position() == 5);
  }
  CHECK_THROWS_AS(parse("tan(z)"), ParseError);
  CHECK_THROWS_AS(parse("z1tt"), ParseError);
  CHECK_THROWS_AS(parse("(z + 1"), ParseError);
  CHECK_THROWS_AS(parse("z^x"), ParseError);
}

TEST_CASE("normalize is canonical") {
  CHECK(n("(z+z1)^2 - z^2 - 2*z*z1 - z1^2").is_zero());
  CHECK(n("(z1 + eta)/(z1 + eta)").is_one());
  CHECK(same(parse("(z^2 - 1)/(z - 1)"), "z + 1"));
  CHECK_THROWS_AS(n("z/(z - z)"), ExprError);
  for (const char* text : {"sin(z)^2*z1/(eta - z) + 3", "h'(z1^2 - z)*h(z)^2 - 1/(2*lam)", "(z+z2)^3/(z1*eta)"}) {
    Expr once = n(text);
    CHECK(normalize(once) == once);
    CHECK(normalize(parse(text) - parse(text)).is_zero());
  }
}

TEST_CASE("normalize applies side relations") {
  Context ctx;
  ctx.add_side_relation("s", parse("gamma + delta*sigma^2"));
  CHECK(same(parse("s*s"), "gamma + delta*sigma^2", ctx));
  CHECK(same(parse("s^3"), "s*(gamma + delta*sigma^2)", ctx));
  CHECK(same(parse("1/s"), "s/(gamma + delta*sigma^2)", ctx));
}

TEST_CASE("normalize applies linear ODE rules") {
  Context ctx;
  ctx.add_ode_rule({"phi", 2, {parse("-(r^2 - delta)"), num(0)}});
  CHECK(same(parse("phi''(z1)"), "-(r^2 - delta)*phi(z1)", ctx));
  CHECK(same(parse("phi'''(z1)"), "-(r^2 - delta)*phi'(z1)", ctx));
  CHECK(same(total_dx(parse("phi'(z1)"), ctx), "-(r^2 - delta)*phi(z1)*z2", ctx));
}

TEST_CASE("normalize reduces sin^2 and cosh^2") {
  CHECK(n("sin(z)^2 + cos(z)^2").is_one());
  CHECK(n("cosh(z1)^2 - sinh(z1)^2").is_one());
}

TEST_CASE("partial derivatives") {
  CHECK(same(partial(parse("z*z2"), JetVar::x(0)), "z2"));
  CHECK(same(partial(parse("h(z)"), JetVar::x(0)), "h'(z)"));
  Expr phi = parse("phi(lam*z1^2 - z^2)");
  CHECK(same(partial(phi, JetVar::x(1)), "phi'(lam*z1^2 - z^2)*2*lam*z1"));
  CHECK(same(partial(parse("eta*z1t + z"), JetVar::time(1)), "eta"));
  CHECK(same(partial(parse("eta^2*z"), sym("eta")), "2*eta*z"));

  NumericEnv env;
  env.set("lam", 0.7).set(JetVar::x(0), 0.3).set(JetVar::x(1), -0.4);
  env.functions["phi"] = numeric_function({[](double u) { return std::exp(u); }, [](double u) { return std::exp(u); }});
  double exact = eval_numeric(partial(phi, JetVar::x(1)), env);
  const double step = 1e-6;
  NumericEnv up = env, down = env;
  up.set(JetVar::x(1), -0.4 + step);
  down.set(JetVar::x(1), -0.4 - step);
  double fd = (eval_numeric(phi, up) - eval_numeric(phi, down)) / (2 * step);
  CHECK(std::abs(fd - exact) <= 1e-6 * std::max(1.0, std::abs(exact)));
}

TEST_CASE("total x-derivative") {
  CHECK(same(total_dx(parse("z*z1")), "z1^2 + z*z2"));
  CHECK(same(total_dx(parse("h(z)")), "h'(z)*z1"));
  Expr h3 = total_dx(total_dx(total_dx(parse("h(z)"))));
  CHECK(same(h3, "h'''(z)*z1^3 + 3*h''(z)*z1*z2 + h'(z)*z3"));
  CHECK(same(total_dx(parse("zt*z2t")), "z1t*z2t + zt*z3t"));
  CHECK(total_dx(parse("eta + 1")).is_zero());
}

TEST_CASE("total t-derivative") {
  CHECK(same(total_dt(parse("z - lam*z2")), "zt - lam*z2t"));
  CHECK(total_dt(parse("eta")).is_zero());
  CHECK(same(total_dt(parse("mu2*z2 + alpha2")), "mu2*z2t"));
  CHECK(same(total_dt(parse("h(z1)")), "h'(z1)*z1t"));
  CHECK_THROWS_AS(total_dt(parse("zt")), ExprError);
}

TEST_CASE("substitution") {
  CHECK(substitute(parse("z1^2"), Bindings().bind(z(1), num(0))).is_zero());
  Bindings ab;
  ab.bind("a", num(1)).bind("b", num(0));
  CHECK(same(substitute(parse("a*psi(z,z1,z2) + b*(z - lam*z2)"), ab), "psi(z,z1,z2)"));
  Bindings hm;
  hm.bind_function("h", {"u"}, parse("u + m"));
  CHECK(same(substitute(parse("h(z)*z1 + h'(z)*z3 + h''(z)*z2 + h'''(z)"), hm), "(z + m)*z1 + z3"));
  Bindings swap;
  swap.bind("a", sym("b")).bind("b", sym("a"));
  CHECK_THROWS_AS(substitute(parse("a - 2*b"), swap), ExprError);
  Bindings chain;
  chain.bind("a", parse("b + 1")).bind("b", z(1));
  CHECK(same(substitute(parse("a*b"), chain), "(b + 1)*z1"));
  Bindings cyc;
  cyc.bind("a", parse("b + 1")).bind("b", parse("a*z"));
  CHECK_THROWS_AS(substitute(parse("a + b"), cyc), ExprError);
  Bindings self;
  self.bind("a", parse("a + 1"));
  CHECK_THROWS_AS(substitute(parse("a"), self), ExprError);
}

TEST_CASE("numeric evaluation") {
  NumericEnv env;
  env.set(JetVar::x(0), 1).set(JetVar::x(1), 2).set(JetVar::x(2), 3);
  CHECK(eval_numeric(parse("z1^2 - z*z2"), env) == doctest::Approx(1.0));
  NumericEnv env2;
  env2.set(JetVar::x(0), std::numbers::pi / 2).set("eta", 2);
  CHECK(eval_numeric(parse("sin(z)/eta"), env2) == doctest::Approx(0.5));
  NumericEnv env3;
  env3.set(JetVar::x(0), 0).set("eta", 1);
  CHECK(eval_numeric(parse("cos(z)/eta"), env3) == doctest::Approx(1.0));

  CHECK_THROWS_AS(eval_numeric(parse("z + eta"), env), NumericError);
  CHECK_THROWS_AS(eval_numeric(parse("h(z)"), env), NumericError);
  env.functions["h"] = numeric_function({[](double u) { return u; }});
  CHECK(eval_numeric(parse("h(z)"), env) == doctest::Approx(1.0));
  CHECK_THROWS_AS(eval_numeric(parse("h'(z)"), env), NumericError);
  CHECK_THROWS_AS(eval_numeric(parse("1/(z - 1)"), env), NumericError);
}

TEST_CASE("free symbols and jet names") {
  CHECK(JetVar::x(0).name() == "z");
  CHECK(JetVar::x(2).name() == "z2");
  CHECK(JetVar::time(0).name() == "zt");
  CHECK(JetVar::time(1).name() == "z1t");
  auto syms = free_symbols(parse("eta*h(z1 + lam) + z3"));
  CHECK(syms.size() == 4);
  CHECK(function_names(parse("h(z) + phi'(z1)")) == std::vector<std::string>{"h", "phi"});
  CHECK(contains_t_derivative(parse("z + z2t")));
  CHECK_FALSE(contains_t_derivative(parse("z + z2")));
}

TEST_CASE("format renders canonical names") {
  CHECK(format(n("z1^2 - z*z2")).find("z1") != std::string::npos);
  CHECK(to_latex(parse("z1^2")) == "z_{1}^{2}");
  CHECK(to_latex(parse("eta")) == "\\eta");
}

TEST_CASE("contexts are independent across threads") {
  Context a, b;
  a.add_side_relation("s", parse("2"));
  b.add_side_relation("s", parse("3"));
  Expr ra, rb;
  std::thread ta([&] { ra = n("s^2", a); });
  std::thread tb([&] { rb = n("s^2", b); });
  ta.join();
  tb.join();
  CHECK(ra == num(2));
  CHECK(rb == num(3));
}

TEST_CASE("randomized kernel properties") {
  Random rng(seed_from_env(20240521));
  for (auto r : {leibniz_property(rng, 200), commutation_property(rng, 200), ring_property(rng, 200),
                 round_trip_property(rng, 200)}) {
    INFO(r.name << ": " << r.first_failure);
    CHECK(r.pass());
  }
  auto fd = chain_rule_fd_property(rng, 100);
  INFO(fd.first_failure);
  CHECK(fd.pass());
  CHECK(fd.max_error <= 1e-6);
}
