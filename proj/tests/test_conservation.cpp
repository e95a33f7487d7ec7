#include <doctest.h>

#include <algorithm>

#include "pssforge/conservation.hpp"
#include "pssforge/families.hpp"

using namespace pssforge;

namespace {

bool same(const Expr& a, const std::string& b, const Context& ctx = {}) {
  return normalize(a - parse(b), ctx).is_zero();
}

Coframe constant_coframe() {
  Coframe c;
  c.f = {{{num(0), num(0)}, {sym("eta"), num(0)}, {num(0), num(0)}}};
  return c;
}

}  // namespace

TEST_CASE("Pfaffian of the sine-Gordon coframe") {
  FamilyInstance sg = catalog("sine-gordon");
  Pfaffian p = pfaffian(sg.coframe);
  CHECK_FALSE(p.hyperbolic);
  CHECK(same(p.rho_x, "z1 + eta*cos(varrho)"));
  CHECK(same(p.rho_t, "(sin(varrho)*sin(z) + cos(varrho)*cos(z))/eta"));

  Pfaffian zero = pfaffian(Coframe{});
  CHECK(zero.rho_x.is_zero());
  CHECK(zero.rho_t.is_zero());

  Coframe ss = sg.coframe;
  ss.delta = -1;
  CHECK_THROWS_AS(pfaffian(ss), ExprError);
  PfaffianOptions opt;
  opt.spherical = true;
  CHECK(pfaffian(ss, opt).hyperbolic);
}

TEST_CASE("closed form check") {
  FamilyInstance sg = catalog("sine-gordon");
  CHECK(closed_form_check(sg.coframe, sg.equation).pass());
  PfaffianOptions flipped;
  flipped.orientation = -1;
  CHECK(closed_form_check(sg.coframe, sg.equation, flipped).pass());

  Coframe broken = sg.coframe;
  broken(1, 2) = num(0);
  CHECK_FALSE(closed_form_check(broken, sg.equation).pass());
  CHECK_FALSE(closed_form_check(sg.coframe, EquationSpec::none()).pass());
}

TEST_CASE("closed form check on pseudospherical catalog entries") {
  for (const auto& name : catalog_names()) {
    FamilyInstance inst = catalog(name);
    if (inst.coframe.delta != 1) continue;
    CAPTURE(name);
    CHECK(closed_form_check(inst.coframe, inst.equation).pass());
  }
}

TEST_CASE("verify conserved pairs") {
  FamilyInstance sg = catalog("sine-gordon");
  ConservedPair standard{parse("z1^2/2"), parse("1 - cos(z)")};
  CHECK(verify_conserved(standard, sg.equation));
  CHECK(conservation_defect(standard, sg.equation).is_zero());

  ConservedPair wrong{z(), z()};
  EquationSpec linear = EquationSpec::generic(JetVar::time(0), z(3));
  CHECK_FALSE(verify_conserved(wrong, linear));
  CHECK(same(conservation_defect(wrong, linear), "z3 - z1"));
  CHECK(verify_conserved({z(), z(2)}, linear));
}

TEST_CASE("adding an exact derivative preserves conservation") {
  FamilyInstance sg = catalog("sine-gordon");
  ConservedPair p{parse("z1^2/2"), parse("1 - cos(z)")};
  for (const char* g : {"z*z1", "sin(z)", "z1^3 + z"}) {
    CAPTURE(g);
    Expr ge = parse(g);
    ConservedPair q{p.density + total_dx(ge), p.flux + total_dt(ge)};
    CHECK(verify_conserved(q, sg.equation));
    ConservedPair bad{p.density + total_dx(ge), p.flux};
    CHECK_FALSE(verify_conserved(bad, sg.equation));
  }
}

TEST_CASE("Euler operator detects exact derivatives") {
  CHECK(euler_operator(total_dx(parse("z*z1 + sin(z)"))).is_zero());
  CHECK_FALSE(euler_operator(parse("z1^2")).is_zero());
  CHECK(same(euler_operator(parse("z1^2/2")), "-z2"));

  FamilyInstance sg = catalog("sine-gordon");
  Expr g = parse("z*z1");
  ConservedPair p{parse("z1^2/2") + total_dx(g), parse("1 - cos(z)") + total_dt(g)};
  CHECK(verify_conserved(p, sg.equation));
  ConservedPair stripped = strip_exact(p, sg.equation);
  CHECK(verify_conserved(stripped, sg.equation));
  CHECK(euler_operator(stripped.density - p.density).is_zero());
}

TEST_CASE("sine-Gordon series about eta = infinity") {
  FamilyInstance sg = catalog("sine-gordon");
  auto pairs = series_densities(sg.coframe, sg.equation, "eta", SeriesCenter::Infinity, 2);
  REQUIRE(pairs.size() == 2);
  for (const auto& p : pairs) {
    CHECK(p.verified);
    CHECK(verify_conserved(p, sg.equation));
  }
  bool quadratic = false;
  for (const auto& p : pairs) {
    if (p.trivial) continue;
    ConservedPair s = strip_exact(p, sg.equation);
    Expr ratio = normalize(s.density / parse("z1^2"));
    quadratic = quadratic || (ratio.is_constant() && !ratio.is_zero());
  }
  CHECK(quadratic);
  AngleSeries a = angle_series(sg.coframe, "eta", SeriesCenter::Infinity, 2);
  CHECK(a.terms.size() == 2);
}

TEST_CASE("constant coframe gives trivial densities") {
  Coframe c = constant_coframe();
  auto pairs = series_densities(c, EquationSpec::none(), "eta", SeriesCenter::Infinity, 2);
  REQUIRE_FALSE(pairs.empty());
  for (const auto& p : pairs) {
    CHECK(p.trivial);
    CHECK(p.verified);
    CHECK(normalize(p.density).is_constant());
  }
}

TEST_CASE("KdV series needs the shifted frame") {
  FamilyInstance kdv = catalog("kdv");
  CHECK_THROWS_AS(series_densities(kdv.coframe, kdv.equation, "eta", SeriesCenter::Infinity, 2), SeriesError);

  FamilyInstance shifted = shifted_frame(kdv, parse("eta^2/2"), parse("-3*eta^2/2"));
  auto pairs = series_densities(shifted.coframe, shifted.equation, "eta", SeriesCenter::Infinity, 2);
  REQUIRE(pairs.size() == 2);
  for (const auto& p : pairs) CHECK(verify_conserved(p, shifted.equation));

  auto longer = series_densities(shifted.coframe, shifted.equation, "eta", SeriesCenter::Infinity, 4);
  REQUIRE(longer.size() == 4);
  CHECK(std::count_if(longer.begin(), longer.end(), [](const ConservedPair& p) { return !p.trivial; }) >= 2);
  for (const auto& p : longer) CHECK(verify_conserved(p, shifted.equation));
}

TEST_CASE("series argument validation") {
  FamilyInstance sg = catalog("sine-gordon");
  CHECK_THROWS_AS(series_densities(sg.coframe, sg.equation, "eta", SeriesCenter::Infinity, 0), ExprError);
  CHECK_THROWS_AS(series_densities(sg.coframe, sg.equation, "eta", SeriesCenter::Infinity, 7), ExprError);
}
