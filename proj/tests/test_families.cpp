#include <doctest.h>

#include <algorithm>

#include "pssforge/families.hpp"
#include "pssforge/properties.hpp"
#include "pssforge/random.hpp"

using namespace pssforge;

namespace {

bool same(const Expr& a, const std::string& b, const Context& ctx = {}) {
  return normalize(a - parse(b), ctx).is_zero();
}

bool mentions(const Expr& e, const std::string& name) {
  auto syms = free_symbols(e);
  return std::any_of(syms.begin(), syms.end(), [&](const Expr& s) { return s.kind() == NodeKind::Param && s.name() == name; });
}

bool coframe_mentions(const Coframe& c, const std::string& name) {
  for (const auto& row : c.f)
    for (const auto& e : row)
      if (mentions(e, name)) return true;
  return false;
}

BranchSpec spec(Branch b, std::map<std::string, Expr> params = {}, int delta = 1, int sign = 1) {
  BranchSpec s;
  s.branch = b;
  s.params = std::move(params);
  s.delta = delta;
  s.sign = sign;
  return s;
}

FunctionSpec closed(const std::string& body, std::vector<std::string> vars) {
  FunctionSpec f;
  f.formal = false;
  f.body = parse(body);
  f.vars = std::move(vars);
  return f;
}

}  // namespace

TEST_CASE("branch identifiers") {
  CHECK(all_branches().size() == 11);
  for (Branch b : all_branches()) CHECK(parse_branch(branch_id(b)) == b);
  CHECK(branch_id(Branch::T35s_II) == "T35s-II");
  CHECK_THROWS(parse_branch("T36"));
  CHECK(admissible_deltas(Branch::T32_I) == std::vector<int>{1});
  CHECK(admissible_deltas(Branch::T33).size() == 2);
}

TEST_CASE("every branch describes surfaces for every sign and delta") {
  Random rng(seed_from_env(3));
  for (Branch b : all_branches())
    for (int delta : admissible_deltas(b))
      for (int sign : {1, -1}) {
        CAPTURE(branch_id(b));
        CAPTURE(delta);
        CAPTURE(sign);
        auto s = rng.branch_binding(b, sign, delta);
        REQUIRE(s);
        FamilyInstance inst = construct(*s);
        CHECK(inst.branch == branch_id(b));
        CHECK(verify_describes_surface(inst.coframe, inst.equation).pass());
        CHECK(inst.equation.cls == (branch_id(b).find('s') != std::string::npos ? EquationClass::B : EquationClass::A));
      }
}

TEST_CASE("formal branches without bindings") {
  for (Branch b : {Branch::T32_II, Branch::T33, Branch::T35_I, Branch::T35_II, Branch::T32s_II, Branch::T33s_I,
                   Branch::T33s_II, Branch::T35s_I, Branch::T35s_II})
    for (int delta : admissible_deltas(b)) {
      CAPTURE(branch_id(b));
      CAPTURE(delta);
      FamilyInstance inst = construct(spec(b, {}, delta));
      CHECK(verify_describes_surface(inst.coframe, inst.equation).pass());
    }
}

TEST_CASE("Camassa-Holm type equation from h = z + m") {
  BranchSpec s = spec(Branch::T32_II);
  s.functions["h"] = closed("u + m", {"u"});
  FamilyInstance inst = construct(s);
  CHECK(same(inst.rhs, "(lam*z + lam*m - 1)*z3 + 2*lam*z1*z2 - 3*z*z1 - m*z1"));
  CHECK(same(inst.equation.A, "lam*z + lam*m - 1"));
  CHECK(verify_describes_surface(inst.coframe, inst.equation).pass());

  s.sign = -1;
  CHECK(same(construct(s).rhs, "(lam*z + lam*m + 1)*z3 + 2*lam*z1*z2 - 3*z*z1 - m*z1"));
}

TEST_CASE("specialization of the formal h matches the catalog entry") {
  FamilyInstance formal = construct(spec(Branch::T32_II));
  FamilyInstance chr = catalog("ch-r");
  Bindings h;
  h.bind_function("h", {"u"}, parse("u + m"));
  const Context& ctx = chr.coframe.context;
  for (int i = 1; i <= 3; ++i)
    for (int j = 1; j <= 2; ++j) {
      CAPTURE(i);
      CAPTURE(j);
      CHECK(normalize(substitute(formal.coframe(i, j), h, ctx) - chr.coframe(i, j), ctx).is_zero());
    }
  CHECK(normalize(substitute(formal.equation.A, h, ctx) - chr.equation.A, ctx).is_zero());
  CHECK(normalize(substitute(formal.equation.B, h, ctx) - chr.equation.B, ctx).is_zero());
}

TEST_CASE("Kraenkel equation from the second-order branch") {
  BranchSpec s = spec(Branch::T33s_I);
  s.functions["psi"] = closed("alpha*(z1^2 + z*z2) + beta*z", {"z", "z1", "z2"});
  FamilyInstance inst = construct(s);
  CHECK(same(inst.rhs, "alpha*z*z3 + 3*alpha*z1*z2 + beta*z1"));
  CHECK(verify_describes_surface(inst.coframe, inst.equation).pass());
  CHECK(same(catalog("kraenkel").rhs, "alpha*z*z3 + 3*alpha*z1*z2 + beta*z1"));
}

TEST_CASE("catalog entries") {
  CHECK(catalog_names().size() == 15);
  for (const auto& name : catalog_names()) {
    CAPTURE(name);
    FamilyInstance inst = catalog(name);
    CHECK(inst.name == name);
    CHECK(verify_describes_surface(inst.coframe, inst.equation).pass());
  }
  CHECK(same(catalog("camassa-holm").rhs, "z*z3 + 2*z1*z2 - 3*z*z1 - z1"));
  CHECK(same(catalog("camassa-holm").equation.lambda, "1"));
  CHECK(same(catalog("kdv").rhs, "z3 - 3*z*z1"));
  CHECK(same(catalog("kdv").equation.lambda, "0"));
  FamilyInstance hs = catalog("hunter-saxton");
  CHECK(same(hs.rhs, "-z*z3 - 2*z1*z2"));
  CHECK(std::count(hs.flags.begin(), hs.flags.end(), "zcr-for-differential-consequence") == 1);
  CHECK_THROWS_AS(catalog("no-such-equation"), ExprError);
  CHECK_THROWS_AS(catalog("nls"), ExprError);
}

TEST_CASE("free parameters live in the coframe only") {
  for (const auto& [name, param] : std::vector<std::pair<std::string, std::string>>{
           {"kdv", "alpha"}, {"camassa-holm", "alpha"}, {"alt-ch-r", "eta"}, {"liouville-linked", "eta"},
           {"kraenkel", "r"}, {"hunter-saxton", "r"}, {"sine-gordon", "eta"}}) {
    CAPTURE(name);
    FamilyInstance inst = catalog(name);
    CHECK(std::count(inst.free_parameters.begin(), inst.free_parameters.end(), param) == 1);
    CHECK(coframe_mentions(inst.coframe, param));
    CHECK_FALSE(mentions(inst.equation.A, param));
    CHECK_FALSE(mentions(inst.equation.B, param));
  }
}

TEST_CASE("second-order branch is a differential consequence") {
  FamilyInstance inst = construct(spec(Branch::T33s_I, {{"r", num(2)}}));
  CHECK(same(inst.rhs, "psi[1,0,0](z,z1,z2)*z1 + psi[0,1,0](z,z1,z2)*z2 + psi[0,0,1](z,z1,z2)*z3"));
  CHECK(same(inst.rhs - total_dx(parse("psi(z,z1,z2)")), "0"));
  CHECK(std::count(inst.flags.begin(), inst.flags.end(), "zcr-for-differential-consequence") == 1);
  CHECK_THROWS_AS(construct(spec(Branch::T33s_I, {{"r", num(1)}}, 1)), ConstraintError);
  CHECK_NOTHROW(construct(spec(Branch::T33s_I, {{"r", num(1)}}, -1)));
}

TEST_CASE("constraint violations are named") {
  auto message = [](const BranchSpec& s) {
    try {
      construct(s);
    } catch (const ConstraintError& e) {
      return std::string(e.what());
    }
    return std::string("no error");
  };
  CHECK(message(spec(Branch::T33, {{"r", num(0)}})).find("r*gamma") != std::string::npos);
  CHECK(message(spec(Branch::T33, {{"gamma", num(-2)}, {"sigma", num(1)}}, -1)).find("gamma + delta*sigma^2 >= 0") !=
        std::string::npos);
  CHECK(message(spec(Branch::T35_I, {{"rho", frac(1, 2)}})).find("rho^2 - 1 >= 0") != std::string::npos);
  CHECK(message(spec(Branch::T32s_II, {{"alpha", num(2)}, {"beta", num(2)}})).find("alpha -+ beta") != std::string::npos);
  CHECK(message(spec(Branch::T32_I, {{"a", num(2)}})).find("a in {0,1}") != std::string::npos);
  CHECK(message(spec(Branch::T32s_I, {{"a", num(0)}, {"b", num(1)}, {"alpha", num(0)}})).find("(a - 1)*b = 0") != std::string::npos);
  CHECK(message(spec(Branch::T35_II, {{"gamma", num(0)}})).find("eta*gamma != 0") != std::string::npos);
  CHECK(message(spec(Branch::T32_I, {}, -1)).find("delta") != std::string::npos);
  CHECK_THROWS_AS(construct(spec(Branch::T32s_II, {{"m", num(1)}})), ExprError);
  CHECK_THROWS_AS(construct(spec(Branch::T33, {{"delta", num(1)}})), ExprError);
}

TEST_CASE("quasilinear split") {
  auto [A, B] = as_AB(parse("(lam*z + lam*m - 1)*z3 + 2*lam*z1*z2 - 3*z*z1 - m*z1"));
  CHECK(same(A, "lam*z + lam*m - 1"));
  CHECK(same(B, "2*lam*z1*z2 - 3*z*z1 - m*z1"));
  auto [A1, B1] = as_AB(z(3));
  CHECK(A1.is_one());
  CHECK(B1.is_zero());
  CHECK_THROWS_AS(as_AB(parse("z3^2")), ExprError);
  CHECK_THROWS_AS(as_AB(parse("z4 + z")), ExprError);
  CHECK_THROWS_AS(as_AB(parse("z3 - z3")), ExprError);
  CHECK_THROWS_AS(as_AB(parse("z2t")), ExprError);
}

TEST_CASE("shifted frame for KdV") {
  FamilyInstance kdv = catalog("kdv");
  FamilyInstance shifted = shifted_frame(kdv, sym("c"), parse("-3*c"));
  CHECK(shifted.name == "kdv-shifted");
  CHECK(std::count(shifted.flags.begin(), shifted.flags.end(), "shifted-frame") == 1);
  CHECK(verify_describes_surface(shifted.coframe, shifted.equation).pass());
  CHECK_THROWS_AS(shifted_frame(kdv, sym("c"), sym("c")), ExprError);
  CHECK_THROWS_AS(shifted_frame(catalog("sine-gordon"), num(1), num(0)), ExprError);
  CHECK_THROWS_AS(shifted_frame(kdv, z(1), num(0)), ExprError);
}

TEST_CASE("rescaled second-order family") {
  for (int sign : {1, -1}) {
    FamilyInstance inst = rescaled_second_order_family(sign);
    CHECK(verify_describes_surface(inst.coframe, inst.equation).pass());
  }
  CHECK_THROWS_AS(rescaled_second_order_family(0), ExprError);
}
