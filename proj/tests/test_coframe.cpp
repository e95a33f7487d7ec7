#include <doctest.h>

#include "pssforge/coframe.hpp"
#include "pssforge/families.hpp"
#include "pssforge/properties.hpp"
#include "pssforge/random.hpp"

using namespace pssforge;

namespace {

bool same(const Expr& a, const std::string& b, const Context& ctx = {}) {
  return normalize(a - parse(b), ctx).is_zero();
}

bool same(const Complex& c, const std::string& re, const std::string& im = "0", const Context& ctx = {}) {
  return same(c.re, re, ctx) && same(c.im, im, ctx);
}

bool equal(const Matrix2& a, const Matrix2& b, const Context& ctx) {
  for (std::size_t i = 0; i < 2; ++i)
    for (std::size_t j = 0; j < 2; ++j)
      if (!normalize(a[i][j].re - b[i][j].re, ctx).is_zero() || !normalize(a[i][j].im - b[i][j].im, ctx).is_zero())
        return false;
  return true;
}

FamilyInstance branch(Branch b, int delta = 1, std::map<std::string, Expr> params = {}, int sign = 1) {
  BranchSpec s;
  s.branch = b;
  s.delta = delta;
  s.sign = sign;
  s.params = std::move(params);
  return construct(s);
}

}  // namespace

TEST_CASE("sine-Gordon structure residuals") {
  FamilyInstance sg = catalog("sine-gordon");
  ResidualTriple bare = structure_residuals(sg.coframe, EquationSpec::none());
  CHECK(bare.r[0].is_zero());
  CHECK(bare.r[1].is_zero());
  CHECK(same(bare.r[2], "sin(z) - z1t"));
  CHECK_FALSE(bare.zero());
  CHECK(structure_residuals(sg.coframe, sg.equation).zero());
  SurfaceReport rep = verify_describes_surface(sg.coframe, sg.equation);
  CHECK(rep.pass());
  CHECK(rep.nondegenerate);
}

TEST_CASE("class-a branch closes under its rule") {
  FamilyInstance inst = branch(Branch::T32_I);
  CHECK(inst.equation.cls == EquationClass::A);
  CHECK(structure_residuals(inst.coframe, inst.equation).zero());
  CHECK_FALSE(structure_residuals(inst.coframe, EquationSpec::none()).zero());
}

TEST_CASE("T33 family describes surfaces for both deltas") {
  for (int delta : {1, -1}) {
    CAPTURE(delta);
    FamilyInstance inst = branch(Branch::T33, delta);
    CHECK(inst.coframe.delta == delta);
    CHECK(verify_describes_surface(inst.coframe, inst.equation).pass());
  }
}

TEST_CASE("a broken coframe fails verification") {
  FamilyInstance sg = catalog("sine-gordon");
  Coframe broken = sg.coframe;
  broken(1, 2) = num(0);
  SurfaceReport rep = verify_describes_surface(broken, sg.equation);
  CHECK_FALSE(rep.pass());
  CHECK_FALSE(rep.residuals_zero);

  Coframe flat;
  flat.f = {{{num(1), num(0)}, {num(0), num(0)}, {num(0), num(0)}}};
  SurfaceReport degenerate = verify_describes_surface(flat, EquationSpec::none());
  CHECK(degenerate.residuals_zero);
  CHECK_FALSE(degenerate.nondegenerate);
  CHECK_FALSE(degenerate.pass());
}

TEST_CASE("the zero solution caveat: residuals vanish generically") {
  FamilyInstance kdv = catalog("kdv");
  CHECK(verify_describes_surface(kdv.coframe, kdv.equation).pass());
  Expr nondeg = verify_describes_surface(kdv.coframe, kdv.equation).nondegeneracy;
  Bindings zero;
  for (int k = 0; k <= 3; ++k) zero.bind(z(k), num(0));
  CHECK_FALSE(nondeg.is_zero());
  CHECK_NOTHROW(substitute(nondeg, zero, kdv.coframe.context));
}

TEST_CASE("ZCR matrices") {
  FamilyInstance sg = catalog("sine-gordon");
  ZcrPair p = zcr_matrices(sg.coframe);
  CHECK(p.algebra == LieAlgebra::SL2);
  CHECK(same(p.X[0][0], "eta/2"));
  CHECK(same(p.X[0][1], "-z1/2"));
  CHECK(same(p.X[1][0], "z1/2"));
  CHECK(same(p.X[1][1], "-eta/2"));
  CHECK(is_zero(zcr_residual(p, sg.equation)));
  CHECK_FALSE(is_zero(zcr_residual(p, EquationSpec::none())));

  Coframe zero;
  ZcrPair pz = zcr_matrices(zero);
  CHECK(is_zero(pz.X));
  CHECK(is_zero(pz.T));

  FamilyInstance kdv = catalog("kdv");
  CHECK(is_zero(zcr_residual(zcr_matrices(kdv.coframe), kdv.equation)));

  ZcrPair perturbed = p;
  perturbed.T[0][1].re = perturbed.T[0][1].re + z(0);
  CHECK_FALSE(is_zero(zcr_residual(perturbed, sg.equation)));
}

TEST_CASE("ZCR matrices are traceless in both algebras") {
  for (int delta : {1, -1}) {
    FamilyInstance inst = branch(Branch::T35_II, delta);
    ZcrPair p = zcr_matrices(inst.coframe);
    CHECK(p.algebra == (delta == 1 ? LieAlgebra::SL2 : LieAlgebra::SU2));
    auto [tx, tt] = traces(p);
    CHECK(same(tx, "0"));
    CHECK(same(tt, "0"));
    CHECK(is_zero(zcr_residual(p, inst.equation)));
  }
}

TEST_CASE("gauge transformations") {
  FamilyInstance sg = catalog("sine-gordon");
  ZcrPair p = zcr_matrices(sg.coframe);
  const Context& ctx = p.context;

  ZcrPair id = gauge_transform(p, real_matrix(num(1), num(0), num(0), num(1)));
  CHECK(equal(id.X, p.X, ctx));
  CHECK(equal(id.T, p.T, ctx));

  Matrix2 shear = real_matrix(num(1), parse("g(z)"), num(0), num(1));
  ZcrPair g = gauge_transform(p, shear, &sg.equation);
  CHECK(is_zero(zcr_residual(g, sg.equation)));
  CHECK(gauge_identity(sg, shear));

  ZcrPair d = gauge_transform(p, real_matrix(sym("c"), num(0), num(0), parse("1/c")));
  CHECK(same(d.X[0][0], "eta/2"));
  CHECK(same(d.X[0][1], "-c^2*z1/2"));
  CHECK(same(d.X[1][0], "z1/(2*c^2)"));

  CHECK_THROWS_AS(gauge_transform(p, real_matrix(num(2), num(0), num(0), num(1))), ExprError);
  CHECK_THROWS_AS(gauge_transform(p, real_matrix(num(1), parse("z1t"), num(0), num(1))), ExprError);
}

TEST_CASE("gauge conjugation identity for random unimodular matrices") {
  Random rng(seed_from_env(7));
  FamilyInstance sg = catalog("sine-gordon");
  for (int i = 0; i < 5; ++i) {
    Matrix2 S = rng.unimodular();
    std::string detail;
    CHECK_MESSAGE(gauge_identity(sg, S, &detail), detail);
  }
}

TEST_CASE("class-a lemma checker") {
  FamilyInstance inst = branch(Branch::T32_I, 1, {{"a", num(0)}, {"b", num(1)}});
  LemmaReport rep = lemma1_check(inst.coframe, inst.equation);
  CHECK_MESSAGE(rep.pass(), rep.failed().size());
  CHECK(rep.decomposition.count("phi") == 1);

  for (int delta : {1, -1}) {
    FamilyInstance t35 = branch(Branch::T35_II, delta);
    LemmaReport r = lemma1_check(t35.coframe, t35.equation);
    CHECK(r.pass());
  }

  Coframe bad = inst.coframe;
  bad(2, 1) = bad(2, 1) + z(2);
  LemmaReport broken = lemma1_check(bad, inst.equation);
  CHECK_FALSE(broken.pass());
  auto failed = broken.failed();
  CHECK(std::find(failed.begin(), failed.end(), "f21_shape") != failed.end());
}

TEST_CASE("class-b lemma checker") {
  FamilyInstance t33s = branch(Branch::T33s_I);
  CHECK(lemma1star_check(t33s.coframe, t33s.equation).pass());
  for (int delta : {1, -1}) {
    FamilyInstance t35s = branch(Branch::T35s_II, delta);
    CHECK(lemma1star_check(t35s.coframe, t35s.equation).pass());
  }

  Coframe degenerate;
  degenerate.f = {{{sym("eta"), num(0)}, {num(0), num(0)}, {parse("mu3*z2"), parse("mu3*z3")}}};
  EquationSpec eq = EquationSpec::class_b(num(1), num(0));
  LemmaReport rep = lemma1star_check(degenerate, eq);
  auto failed = rep.failed();
  CHECK(std::find(failed.begin(), failed.end(), "w1_w2_nondegenerate") != failed.end());
}

TEST_CASE("class-a cancellation of the formal z2t") {
  for (Branch b : {Branch::T32_I, Branch::T32_II, Branch::T33, Branch::T35_I, Branch::T35_II}) {
    FamilyInstance inst = branch(b);
    CAPTURE(inst.branch);
    REQUIRE(inst.equation.cls == EquationClass::A);
    ResidualTriple r = structure_residuals(inst.coframe, inst.equation);
    for (const Expr& e : r.r) CHECK(normalize(partial(e, JetVar::time(2)), inst.coframe.context).is_zero());
    CHECK(r.zero());
  }
}

TEST_CASE("residuals are affine in the dt column") {
  Coframe base;
  base.f = {{{sym("eta"), num(0)}, {z(1), num(0)}, {parse("z^2"), num(0)}}};
  auto with = [&](std::array<const char*, 3> col) {
    Coframe c = base;
    for (int i = 0; i < 3; ++i) c(i + 1, 2) = parse(col[static_cast<std::size_t>(i)]);
    return structure_residuals(c, EquationSpec::none());
  };
  ResidualTriple r0 = with({"0", "0", "0"});
  ResidualTriple ra = with({"z*z2", "sin(z)", "eta*z1"});
  ResidualTriple rb = with({"z1^3", "z2/eta", "h(z)"});
  ResidualTriple rab = with({"z*z2 + z1^3", "sin(z) + z2/eta", "eta*z1 + h(z)"});
  for (std::size_t i = 0; i < 3; ++i) CHECK(normalize(ra.r[i] + rb.r[i] - r0.r[i] - rab.r[i]).is_zero());
}

TEST_CASE("oracle triangle agrees on every branch and detects mutations") {
  Random rng(seed_from_env(11));
  for (Branch b : all_branches()) {
    for (int delta : admissible_deltas(b)) {
      for (int sign : {1, -1}) {
        auto spec = rng.branch_binding(b, sign, delta);
        REQUIRE(spec);
        FamilyInstance inst = construct(*spec);
        CAPTURE(inst.branch);
        CAPTURE(delta);
        CAPTURE(sign);
        OracleVerdict v = oracle_triangle(inst);
        CHECK(v.all());
        for (const auto& [name, mutated] : coframe_mutations(inst)) {
          CAPTURE(name);
          FamilyInstance m = inst;
          m.coframe = mutated;
          OracleVerdict w = oracle_triangle(m);
          CHECK(w.agree());
          CHECK(w.none());
        }
      }
    }
  }
}
