#pragma once

#include <map>
#include <optional>
#include <string>
#include <vector>

#include "pssforge/coframe.hpp"

namespace pssforge {

enum class Branch { T32_I, T32_II, T33, T35_I, T35_II, T32s_I, T32s_II, T33s_I, T33s_II, T35s_I, T35s_II };

const std::vector<Branch>& all_branches();
std::string branch_id(Branch b);
Branch parse_branch(const std::string& id);
/// delta values the branch admits: {1} or {1, -1}.
std::vector<int> admissible_deltas(Branch b);
/// Parameter symbols the branch formulas use.
std::vector<std::string> branch_parameters(Branch b);
/// Parameters restricted to the values 0 and 1.
std::vector<std::string> binary_parameters(Branch b);

/// Arbitrary function of a branch: formal atom (default) or a closed form
/// written in `vars`.
struct FunctionSpec {
  bool formal = true;
  Expr body;
  std::vector<std::string> vars;
  /// Optional argument check; must normalize to the branch argument.
  std::optional<Expr> arg;
};

struct BranchSpec {
  Branch branch = Branch::T32_I;
  int sign = 1;  // upper (+1) or lower (-1) choice of the coupled signs
  int delta = 1;
  std::map<std::string, Expr> params;
  std::map<std::string, FunctionSpec> functions;
  /// Extra radicals used by parameter bindings.
  std::vector<SideRelation> side_relations;
};

struct FamilyInstance {
  std::string name;
  std::string branch;
  int sign = 1;
  EquationSpec equation;
  Coframe coframe;
  /// Right-hand side of the evolution law; the left side is
  /// z_t - lam z_2t (class a), z_2t (class b) or the rule variable.
  Expr rhs;
  std::vector<std::string> flags;
  std::map<std::string, Expr> bindings;
  std::vector<std::string> free_parameters;
};

class ConstraintError : public ExprError {
 public:
  using ExprError::ExprError;
};

FamilyInstance construct(const BranchSpec& spec);

/// Splits a quasilinear right-hand side into A z3 + B.
std::pair<Expr, Expr> as_AB(const Expr& rhs, const Context& ctx = {});

const std::vector<std::string>& catalog_names();
FamilyInstance catalog(const std::string& name);

/// z_2t = D_x psi with the rescaled coframe
/// w1 = (m eta z1 + n) dt, w2 = eta z2 dx + eta (psi -+ m eta z1^2/2 -+ n z1) dt,
/// w3 = +-w2 - m dt.
FamilyInstance rescaled_second_order_family(int sign, const std::map<std::string, Expr>& params = {});

/// Coframe pulled back along w(x,t) = z(x + speed t, t) + shift:
/// f_i1 -> f_i1(z + shift), f_i2 -> f_i2(z + shift) - speed f_i1(z + shift).
/// It describes the same equation when that map sends solutions to
/// solutions (KdV: speed = -3 shift); ExprError otherwise.
FamilyInstance shifted_frame(const FamilyInstance& inst, const Expr& shift, const Expr& speed);

}  // namespace pssforge
