#pragma once

#include <string>
#include <string_view>
#include <vector>

#include "pssforge/expr.hpp"

namespace pssforge {

/// A radical modelled as a parameter symbol s with s^2 = square.
struct SideRelation {
  std::string symbol;
  Expr square;
};

/// Linear ODE for a single-argument formal function:
/// f^(order) = sum_j coefficients[j] * f^(j), j < order.
struct OdeRule {
  std::string function;
  int order = 0;
  std::vector<Expr> coefficients;
};

/// Explicit reduction context passed to every normalizing operation. There
/// is no global registry: two threads may use different contexts freely.
class Context {
 public:
  Context() = default;

  /// Registers s^2 -> square. The square must not mention s itself or any
  /// other side-relation symbol.
  void add_side_relation(std::string symbol, Expr square);
  /// Registers an ODE rule in coefficient form.
  void add_ode_rule(OdeRule rule);

  const std::vector<SideRelation>& side_relations() const { return side_; }
  const std::vector<OdeRule>& ode_rules() const { return ode_; }
  const SideRelation* side_relation(std::string_view symbol) const;
  const OdeRule* ode_rule(std::string_view function) const;

  int max_jet_order() const { return max_jet_order_; }
  void set_max_jet_order(int order);

  /// Union of both contexts; duplicate symbols must agree structurally.
  void merge(const Context& other);

 private:
  std::vector<SideRelation> side_;
  std::vector<OdeRule> ode_;
  int max_jet_order_ = 8;
};

}  // namespace pssforge
