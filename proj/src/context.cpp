#include "pssforge/context.hpp"

#include <functional>

namespace pssforge {

namespace {

bool mentions_param(const Expr& e, const std::string& name) {
  if (e.kind() == NodeKind::Param) return e.name() == name;
  for (const auto& c : e.children())
    if (mentions_param(c, name)) return true;
  return false;
}

}  // namespace

void Context::add_side_relation(std::string symbol, Expr square) {
  if (symbol.empty()) throw ExprError("side relation needs a symbol name");
  for (const auto& s : side_) {
    if (mentions_param(square, s.symbol))
      throw ExprError("side relation for '" + symbol + "' mentions radical '" + s.symbol + "'");
    if (mentions_param(s.square, symbol))
      throw ExprError("side relation for '" + s.symbol + "' mentions radical '" + symbol + "'");
  }
  if (mentions_param(square, symbol))
    throw ExprError("side relation for '" + symbol + "' is self-referential");
  for (auto& s : side_) {
    if (s.symbol == symbol) {
      if (s.square != square) throw ExprError("conflicting side relation for '" + symbol + "'");
      return;
    }
  }
  side_.push_back({std::move(symbol), std::move(square)});
}

void Context::add_ode_rule(OdeRule rule) {
  if (rule.order < 1) throw ExprError("ODE rule order must be positive");
  if (static_cast<int>(rule.coefficients.size()) != rule.order)
    throw ExprError("ODE rule for '" + rule.function + "' needs one coefficient per lower order");
  for (const auto& r : ode_) {
    if (r.function == rule.function) {
      bool same = r.order == rule.order;
      for (std::size_t i = 0; same && i < r.coefficients.size(); ++i)
        same = r.coefficients[i] == rule.coefficients[i];
      if (!same) throw ExprError("conflicting ODE rule for '" + rule.function + "'");
      return;
    }
  }
  ode_.push_back(std::move(rule));
}

const SideRelation* Context::side_relation(std::string_view symbol) const {
  for (const auto& s : side_)
    if (s.symbol == symbol) return &s;
  return nullptr;
}

const OdeRule* Context::ode_rule(std::string_view function) const {
  for (const auto& r : ode_)
    if (r.function == function) return &r;
  return nullptr;
}

void Context::set_max_jet_order(int order) {
  if (order < 1) throw ExprError("max jet order must be positive");
  max_jet_order_ = order;
}

void Context::merge(const Context& other) {
  for (const auto& s : other.side_) add_side_relation(s.symbol, s.square);
  for (const auto& r : other.ode_) add_ode_rule(r);
  if (other.max_jet_order_ > max_jet_order_) max_jet_order_ = other.max_jet_order_;
}

}  // namespace pssforge
