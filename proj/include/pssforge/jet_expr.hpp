#pragma once

#include <cstddef>
#include <functional>
#include <map>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "pssforge/algebra.hpp"
#include "pssforge/context.hpp"
#include "pssforge/expr.hpp"

namespace pssforge {

class ParseError : public ExprError {
 public:
  ParseError(const std::string& message, std::size_t position);
  std::size_t position() const { return position_; }

 private:
  std::size_t position_;
};

/// Parses the ASCII expression grammar. Beyond single-argument atoms with
/// primes (h''(z)) it accepts multi-argument atoms psi(z,z1,z2) and
/// explicit multi-indices psi[0,1,0](z,z1,z2).
Expr parse(std::string_view text);

/// ASCII rendering accepted by parse().
std::string format(const Expr& e);
/// LaTeX rendering.
std::string to_latex(const Expr& e);

Expr normalize(const Expr& e, const Context& ctx = {});
Expr partial(const Expr& e, JetVar v, const Context& ctx = {});
Expr partial(const Expr& e, const Expr& symbol, const Context& ctx = {});
Expr total_dx(const Expr& e, const Context& ctx = {});
Expr total_dt(const Expr& e, const Context& ctx = {});

/// h(u1,...,un) := body written in the placeholder parameters.
struct FunctionBinding {
  std::string name;
  std::vector<std::string> params;
  Expr body;
};

struct Bindings {
  /// Keys are parameters, jet variables or atoms (matched after argument
  /// normalization).
  std::vector<std::pair<Expr, Expr>> symbols;
  std::vector<FunctionBinding> functions;

  Bindings& bind(const Expr& key, const Expr& value) {
    symbols.emplace_back(key, value);
    return *this;
  }
  Bindings& bind(const std::string& param, const Expr& value) { return bind(Expr::param(param), value); }
  Bindings& bind_function(std::string name, std::vector<std::string> params, const Expr& body) {
    functions.push_back({std::move(name), std::move(params), body});
    return *this;
  }
};

/// Simultaneous replacement followed by normalization. Throws on cyclic
/// bindings.
Expr substitute(const Expr& e, const Bindings& bindings, const Context& ctx = {});
RatFunc substitute(const Algebra& alg, const RatFunc& f, const Bindings& bindings);

class NumericError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Value of a formal function or one of its partial derivatives.
using NumericFunction = std::function<double(std::span<const double> args, std::span<const int> deriv)>;

/// Single-argument routine from value, first, second, ... derivative.
NumericFunction numeric_function(std::vector<std::function<double(double)>> derivatives);

struct NumericEnv {
  std::map<std::string, double> params;
  std::map<JetVar, double> jets;
  std::map<std::string, NumericFunction> functions;

  NumericEnv& set(const std::string& name, double v) {
    params[name] = v;
    return *this;
  }
  NumericEnv& set(JetVar v, double value) {
    jets[v] = value;
    return *this;
  }
};

double eval_numeric(const Expr& e, const NumericEnv& env);

/// Every parameter and jet variable mentioned, including inside atoms.
std::vector<Expr> free_symbols(const Expr& e);
/// Names of formal functions mentioned.
std::vector<std::string> function_names(const Expr& e);
bool contains_t_derivative(const Expr& e);

}  // namespace pssforge
