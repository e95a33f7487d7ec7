#pragma once

#include <stdexcept>
#include <string>

#include <json.hpp>

#include "pssforge/families.hpp"

namespace pssforge {

using json = nlohmann::ordered_json;

/// Malformed or unexpected JSON input.
class FormatError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

json context_to_json(const Context& ctx);
/// Reads "side_relations" and "ode_rules" keys of `j` (both optional).
/// ODE rule rhs strings are written in fn^(j)(u), e.g. "-(r^2-delta)*phi(u)".
Context context_from_json(const json& j);

json coframe_to_json(const Coframe& c);
Coframe coframe_from_json(const json& j);

json equation_to_json(const EquationSpec& eq);
EquationSpec equation_from_json(const json& j);

json branch_spec_to_json(const BranchSpec& s);
BranchSpec branch_spec_from_json(const json& j);

json instance_to_json(const FamilyInstance& inst);

/// Parses text as JSON; FormatError carries the byte position.
json parse_json(const std::string& text);

}  // namespace pssforge
