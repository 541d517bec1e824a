#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "sketchmap/ir.hpp"
#include "sketchmap/primitives.hpp"

namespace sketchmap {

/// Port-value expression: a name, `(bv v w)`, `(concat e...)` (first operand
/// most significant), `(extract hi lo e)` or `(zext k e)`.
struct ArchExpr {
  enum class Kind { Name, Literal, Concat, Extract, ZeroExtend };
  Kind kind = Kind::Name;
  std::string name;
  BitVec value;
  std::uint32_t hi = 0;  // extract high bit, or extension amount
  std::uint32_t lo = 0;
  std::vector<ArchExpr> args;

  std::string to_string() const;
};

ArchExpr parse_arch_expr(std::string_view text);

struct ModuleSource {
  enum class Kind { Builtin, Btor2 };
  Kind kind = Kind::Builtin;
  /// Built-in model name, or the btor2 path resolved against the description's directory.
  std::string name;
};

struct ModulePortDecl {
  std::string name;
  PortDirection direction = PortDirection::Input;
  std::uint32_t width = 1;
  std::optional<ArchExpr> value;  // inputs only
};

struct ModuleParameterDecl {
  std::string name;
  ArchExpr value;
};

/// How one interface is realized by a concrete module.
struct InterfaceImpl {
  PrimitiveInterface interface;
  std::map<std::string, std::uint32_t> internal_data;
  std::string module_name;
  ModuleSource source;
  std::vector<ModulePortDecl> ports;
  std::vector<ModuleParameterDecl> parameters;
  /// Interface output -> module output port.
  std::map<std::string, std::string> outputs;
  /// Width-1 expressions over internal_data names that every assignment must satisfy.
  std::vector<ArchExpr> constraints;
};

struct ArchDescription {
  std::vector<InterfaceImpl> implementations;

  const InterfaceImpl* find(const PrimitiveInterface& iface) const;
  /// Parameter values of the implemented interfaces of `kind`, ascending.
  std::vector<std::uint32_t> implemented_sizes(InterfaceKind kind) const;
};

/// Strict YAML reader: unknown keys, missing fields and bad values raise
/// SchemaError naming the offending path; unknown interface names raise
/// UnknownInterface. Relative btor2 paths resolve against `base_dir`.
ArchDescription parse_arch(std::string_view text, const std::string& base_dir = ".");
ArchDescription load_arch(const std::string& path);

/// Semantics of the module behind `impl`. Throws ModelLoadError.
PrimitiveModel load_impl_model(const InterfaceImpl& impl);

struct Instance {
  Id prim = 0;
  /// Interface output -> node carrying it.
  std::map<std::string, Id> outputs;
  std::vector<std::string> hole_labels;
};

/// Adds a Prim realizing `impl` to `b`, fed by `inputs` (interface input -> id).
/// Every internal_data entry becomes a fresh ConstantHole labelled
/// `prefix + name`, registered in `sketch` together with the declared constraints.
/// Throws ModelLoadError or WidthMismatch.
Instance instantiate(const InterfaceImpl& impl, const std::map<std::string, Id>& inputs, ProgBuilder& b,
                     const std::string& prefix, Sketch& sketch);

enum class LoweringRule { Direct, LutFromLarger, LutFromSmaller, MuxFromLuts, CarryFromLuts, CarryFromLarger, DspFromLarger };

std::string to_string(LoweringRule rule);

/// Tree of rewrite steps ending in implemented interfaces. `impl` points into
/// the description the plan was computed from, which must outlive the plan.
struct LoweringPlan {
  LoweringRule rule = LoweringRule::Direct;
  PrimitiveInterface target;
  const InterfaceImpl* impl = nullptr;
  std::vector<LoweringPlan> children;

  std::size_t depth() const;
  /// e.g. "LUT2 <- LutFromLarger(LUT4 <- Direct frac_lut4)".
  std::string describe() const;
};

/// Shallowest plan within `max_depth` rule applications. Throws NoImplementation.
LoweringPlan lower_interface(const PrimitiveInterface& requested, const ArchDescription& desc, unsigned max_depth = 3);

/// Builds the nodes of `plan` fed by `inputs`; returns interface output -> node.
std::map<std::string, Id> realize(const LoweringPlan& plan, const std::map<std::string, Id>& inputs, ProgBuilder& b,
                                  const std::string& prefix, Sketch& sketch);

}  // namespace sketchmap
