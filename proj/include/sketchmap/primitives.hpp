#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "sketchmap/ir.hpp"

namespace sketchmap {

enum class InterfaceKind { LUT, CARRY, MUX, DSP };

std::string to_string(InterfaceKind kind);
/// "LUT", "CARRY", "MUX" or "DSP"; throws UnknownInterface otherwise.
InterfaceKind interface_kind_from_name(const std::string& name);

struct PortSignature {
  std::string name;
  std::uint32_t width = 1;
  friend bool operator==(const PortSignature&, const PortSignature&) = default;
};

/// Architecture-neutral signature of a class of primitives.
///
/// Parameters: LUT and MUX use `num_inputs`; CARRY and DSP use `width`.
struct PrimitiveInterface {
  InterfaceKind kind = InterfaceKind::LUT;
  std::map<std::string, std::uint32_t> params;
  std::vector<PortSignature> inputs;
  std::vector<PortSignature> outputs;
  bool clocked = false;

  std::uint32_t param(const std::string& name) const;
  /// e.g. "LUT4", "CARRY8", "MUX2", "DSP16".
  std::string label() const;
  friend bool operator==(const PrimitiveInterface&, const PrimitiveInterface&) = default;
};

PrimitiveInterface lut_interface(std::uint32_t num_inputs);
PrimitiveInterface carry_interface(std::uint32_t width);
PrimitiveInterface mux_interface(std::uint32_t num_inputs);
PrimitiveInterface dsp_interface(std::uint32_t width);
/// Interface from its name and parameter map; throws UnknownInterface or SchemaError-free Error on bad params.
PrimitiveInterface make_interface(InterfaceKind kind, const std::map<std::string, std::uint32_t>& params);

struct ModelPort {
  std::string name;
  PortDirection direction = PortDirection::Input;
  std::uint32_t width = 1;
};

/// A primitive's ports, configuration data and L_BEH semantics.
///
/// The semantics' free variables are the input ports and the internal data
/// names; its value is the concatenation of `outputs` with the first output in
/// the least significant bits. Clock ports have no variable: every register
/// in the semantics ticks with the implicit global clock.
struct PrimitiveModel {
  std::string name;
  std::vector<ModelPort> ports;
  std::map<std::string, std::uint32_t> internal_data;
  std::vector<std::string> outputs;
  Prog semantics;
  std::optional<PrimitiveInterface> implements;

  const ModelPort& port(const std::string& name) const;
  const ModelPort* find_port(const std::string& name) const;
};

/// n-input LUT (1 <= n <= 6): O = bit `index` of `sram`, index = {I(n-1), ..., I0}.
PrimitiveModel lut_model(std::uint32_t n);
/// Ripple carry chain: O_i = S_i ^ c_i, c_(i+1) = S_i ? c_i : DI_i, c_0 = CI, CO = c_w.
PrimitiveModel carry_model(std::uint32_t width);
/// n-way 1-bit mux (n in {2, 4, 8}) selected by S0.. (S0 least significant).
PrimitiveModel mux_model(std::uint32_t n);
/// Configurable pre-adder / multiplier / ALU block with three optional pipeline stages.
PrimitiveModel minidsp_model(std::uint32_t width);

/// Built-in model by name: lut1..lut6, carry<w>, mux2/mux4/mux8, minidsp<w>.
PrimitiveModel builtin_model(const std::string& name);

/// Interface a built-in model implements; throws Error for models without one.
PrimitiveInterface interface_of(const PrimitiveModel& model);

}  // namespace sketchmap
