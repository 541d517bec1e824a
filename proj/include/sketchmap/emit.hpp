#pragma once

#include <functional>
#include <optional>
#include <string>

#include "sketchmap/ir.hpp"
#include "sketchmap/primitives.hpp"

namespace sketchmap {

/// One module instantiating every reachable Prim, with wiring as continuous
/// assignments. Constants and variables are printed inline; every other node
/// gets a wire `n<id>`. The output port is `out`. Byte-identical for equal input.
/// Throws NotStructural for holes, registers, non-wiring ops, or a Prim
/// parameter that is not a constant.
std::string to_structural_verilog(const Prog& p, const std::string& module_name = "top");

/// Yosys-style JSON netlist: nets are bit indices from 2, constants "0"/"1",
/// bitvector parameters binary strings (most significant bit first).
/// Wiring ops disappear into the bit lists. Throws NotStructural.
std::string to_json_netlist(const Prog& p, const std::string& module_name = "top");

/// Semantics for a cell type; nullopt when unknown.
using ModelResolver = std::function<std::optional<PrimitiveModel>(const std::string& type, const std::string& model_ref)>;

/// Resolves the `model` cell attribute: "builtin:<name>" or "btor2:<path>".
std::optional<PrimitiveModel> resolve_model_ref(const std::string& type, const std::string& model_ref);

/// Inverse of to_json_netlist up to node renumbering and wiring shape.
/// Throws JsonSchemaError on malformed input or a cell whose semantics the resolver cannot supply.
Prog from_json_netlist(const std::string& text, const ModelResolver& resolve = resolve_model_ref);

/// True when both structural programs describe the same netlist: the same
/// multiset of instances (type, parameters) wired identically at bit level to
/// the same inputs, constants and output. Colors are refined until stable, so
/// feedback through clocked instances is handled.
bool netlists_isomorphic(const Prog& a, const Prog& b);

}  // namespace sketchmap
