#pragma once

// Small hand-built sketches used across tests, independent of the architecture layer.

#include <map>
#include <memory>
#include <string>

#include "sketchmap/ir.hpp"
#include "sketchmap/primitives.hpp"

namespace testsupport {

using namespace sketchmap;

/// Prim over a renumbered copy of `model`, binding each port/internal name to an id.
inline PrimNode prim_of(const PrimitiveModel& model, const std::map<std::string, Id>& binds, IdAllocator& ids) {
  PrimNode prim;
  prim.body = std::make_shared<Prog>(renumber(model.semantics, ids));
  prim.binds = binds;
  prim.meta.module_name = model.name;
  prim.meta.model_ref = "builtin:" + model.name;
  for (const auto& port : model.ports) {
    if (port.direction == PortDirection::Input && binds.count(port.name)) {
      prim.meta.port_bindings[port.name] = {port.name, PortDirection::Input, port.width};
    }
    if (port.direction == PortDirection::Output) prim.meta.outputs.push_back({port.name, port.width});
  }
  for (const auto& [name, width] : model.internal_data) {
    if (binds.count(name)) prim.meta.port_bindings[name] = {name, PortDirection::Parameter, width};
  }
  return prim;
}

/// Sketch: one LUT(n) whose inputs are 1-bit variables `names[i]` and whose memory is hole "sram".
inline Sketch single_lut_sketch(const std::vector<std::string>& names) {
  IdAllocator ids(1);
  ProgBuilder b(ids);
  std::map<std::string, Id> binds;
  for (std::size_t i = 0; i < names.size(); ++i) binds["I" + std::to_string(i)] = b.shared_var(names[i], 1);
  auto model = lut_model(static_cast<std::uint32_t>(names.size()));
  Id sram = b.add(HoleNode{"sram", ConstantHole{model.internal_data.at("sram")}});
  binds["sram"] = sram;
  Id prim = ids.fresh();
  b.set(prim, prim_of(model, binds, ids));
  Sketch s;
  s.psi = b.build(prim);
  s.holes["sram"] = ConstantHole{model.internal_data.at("sram")};
  return s;
}

/// Sketch over w-bit variables a and b where output bit i is a LUT2 of a[i] and b[i] only.
inline Sketch per_bit_lut2_sketch(std::uint32_t w) {
  IdAllocator ids(1);
  ProgBuilder b(ids);
  Id a = b.var("a", w);
  Id bb = b.var("b", w);
  auto model = lut_model(2);
  std::vector<Id> outs;
  Sketch s;
  for (std::uint32_t i = 0; i < w; ++i) {
    Id ai = b.op(Operator::extract(i, i), {a});
    Id bi = b.op(Operator::extract(i, i), {bb});
    std::string label = "sram" + std::to_string(i);
    Id h = b.add(HoleNode{label, ConstantHole{4}});
    s.holes[label] = ConstantHole{4};
    Id prim = ids.fresh();
    b.set(prim, prim_of(model, {{"I0", ai}, {"I1", bi}, {"sram", h}}, ids));
    outs.push_back(prim);
  }
  std::vector<Id> msb_first(outs.rbegin(), outs.rend());
  Id root = w == 1 ? outs[0] : b.op(OpKind::Concat, msb_first);
  s.psi = b.build(root);
  return s;
}

/// Copy of `p` where every constant hole is a variable named by its label, so
/// hole assignments can be supplied through an interpreter environment.
inline Prog holes_as_vars(const Prog& p) {
  Prog out = p;
  for (auto& [id, node] : out.nodes) {
    if (const auto* h = node.get_if<HoleNode>()) {
      node = VarNode{h->label, std::get<ConstantHole>(h->spec).width};
    }
  }
  return out;
}

/// op(a, b) over w-bit variables.
inline Prog binary_spec(OpKind op, std::uint32_t w) {
  IdAllocator ids(1);
  ProgBuilder b(ids);
  Id a = b.var("a", w);
  Id bb = b.var("b", w);
  return b.build(b.op(op, {a, bb}));
}

}  // namespace testsupport
