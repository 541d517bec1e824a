#include "sketchmap/primitives.hpp"

#include <algorithm>
#include <cctype>

#include "sketchmap/errors.hpp"

namespace sketchmap {

std::string to_string(InterfaceKind kind) {
  switch (kind) {
    case InterfaceKind::LUT: return "LUT";
    case InterfaceKind::CARRY: return "CARRY";
    case InterfaceKind::MUX: return "MUX";
    case InterfaceKind::DSP: return "DSP";
  }
  return "?";
}

InterfaceKind interface_kind_from_name(const std::string& name) {
  if (name == "LUT") return InterfaceKind::LUT;
  if (name == "CARRY") return InterfaceKind::CARRY;
  if (name == "MUX") return InterfaceKind::MUX;
  if (name == "DSP") return InterfaceKind::DSP;
  throw UnknownInterface("unknown primitive interface " + name);
}

std::uint32_t PrimitiveInterface::param(const std::string& name) const {
  auto it = params.find(name);
  if (it == params.end()) throw Error(to_string(kind) + " interface has no parameter " + name);
  return it->second;
}

std::string PrimitiveInterface::label() const {
  switch (kind) {
    case InterfaceKind::LUT:
    case InterfaceKind::MUX:
      return to_string(kind) + std::to_string(param("num_inputs"));
    case InterfaceKind::CARRY:
    case InterfaceKind::DSP:
      return to_string(kind) + std::to_string(param("width"));
  }
  return "?";
}

namespace {

std::uint32_t log2_exact(std::uint32_t n) {
  std::uint32_t s = 0;
  while ((1u << s) < n) ++s;
  return s;
}

}  // namespace

PrimitiveInterface lut_interface(std::uint32_t n) {
  if (n < 1 || n > 6) throw Error("LUT interface needs 1 to 6 inputs");
  PrimitiveInterface i{InterfaceKind::LUT, {{"num_inputs", n}}, {}, {{"O", 1}}, false};
  for (std::uint32_t k = 0; k < n; ++k) i.inputs.push_back({"I" + std::to_string(k), 1});
  return i;
}

PrimitiveInterface carry_interface(std::uint32_t w) {
  if (w < 1 || w > 63) throw Error("CARRY interface needs a width from 1 to 63");
  return PrimitiveInterface{InterfaceKind::CARRY, {{"width", w}}, {{"DI", w}, {"S", w}, {"CI", 1}},
                            {{"O", w}, {"CO", 1}}, false};
}

PrimitiveInterface mux_interface(std::uint32_t n) {
  if (n != 2 && n != 4 && n != 8) throw Error("MUX interface needs 2, 4 or 8 inputs");
  PrimitiveInterface i{InterfaceKind::MUX, {{"num_inputs", n}}, {}, {{"O", 1}}, false};
  for (std::uint32_t k = 0; k < n; ++k) i.inputs.push_back({"I" + std::to_string(k), 1});
  for (std::uint32_t k = 0; k < log2_exact(n); ++k) i.inputs.push_back({"S" + std::to_string(k), 1});
  return i;
}

PrimitiveInterface dsp_interface(std::uint32_t w) {
  if (w < 1 || w > 32) throw Error("DSP interface needs a width from 1 to 32");
  return PrimitiveInterface{InterfaceKind::DSP, {{"width", w}}, {{"A", w}, {"B", w}, {"C", w}, {"D", w}},
                            {{"out", w}}, true};
}

PrimitiveInterface make_interface(InterfaceKind kind, const std::map<std::string, std::uint32_t>& params) {
  auto need = [&](const char* key) {
    auto it = params.find(key);
    if (it == params.end() || params.size() != 1) {
      throw Error(to_string(kind) + " interface takes exactly the parameter " + key);
    }
    return it->second;
  };
  switch (kind) {
    case InterfaceKind::LUT: return lut_interface(need("num_inputs"));
    case InterfaceKind::MUX: return mux_interface(need("num_inputs"));
    case InterfaceKind::CARRY: return carry_interface(need("width"));
    case InterfaceKind::DSP: return dsp_interface(need("width"));
  }
  throw UnknownInterface("unknown interface");
}

const ModelPort* PrimitiveModel::find_port(const std::string& n) const {
  auto it = std::find_if(ports.begin(), ports.end(), [&](const ModelPort& p) { return p.name == n; });
  return it == ports.end() ? nullptr : &*it;
}

const ModelPort& PrimitiveModel::port(const std::string& n) const {
  if (const auto* p = find_port(n)) return *p;
  throw Error("model " + name + " has no port " + n);
}

namespace {

Id bit_of(ProgBuilder& b, Id x, std::uint32_t i) { return b.op(Operator::extract(i, i), {x}); }

/// Value of a table `bits` (width 2^k or any width >= k) at position `index` (k bits wide).
Id table_lookup(ProgBuilder& b, Id table, std::uint32_t table_width, Id index, std::uint32_t index_width) {
  Id wide = index_width < table_width ? b.op(Operator::zero_extend(table_width - index_width), {index}) : index;
  Id shifted = b.op(OpKind::Lshr, {table, wide});
  return bit_of(b, shifted, 0);
}

/// {vars[n-1], ..., vars[0]}: the first variable lands in the least significant bit.
Id concat_lsb_first(ProgBuilder& b, const std::vector<Id>& vars) {
  if (vars.size() == 1) return vars[0];
  std::vector<Id> msb_first(vars.rbegin(), vars.rend());
  return b.op(OpKind::Concat, msb_first);
}

}  // namespace

PrimitiveModel lut_model(std::uint32_t n) {
  if (n < 1 || n > 6) throw Error("lut_model needs 1 to 6 inputs");
  IdAllocator ids;
  ProgBuilder b(ids);
  PrimitiveModel m;
  m.name = "lut" + std::to_string(n);
  std::vector<Id> in;
  for (std::uint32_t k = 0; k < n; ++k) {
    std::string port = "I" + std::to_string(k);
    m.ports.push_back({port, PortDirection::Input, 1});
    in.push_back(b.var(port, 1));
  }
  m.ports.push_back({"O", PortDirection::Output, 1});
  const std::uint32_t mem = 1u << n;
  m.internal_data["sram"] = mem;
  Id sram = b.var("sram", mem);
  Id root = table_lookup(b, sram, mem, concat_lsb_first(b, in), n);
  m.outputs = {"O"};
  m.semantics = b.build(root);
  m.implements = lut_interface(n);
  return m;
}

PrimitiveModel carry_model(std::uint32_t w) {
  if (w < 1 || w > 63) throw Error("carry_model needs a width from 1 to 63");
  IdAllocator ids;
  ProgBuilder b(ids);
  PrimitiveModel m;
  m.name = "carry" + std::to_string(w);
  m.ports = {{"DI", PortDirection::Input, w},
             {"S", PortDirection::Input, w},
             {"CI", PortDirection::Input, 1},
             {"O", PortDirection::Output, w},
             {"CO", PortDirection::Output, 1}};
  Id di = b.var("DI", w);
  Id s = b.var("S", w);
  Id c = b.var("CI", 1);
  std::vector<Id> sum;
  for (std::uint32_t i = 0; i < w; ++i) {
    Id si = bit_of(b, s, i);
    sum.push_back(b.op(OpKind::Xor, {si, c}));
    c = b.op(OpKind::Mux, {si, c, bit_of(b, di, i)});
  }
  Id o = concat_lsb_first(b, sum);
  Id root = b.op(OpKind::Concat, {c, o});
  m.outputs = {"O", "CO"};
  m.semantics = b.build(root);
  m.implements = carry_interface(w);
  return m;
}

PrimitiveModel mux_model(std::uint32_t n) {
  if (n != 2 && n != 4 && n != 8) throw Error("mux_model needs 2, 4 or 8 inputs");
  IdAllocator ids;
  ProgBuilder b(ids);
  PrimitiveModel m;
  m.name = "mux" + std::to_string(n);
  std::vector<Id> data;
  std::vector<Id> sel;
  for (std::uint32_t k = 0; k < n; ++k) {
    std::string port = "I" + std::to_string(k);
    m.ports.push_back({port, PortDirection::Input, 1});
    data.push_back(b.var(port, 1));
  }
  const std::uint32_t s = log2_exact(n);
  for (std::uint32_t k = 0; k < s; ++k) {
    std::string port = "S" + std::to_string(k);
    m.ports.push_back({port, PortDirection::Input, 1});
    sel.push_back(b.var(port, 1));
  }
  m.ports.push_back({"O", PortDirection::Output, 1});
  Id root = table_lookup(b, concat_lsb_first(b, data), n, concat_lsb_first(b, sel), s);
  m.outputs = {"O"};
  m.semantics = b.build(root);
  m.implements = mux_interface(n);
  return m;
}

PrimitiveModel minidsp_model(std::uint32_t w) {
  if (w < 4 || w > 18) throw Error("minidsp_model needs a width from 4 to 18");
  IdAllocator ids;
  ProgBuilder b(ids);
  PrimitiveModel m;
  m.name = "minidsp" + std::to_string(w);
  m.ports = {{"clk", PortDirection::Clock, 1},     {"A", PortDirection::Input, w}, {"B", PortDirection::Input, w},
             {"C", PortDirection::Input, w},       {"D", PortDirection::Input, w}, {"out", PortDirection::Output, w}};
  m.internal_data = {{"INREG", 1}, {"MREG", 1}, {"PREG", 1}, {"PREADD_EN", 1}, {"PREADD_SUB", 1}, {"ALUMODE", 3}};
  const BitVec zero = BitVec::zero(w);
  Id inreg = b.var("INREG", 1);
  Id mreg = b.var("MREG", 1);
  Id preg = b.var("PREG", 1);
  Id pre_en = b.var("PREADD_EN", 1);
  Id pre_sub = b.var("PREADD_SUB", 1);
  Id alumode = b.var("ALUMODE", 3);

  // Optional stage: always-present register, bypassed when the enable is 0.
  auto stage = [&](Id enable, Id x) { return b.op(OpKind::Mux, {enable, b.reg(x, zero), x}); };

  Id a = stage(inreg, b.var("A", w));
  Id bb = stage(inreg, b.var("B", w));
  Id c = stage(inreg, b.var("C", w));
  Id d = stage(inreg, b.var("D", w));

  Id pre = b.op(OpKind::Mux, {pre_en, b.op(OpKind::Mux, {pre_sub, b.op(OpKind::Sub, {a, d}), b.op(OpKind::Add, {a, d})}), a});
  Id prod = stage(mreg, b.op(OpKind::Mul, {pre, bb}));
  Id c2 = stage(mreg, c);

  const std::vector<Id> alu = {
      b.op(OpKind::Add, {prod, c2}), b.op(OpKind::Sub, {prod, c2}), b.op(OpKind::And, {prod, c2}),
      b.op(OpKind::Or, {prod, c2}),  b.op(OpKind::Xor, {prod, c2}), prod,
      b.op(OpKind::Sub, {c2, prod}), c2,
  };
  Id result = alu[7];
  for (std::uint32_t k = 7; k-- > 0;) {
    Id is_k = b.op(OpKind::Eq, {alumode, b.bv(BitVec(3, k))});
    result = b.op(OpKind::Mux, {is_k, alu[k], result});
  }
  Id root = stage(preg, result);
  m.outputs = {"out"};
  m.semantics = b.build(root);
  m.implements = dsp_interface(w);
  return m;
}

PrimitiveModel builtin_model(const std::string& name) {
  auto suffix = [&](const std::string& prefix) -> std::optional<std::uint32_t> {
    if (name.rfind(prefix, 0) != 0 || name.size() == prefix.size()) return std::nullopt;
    std::string digits = name.substr(prefix.size());
    if (!std::all_of(digits.begin(), digits.end(), [](unsigned char ch) { return std::isdigit(ch); })) {
      return std::nullopt;
    }
    if (digits.size() > 3) return std::nullopt;
    return static_cast<std::uint32_t>(std::stoul(digits));
  };
  try {
    if (auto n = suffix("lut")) return lut_model(*n);
    if (auto n = suffix("carry")) return carry_model(*n);
    if (auto n = suffix("mux")) return mux_model(*n);
    if (auto n = suffix("minidsp")) return minidsp_model(*n);
  } catch (const ModelLoadError&) {
    throw;
  } catch (const Error& e) {
    throw ModelLoadError("builtin model " + name + ": " + e.what());
  }
  throw ModelLoadError("no builtin model named " + name);
}

PrimitiveInterface interface_of(const PrimitiveModel& model) {
  if (!model.implements) throw Error("model " + model.name + " does not declare an interface");
  return *model.implements;
}

}  // namespace sketchmap
