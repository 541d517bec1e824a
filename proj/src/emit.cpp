#include "sketchmap/emit.hpp"

#include <algorithm>
#include <functional>
#include <iomanip>
#include <json.hpp>
#include <set>
#include <sstream>
#include <unordered_map>

#include "sketchmap/btor2.hpp"
#include "sketchmap/errors.hpp"
#include "sketchmap/well_formed.hpp"

namespace sketchmap {

namespace {

using json = nlohmann::ordered_json;

/// One bit of a structural program: a constant, a bit of a variable, or a bit of a Prim's value.
struct BitSrc {
  enum class Kind { Const, Var, Prim };
  Kind kind = Kind::Const;
  std::uint64_t value = 0;  // Const
  std::string var;          // Var
  Id prim = 0;              // Prim
  std::uint32_t index = 0;  // Var / Prim bit

  friend bool operator==(const BitSrc&, const BitSrc&) = default;
};

using Bits = std::vector<BitSrc>;  // least significant first

BitSrc const_bit(std::uint64_t v) {
  BitSrc b;
  b.value = v;
  return b;
}

/// Bit-level reading of a structural program.
class StructuralView {
 public:
  explicit StructuralView(const Prog& p) : p_(p), widths_(node_widths(p)) {
    std::vector<Id> stack{p.root};
    std::set<Id> seen;
    while (!stack.empty()) {
      Id id = stack.back();
      stack.pop_back();
      if (!seen.insert(id).second) continue;
      const Node& n = p.at(id);
      if (n.is<RegNode>()) throw NotStructural(id, "register n" + std::to_string(id) + " outside a primitive");
      if (n.is<HoleNode>()) throw NotStructural(id, "hole '" + n.as<HoleNode>().label + "' is not filled");
      if (const auto* op = n.get_if<OpNode>()) {
        if (!op->op.is_wiring()) throw NotStructural(id, "operator " + op->op.name() + " at n" + std::to_string(id));
      }
      if (const auto* prim = n.get_if<PrimNode>()) prims_.push_back(id), (void)prim;
      for (Id in : sketchmap::inputs(n)) stack.push_back(in);
    }
    std::sort(prims_.begin(), prims_.end());
    for (Id id : prims_) {
      const auto& prim = p.at(id).as<PrimNode>();
      for (const auto& [var, bound] : prim.binds) {
        if (direction(prim, var) == PortDirection::Parameter) {
          for (const auto& b : bits(bound)) {
            if (b.kind != BitSrc::Kind::Const) {
              throw NotStructural(id, "parameter " + port_name(prim, var) + " of n" + std::to_string(id) + " is not constant");
            }
          }
        }
      }
      if (prim.meta.clock_port) clocked_ = true;
    }
    for (const auto& [name, w] : free_var_widths(p)) {
      if (reachable_var(name)) inputs_.push_back({name, w});
    }
    out_name_ = unused_name("out");
    clk_name_ = unused_name("clk");
  }

  const Prog& prog() const { return p_; }
  const std::vector<Id>& prims() const { return prims_; }
  const std::vector<std::pair<std::string, std::uint32_t>>& inputs() const { return inputs_; }
  bool clocked() const { return clocked_; }
  const std::string& out_name() const { return out_name_; }
  const std::string& clk_name() const { return clk_name_; }
  std::uint32_t width(Id id) const { return widths_.at(id); }

  static PortDirection direction(const PrimNode& prim, const std::string& var) {
    auto it = prim.meta.port_bindings.find(var);
    return it == prim.meta.port_bindings.end() ? PortDirection::Input : it->second.direction;
  }
  static std::string port_name(const PrimNode& prim, const std::string& var) {
    auto it = prim.meta.port_bindings.find(var);
    return it == prim.meta.port_bindings.end() ? var : it->second.port;
  }

  const Bits& bits(Id id) const {
    auto hit = memo_.find(id);
    if (hit != memo_.end()) return hit->second;
    Bits out;
    const Node& n = p_.at(id);
    if (const auto* bv = n.get_if<BvNode>()) {
      for (std::uint32_t i = 0; i < bv->value.width(); ++i) out.push_back(const_bit((bv->value.value() >> i) & 1));
    } else if (const auto* v = n.get_if<VarNode>()) {
      for (std::uint32_t i = 0; i < v->width; ++i) out.push_back({BitSrc::Kind::Var, 0, v->name, 0, i});
    } else if (n.is<PrimNode>()) {
      for (std::uint32_t i = 0; i < widths_.at(id); ++i) out.push_back({BitSrc::Kind::Prim, 0, "", id, i});
    } else if (const auto* op = n.get_if<OpNode>()) {
      switch (op->op.kind) {
        case OpKind::Concat:
          for (auto it = op->args.rbegin(); it != op->args.rend(); ++it) {
            const Bits& part = bits(*it);
            out.insert(out.end(), part.begin(), part.end());
          }
          break;
        case OpKind::Extract: {
          const Bits& x = bits(op->args[0]);
          out.assign(x.begin() + op->op.lo, x.begin() + op->op.hi + 1);
          break;
        }
        case OpKind::ZeroExtend:
          out = bits(op->args[0]);
          out.resize(out.size() + op->op.hi, const_bit(0));
          break;
        case OpKind::SignExtend: {
          out = bits(op->args[0]);
          BitSrc msb = out.back();
          out.resize(out.size() + op->op.hi, msb);
          break;
        }
        default:
          throw NotStructural(id, "operator " + op->op.name());
      }
    } else {
      throw NotStructural(id, "node n" + std::to_string(id) + " is not structural");
    }
    return memo_.emplace(id, std::move(out)).first->second;
  }

  static BitVec const_value(const Bits& bs) {
    std::uint64_t v = 0;
    for (std::size_t i = 0; i < bs.size(); ++i) v |= bs[i].value << i;
    return BitVec(static_cast<std::uint32_t>(bs.size()), v);
  }

 private:
  const Prog& p_;
  std::map<Id, std::uint32_t> widths_;
  std::vector<Id> prims_;
  std::vector<std::pair<std::string, std::uint32_t>> inputs_;
  bool clocked_ = false;
  std::string out_name_;
  std::string clk_name_;
  mutable std::unordered_map<Id, Bits> memo_;

  bool reachable_var(const std::string& name) const {
    // free_var_widths lists every Var; unreachable ones are not ports.
    std::vector<Id> stack{p_.root};
    std::set<Id> seen;
    while (!stack.empty()) {
      Id id = stack.back();
      stack.pop_back();
      if (!seen.insert(id).second) continue;
      const Node& n = p_.at(id);
      if (const auto* v = n.get_if<VarNode>()) {
        if (v->name == name) return true;
      }
      for (Id in : sketchmap::inputs(n)) stack.push_back(in);
    }
    return false;
  }

  std::string unused_name(const std::string& base) const {
    std::string name = base;
    auto taken = [&](const std::string& n) {
      return std::any_of(inputs_.begin(), inputs_.end(), [&](const auto& in) { return in.first == n; });
    };
    while (taken(name)) name += "_";
    return name;
  }
};

// ---------------------------------------------------------------------------
// Verilog

const std::set<std::string>& verilog_keywords() {
  static const std::set<std::string> kw = {
      "always", "and", "assign", "begin", "buf", "case", "default", "else", "end", "endcase", "endmodule",
      "for", "function", "if", "initial", "inout", "input", "integer", "module", "nand", "negedge", "nor",
      "not", "or", "output", "parameter", "posedge", "reg", "wire", "xnor", "xor", "logic", "signed"};
  return kw;
}

std::string ident(const std::string& name) {
  bool plain = !name.empty() && (std::isalpha(static_cast<unsigned char>(name[0])) || name[0] == '_');
  for (char c : name) plain = plain && (std::isalnum(static_cast<unsigned char>(c)) || c == '_' || c == '$');
  if (plain && !verilog_keywords().count(name)) return name;
  return "\\" + name + " ";
}

std::string literal(const BitVec& v) {
  std::ostringstream os;
  os << v.width() << "'h" << std::hex << v.value();
  return os.str();
}

std::string range(std::uint32_t w) { return "[" + std::to_string(w - 1) + ":0]"; }

class VerilogWriter {
 public:
  explicit VerilogWriter(const StructuralView& view) : v_(view), p_(view.prog()) {}

  std::string write(const std::string& module_name) {
    collect_wires(p_.root);
    for (Id id : v_.prims()) {
      const auto& prim = p_.at(id).as<PrimNode>();
      for (const auto& [var, bound] : prim.binds) {
        if (StructuralView::direction(prim, var) != PortDirection::Parameter) collect_wires(bound);
      }
    }

    std::ostringstream os;
    os << "module " << ident(module_name) << " (\n";
    std::vector<std::string> ports;
    if (v_.clocked()) ports.push_back("  input " + ident(v_.clk_name()));
    for (const auto& [name, w] : v_.inputs()) ports.push_back("  input " + range(w) + " " + ident(name));
    ports.push_back("  output " + range(v_.width(p_.root)) + " " + ident(v_.out_name()));
    for (std::size_t i = 0; i < ports.size(); ++i) os << ports[i] << (i + 1 < ports.size() ? ",\n" : "\n");
    os << ");\n";

    for (Id id : wires_) os << "  wire " << range(v_.width(id)) << " n" << id << ";\n";
    for (Id id : wires_) {
      const Node& n = p_.at(id);
      if (const auto* op = n.get_if<OpNode>()) os << "  assign n" << id << " = " << wiring(*op) << ";\n";
    }
    for (Id id : v_.prims()) os << instance(id);
    os << "  assign " << ident(v_.out_name()) << " = " << ref(p_.root) << ";\n";
    os << "endmodule\n";
    return os.str();
  }

 private:
  const StructuralView& v_;
  const Prog& p_;
  std::set<Id> wires_;

  void collect_wires(Id id) {
    const Node& n = p_.at(id);
    if (n.is<BvNode>() || n.is<VarNode>()) return;
    if (!wires_.insert(id).second) return;
    if (const auto* op = n.get_if<OpNode>()) {
      for (Id a : op->args) collect_wires(a);
    }
  }

  std::string ref(Id id) const {
    const Node& n = p_.at(id);
    if (const auto* bv = n.get_if<BvNode>()) return literal(bv->value);
    if (const auto* var = n.get_if<VarNode>()) return ident(var->name);
    return "n" + std::to_string(id);
  }

  std::string wiring(const OpNode& op) const {
    switch (op.op.kind) {
      case OpKind::Concat: {
        std::string s = "{";
        for (std::size_t i = 0; i < op.args.size(); ++i) s += (i ? ", " : "") + ref(op.args[i]);
        return s + "}";
      }
      case OpKind::Extract:
        return ref(op.args[0]) + "[" + std::to_string(op.op.hi) + ":" + std::to_string(op.op.lo) + "]";
      case OpKind::ZeroExtend:
        return "{" + literal(BitVec::zero(op.op.hi)) + ", " + ref(op.args[0]) + "}";
      case OpKind::SignExtend: {
        std::string x = ref(op.args[0]);
        std::uint32_t msb = v_.width(op.args[0]) - 1;
        return "{{" + std::to_string(op.op.hi) + "{" + x + "[" + std::to_string(msb) + "]}}, " + x + "}";
      }
      default:
        return "";
    }
  }

  std::string instance(Id id) const {
    const auto& prim = p_.at(id).as<PrimNode>();
    std::vector<std::pair<std::string, std::string>> params;
    std::vector<std::pair<std::string, std::string>> conns;
    if (prim.meta.clock_port) conns.push_back({*prim.meta.clock_port, ident(v_.clk_name())});
    for (const auto& [var, bound] : prim.binds) {
      std::string port = StructuralView::port_name(prim, var);
      if (StructuralView::direction(prim, var) == PortDirection::Parameter) {
        params.push_back({port, literal(StructuralView::const_value(v_.bits(bound)))});
      } else {
        conns.push_back({port, ref(bound)});
      }
    }
    std::uint32_t lo = 0;
    const bool single = prim.meta.outputs.size() == 1;
    for (const auto& out : prim.meta.outputs) {
      std::string target = "n" + std::to_string(id);
      if (!single) target += "[" + std::to_string(lo + out.width - 1) + ":" + std::to_string(lo) + "]";
      conns.push_back({out.port, target});
      lo += out.width;
    }
    std::ostringstream os;
    os << "  " << ident(prim.meta.module_name);
    if (!params.empty()) {
      os << " #(\n";
      for (std::size_t i = 0; i < params.size(); ++i) {
        os << "    ." << ident(params[i].first) << "(" << params[i].second << ")" << (i + 1 < params.size() ? ",\n" : "\n");
      }
      os << "  )";
    }
    os << " u" << id << " (\n";
    for (std::size_t i = 0; i < conns.size(); ++i) {
      os << "    ." << ident(conns[i].first) << "(" << conns[i].second << ")" << (i + 1 < conns.size() ? ",\n" : "\n");
    }
    os << "  );\n";
    return os.str();
  }
};

// ---------------------------------------------------------------------------
// JSON

std::string binary_string(const BitVec& v) {
  std::string s;
  for (std::uint32_t i = v.width(); i-- > 0;) s += ((v.value() >> i) & 1) ? '1' : '0';
  return s;
}

}  // namespace

std::string to_structural_verilog(const Prog& p, const std::string& module_name) {
  StructuralView view(p);
  return VerilogWriter(view).write(module_name);
}

std::string to_json_netlist(const Prog& p, const std::string& module_name) {
  StructuralView view(p);
  int next_net = 2;
  std::map<std::pair<std::string, std::uint32_t>, int> var_net;
  std::map<std::pair<Id, std::uint32_t>, int> prim_net;
  int clk_net = 0;
  if (view.clocked()) clk_net = next_net++;
  for (const auto& [name, w] : view.inputs()) {
    for (std::uint32_t i = 0; i < w; ++i) var_net[{name, i}] = next_net++;
  }
  for (Id id : view.prims()) {
    for (std::uint32_t i = 0; i < view.width(id); ++i) prim_net[{id, i}] = next_net++;
  }
  auto nets = [&](const Bits& bs) {
    json arr = json::array();
    for (const auto& b : bs) {
      switch (b.kind) {
        case BitSrc::Kind::Const: arr.push_back(b.value ? "1" : "0"); break;
        case BitSrc::Kind::Var: arr.push_back(var_net.at({b.var, b.index})); break;
        case BitSrc::Kind::Prim: arr.push_back(prim_net.at({b.prim, b.index})); break;
      }
    }
    return arr;
  };

  json ports = json::object();
  json netnames = json::object();
  if (view.clocked()) {
    ports[view.clk_name()] = {{"direction", "input"}, {"bits", json::array({clk_net})}};
    netnames[view.clk_name()] = {{"hide_name", 0}, {"bits", json::array({clk_net})}, {"attributes", json::object()}};
  }
  for (const auto& [name, w] : view.inputs()) {
    json bits = json::array();
    for (std::uint32_t i = 0; i < w; ++i) bits.push_back(var_net.at({name, i}));
    ports[name] = {{"direction", "input"}, {"bits", bits}};
    netnames[name] = {{"hide_name", 0}, {"bits", bits}, {"attributes", json::object()}};
  }
  json out_bits = nets(view.bits(p.root));
  ports[view.out_name()] = {{"direction", "output"}, {"bits", out_bits}};
  netnames[view.out_name()] = {{"hide_name", 0}, {"bits", out_bits}, {"attributes", json::object()}};

  json cells = json::object();
  for (Id id : view.prims()) {
    const auto& prim = p.at(id).as<PrimNode>();
    json params = json::object();
    json dirs = json::object();
    json conns = json::object();
    if (prim.meta.clock_port) {
      dirs[*prim.meta.clock_port] = "input";
      conns[*prim.meta.clock_port] = json::array({clk_net});
    }
    for (const auto& [var, bound] : prim.binds) {
      std::string port = StructuralView::port_name(prim, var);
      if (StructuralView::direction(prim, var) == PortDirection::Parameter) {
        params[port] = binary_string(StructuralView::const_value(view.bits(bound)));
      } else {
        dirs[port] = "input";
        conns[port] = nets(view.bits(bound));
      }
    }
    std::uint32_t lo = 0;
    for (const auto& out : prim.meta.outputs) {
      json bits = json::array();
      for (std::uint32_t i = 0; i < out.width; ++i) bits.push_back(prim_net.at({id, lo + i}));
      dirs[out.port] = "output";
      conns[out.port] = bits;
      lo += out.width;
    }
    json bits = json::array();
    for (std::uint32_t i = 0; i < view.width(id); ++i) bits.push_back(prim_net.at({id, i}));
    netnames["n" + std::to_string(id)] = {{"hide_name", 0}, {"bits", bits}, {"attributes", json::object()}};
    json attrs = json::object();
    if (!prim.meta.model_ref.empty()) attrs["model"] = prim.meta.model_ref;
    cells["u" + std::to_string(id)] = {{"hide_name", 0},
                                       {"type", prim.meta.module_name},
                                       {"parameters", params},
                                       {"attributes", attrs},
                                       {"port_directions", dirs},
                                       {"connections", conns}};
  }

  json doc = {{"creator", "sketchmap"},
              {"modules",
               {{module_name,
                 {{"attributes", {{"top", "00000000000000000000000000000001"}}},
                  {"ports", ports},
                  {"cells", cells},
                  {"netnames", netnames}}}}}};
  return doc.dump(2) + "\n";
}

std::optional<PrimitiveModel> resolve_model_ref(const std::string& type, const std::string& model_ref) {
  (void)type;
  try {
    if (model_ref.rfind("builtin:", 0) == 0) return builtin_model(model_ref.substr(8));
    if (model_ref.rfind("btor2:", 0) == 0) return primitive_from_btor2(model_ref.substr(6));
  } catch (const Error&) {
    return std::nullopt;
  }
  return std::nullopt;
}

// ---------------------------------------------------------------------------
// JSON import

namespace {

[[noreturn]] void schema(const std::string& what) { throw JsonSchemaError(what); }

const json& field(const json& obj, const std::string& key, const std::string& where) {
  if (!obj.is_object()) schema(where + ": expected an object");
  auto it = obj.find(key);
  if (it == obj.end()) schema(where + ": missing '" + key + "'");
  return *it;
}

/// A net: an integer index, or the constant "0"/"1".
struct Net {
  bool constant = false;
  int index = 0;
  std::uint64_t value = 0;
};

std::vector<Net> read_bits(const json& arr, const std::string& where) {
  if (!arr.is_array()) schema(where + ": expected a bit list");
  std::vector<Net> out;
  for (const auto& b : arr) {
    if (b.is_number_integer()) {
      int v = b.get<int>();
      if (v < 2) schema(where + ": net indices start at 2");
      out.push_back({false, v, 0});
    } else if (b.is_string() && (b == "0" || b == "1")) {
      out.push_back({true, 0, b == "1" ? 1u : 0u});
    } else {
      schema(where + ": bits must be net indices or \"0\"/\"1\"");
    }
  }
  if (out.empty() || out.size() > BitVec::kMaxWidth) schema(where + ": bit list must hold 1 to 64 bits");
  return out;
}

}  // namespace

Prog from_json_netlist(const std::string& text, const ModelResolver& resolve) {
  json doc;
  try {
    doc = json::parse(text);
  } catch (const json::exception& e) {
    schema(std::string("invalid JSON: ") + e.what());
  }
  const json& modules = field(doc, "modules", "<root>");
  if (!modules.is_object() || modules.size() != 1) schema("modules: expected exactly one module");
  const std::string mod_name = modules.begin().key();
  const json& mod = modules.begin().value();
  const std::string where = "modules." + mod_name;
  const json& ports = field(mod, "ports", where);
  const json& cells = field(mod, "cells", where);
  if (!ports.is_object()) schema(where + ".ports: expected an object");
  if (!cells.is_object()) schema(where + ".cells: expected an object");

  IdAllocator ids(1);
  ProgBuilder b(ids);

  // Net -> (source node, bit) for every driven net.
  std::map<int, std::pair<Id, std::uint32_t>> driver;
  std::map<int, std::string> input_net_port;
  std::vector<std::pair<std::string, std::vector<Net>>> input_ports;
  std::optional<std::pair<std::string, std::vector<Net>>> output_port;
  for (const auto& [name, port] : ports.items()) {
    std::string pw = where + ".ports." + name;
    const json& dir = field(port, "direction", pw);
    auto bits = read_bits(field(port, "bits", pw), pw + ".bits");
    if (dir == "input") {
      for (const auto& n : bits) {
        if (n.constant) schema(pw + ": input bits must be nets");
        input_net_port[n.index] = name;
      }
      input_ports.push_back({name, bits});
    } else if (dir == "output") {
      if (output_port) schema(where + ".ports: more than one output");
      output_port = {name, bits};
    } else {
      schema(pw + ".direction: expected input or output");
    }
  }
  if (!output_port) schema(where + ".ports: no output port");

  struct CellInfo {
    std::string name;
    Id id;
    PrimitiveModel model;
    std::string model_ref;
    const json* cell;
  };
  std::vector<CellInfo> infos;
  std::set<int> clock_nets;
  for (const auto& [name, cell] : cells.items()) {
    std::string cw = where + ".cells." + name;
    const json& type = field(cell, "type", cw);
    if (!type.is_string()) schema(cw + ".type: expected a string");
    std::string model_ref;
    if (auto a = cell.find("attributes"); a != cell.end() && a->is_object()) {
      if (auto m = a->find("model"); m != a->end() && m->is_string()) model_ref = m->get<std::string>();
    }
    auto model = resolve(type.get<std::string>(), model_ref);
    if (!model) schema(cw + ": unknown cell type '" + type.get<std::string>() + "'");
    const json& conns = field(cell, "connections", cw);
    if (!conns.is_object()) schema(cw + ".connections: expected an object");
    for (const auto& port : model->ports) {
      if (port.direction == PortDirection::Clock) {
        auto it = conns.find(port.name);
        if (it != conns.end()) {
          for (const auto& n : read_bits(*it, cw + ".connections." + port.name)) {
            if (!n.constant) clock_nets.insert(n.index);
          }
        }
      }
    }
    infos.push_back({name, b.reserve(), std::move(*model), model_ref, &cell});
  }

  // Variables for input ports; a port only feeding clock pins is the implicit clock.
  for (const auto& [name, bits] : input_ports) {
    bool only_clock = std::all_of(bits.begin(), bits.end(), [&](const Net& n) { return clock_nets.count(n.index) != 0; });
    if (only_clock) continue;
    Id var = b.var(name, static_cast<std::uint32_t>(bits.size()));
    for (std::uint32_t i = 0; i < bits.size(); ++i) {
      if (!driver.emplace(bits[i].index, std::make_pair(var, i)).second) schema(where + ": net driven twice");
    }
  }

  std::map<Id, std::uint32_t> node_width;
  for (const auto& [name, bits] : input_ports) (void)name, (void)bits;
  for (auto& info : infos) {
    std::string cw = where + ".cells." + info.name;
    const json& conns = (*info.cell)["connections"];
    std::uint32_t lo = 0;
    for (const auto& out : info.model.outputs) {
      const auto* port = info.model.find_port(out);
      auto it = conns.find(out);
      if (it == conns.end()) schema(cw + ".connections: missing output " + out);
      auto bits = read_bits(*it, cw + ".connections." + out);
      if (bits.size() != port->width) schema(cw + ".connections." + out + ": width mismatch");
      for (std::uint32_t i = 0; i < bits.size(); ++i) {
        if (bits[i].constant) schema(cw + ".connections." + out + ": outputs must drive nets");
        if (!driver.emplace(bits[i].index, std::make_pair(info.id, lo + i)).second) schema(cw + ": net driven twice");
      }
      lo += port->width;
    }
    node_width[info.id] = lo;
  }

  // Runs of consecutive bits from one source become extracts; constant runs become literals.
  auto build = [&](const std::vector<Net>& bits, const std::string& w) -> Id {
    struct Run {
      bool constant;
      Id src;
      std::uint32_t lo, hi;
      std::uint64_t value;
    };
    std::vector<Run> runs;
    for (const auto& n : bits) {
      if (n.constant) {
        if (!runs.empty() && runs.back().constant && runs.back().hi - runs.back().lo + 1 < 64) {
          auto& r = runs.back();
          r.value |= n.value << (r.hi - r.lo + 1);
          ++r.hi;
        } else {
          runs.push_back({true, 0, 0, 0, n.value});
        }
        continue;
      }
      auto d = driver.find(n.index);
      if (d == driver.end()) schema(w + ": net " + std::to_string(n.index) + " has no driver");
      auto [src, bit] = d->second;
      if (!runs.empty() && !runs.back().constant && runs.back().src == src && runs.back().hi + 1 == bit) {
        ++runs.back().hi;
      } else {
        runs.push_back({false, src, bit, bit, 0});
      }
    }
    std::vector<Id> parts;  // least significant first
    for (const auto& r : runs) {
      if (r.constant) {
        parts.push_back(b.bv(BitVec(r.hi - r.lo + 1, r.value)));
        continue;
      }
      const Node* n = b.nodes().count(r.src) ? &b.nodes().at(r.src) : nullptr;
      std::uint32_t full = n && n->is<VarNode>() ? n->as<VarNode>().width : node_width.at(r.src);
      parts.push_back(r.lo == 0 && r.hi + 1 == full ? r.src : b.op(Operator::extract(r.hi, r.lo), {r.src}));
    }
    if (parts.size() == 1) return parts[0];
    return b.op(OpKind::Concat, std::vector<Id>(parts.rbegin(), parts.rend()));
  };

  for (auto& info : infos) {
    std::string cw = where + ".cells." + info.name;
    const json& cell = *info.cell;
    const json& conns = cell["connections"];
    const auto vars = free_var_widths(info.model.semantics);
    PrimNode prim;
    prim.meta.module_name = cell["type"].get<std::string>();
    prim.meta.model_ref = info.model_ref;
    std::set<std::string> outputs(info.model.outputs.begin(), info.model.outputs.end());
    for (const auto& [port, value] : conns.items()) {
      if (outputs.count(port)) continue;
      const auto* mp = info.model.find_port(port);
      if (mp && mp->direction == PortDirection::Clock) {
        prim.meta.clock_port = port;
        continue;
      }
      auto v = vars.find(port);
      if (v == vars.end()) schema(cw + ".connections." + port + ": not an input of the model");
      auto bits = read_bits(value, cw + ".connections." + port);
      if (bits.size() != v->second) schema(cw + ".connections." + port + ": width mismatch");
      prim.binds[port] = build(bits, cw + ".connections." + port);
      prim.meta.port_bindings[port] = {port, PortDirection::Input, v->second};
    }
    if (auto ps = cell.find("parameters"); ps != cell.end()) {
      if (!ps->is_object()) schema(cw + ".parameters: expected an object");
      for (const auto& [param, value] : ps->items()) {
        std::string pw = cw + ".parameters." + param;
        auto v = vars.find(param);
        if (v == vars.end()) schema(pw + ": not a parameter of the model");
        if (!value.is_string()) schema(pw + ": expected a binary string");
        std::string s = value.get<std::string>();
        if (s.size() != v->second || s.find_first_not_of("01") != std::string::npos) {
          schema(pw + ": expected " + std::to_string(v->second) + " binary digits");
        }
        BitVec bv(v->second, std::stoull(s, nullptr, 2));
        prim.binds[param] = b.bv(bv);
        prim.meta.port_bindings[param] = {param, PortDirection::Parameter, v->second};
        prim.meta.parameter_bindings[param] = bv;
      }
    }
    for (const auto& [var, w] : vars) {
      if (!prim.binds.count(var)) schema(cw + ": model input " + var + " is not connected");
    }
    for (const auto& out : info.model.outputs) prim.meta.outputs.push_back({out, info.model.find_port(out)->width});
    prim.body = std::make_shared<Prog>(renumber(info.model.semantics, ids));
    b.set(info.id, std::move(prim));
  }

  Id root = build(output_port->second, where + ".ports." + output_port->first);
  Prog p = b.build(root);
  // Keep only what the output reaches.
  Prog pruned{p.root, {}};
  std::vector<Id> stack{p.root};
  while (!stack.empty()) {
    Id id = stack.back();
    stack.pop_back();
    if (pruned.nodes.count(id)) continue;
    pruned.nodes.emplace(id, p.at(id));
    for (Id in : inputs(p.at(id))) stack.push_back(in);
  }
  try {
    check_well_formed(pruned);
  } catch (const Error& e) {
    schema(std::string("netlist does not form a well-formed program: ") + e.what());
  }
  return pruned;
}

// ---------------------------------------------------------------------------
// Isomorphism

namespace {

std::uint64_t mix(std::uint64_t h, std::uint64_t v) {
  // splitmix64 finalizer over the combined value.
  std::uint64_t x = h ^ (v + 0x9e3779b97f4a7c15ULL + (h << 6) + (h >> 2));
  x ^= x >> 30;
  x *= 0xbf58476d1ce4e5b9ULL;
  x ^= x >> 27;
  x *= 0x94d049bb133111ebULL;
  x ^= x >> 31;
  return x;
}

std::uint64_t mix(std::uint64_t h, const std::string& s) { return mix(h, std::hash<std::string>{}(s)); }

struct Coloring {
  std::vector<std::uint64_t> prim_colors;  // sorted
  std::uint64_t output = 0;
  std::vector<std::pair<std::string, std::uint32_t>> inputs;
  bool clocked = false;
};

Coloring color(const StructuralView& v, std::size_t rounds) {
  const Prog& p = v.prog();
  std::map<Id, std::uint64_t> c;
  for (Id id : v.prims()) {
    const auto& prim = p.at(id).as<PrimNode>();
    std::uint64_t h = mix(0, prim.meta.module_name);
    for (const auto& [var, bound] : prim.binds) {
      if (StructuralView::direction(prim, var) == PortDirection::Parameter) {
        h = mix(mix(h, StructuralView::port_name(prim, var)), StructuralView::const_value(v.bits(bound)).value());
      }
    }
    h = mix(h, prim.meta.clock_port.value_or(""));
    c[id] = h;
  }
  auto bit_hash = [&](const BitSrc& b) {
    switch (b.kind) {
      case BitSrc::Kind::Const: return mix(1, b.value);
      case BitSrc::Kind::Var: return mix(mix(2, b.var), b.index);
      case BitSrc::Kind::Prim: return mix(mix(3, c.at(b.prim)), b.index);
    }
    return std::uint64_t{0};
  };
  for (std::size_t r = 0; r < rounds; ++r) {
    std::map<Id, std::uint64_t> next;
    for (Id id : v.prims()) {
      const auto& prim = p.at(id).as<PrimNode>();
      std::uint64_t h = c.at(id);
      for (const auto& [var, bound] : prim.binds) {
        if (StructuralView::direction(prim, var) == PortDirection::Parameter) continue;
        h = mix(h, StructuralView::port_name(prim, var));
        for (const auto& b : v.bits(bound)) h = mix(h, bit_hash(b));
      }
      next[id] = h;
    }
    c = std::move(next);
  }
  Coloring out;
  for (const auto& [id, h] : c) out.prim_colors.push_back(h);
  std::sort(out.prim_colors.begin(), out.prim_colors.end());
  for (const auto& b : v.bits(p.root)) out.output = mix(out.output, bit_hash(b));
  out.inputs = v.inputs();
  out.clocked = v.clocked();
  return out;
}

}  // namespace

bool netlists_isomorphic(const Prog& a, const Prog& b) {
  StructuralView va(a);
  StructuralView vb(b);
  if (va.prims().size() != vb.prims().size()) return false;
  // Enough rounds for colors to encode every path through the instance graph.
  const std::size_t rounds = va.prims().size() + 1;
  Coloring ca = color(va, rounds);
  Coloring cb = color(vb, rounds);
  return ca.prim_colors == cb.prim_colors && ca.output == cb.output && ca.inputs == cb.inputs &&
         ca.clocked == cb.clocked;
}

}  // namespace sketchmap
