#include "sketchmap/arch.hpp"

#include <yaml-cpp/yaml.h>

#include <algorithm>
#include <filesystem>
#include <fstream>
#include <functional>
#include <set>
#include <sstream>

#include "sketchmap/btor2.hpp"
#include "sketchmap/errors.hpp"
#include "sketchmap/sexpr.hpp"
#include "sketchmap/well_formed.hpp"

namespace sketchmap {

// ---------------------------------------------------------------------------
// Expressions

namespace {

std::uint32_t parse_u32(const SExpr& e, const std::string& what) {
  if (!e.is_atom) throw ParseError(e.line, what + " must be a number");
  try {
    std::size_t used = 0;
    unsigned long v = std::stoul(e.atom, &used, 0);
    if (used != e.atom.size() || v > 0xffffffffUL) throw std::invalid_argument("range");
    return static_cast<std::uint32_t>(v);
  } catch (const std::logic_error&) {
    throw ParseError(e.line, what + " must be a number, got '" + e.atom + "'");
  }
}

ArchExpr expr_from_sexpr(const SExpr& e) {
  ArchExpr out;
  if (e.is_atom) {
    out.kind = ArchExpr::Kind::Name;
    out.name = e.atom;
    return out;
  }
  if (e.items.empty() || !e.items[0].is_atom) throw ParseError(e.line, "expected an operator");
  const std::string& head = e.items[0].atom;
  const auto n = e.items.size();
  if (head == "bv") {
    if (n != 3) throw ParseError(e.line, "(bv value width) takes two arguments");
    out.kind = ArchExpr::Kind::Literal;
    std::uint32_t w = parse_u32(e.items[2], "bv width");
    if (w == 0 || w > BitVec::kMaxWidth) throw ParseError(e.line, "bv width out of range");
    const std::string& v = e.items[1].atom;
    std::uint64_t value = 0;
    try {
      std::size_t used = 0;
      value = std::stoull(v, &used, 0);
      if (used != v.size()) throw std::invalid_argument("trailing");
    } catch (const std::logic_error&) {
      throw ParseError(e.line, "bad bv value '" + v + "'");
    }
    if (w < 64 && value >> w) throw ParseError(e.line, "bv value does not fit in width");
    out.value = BitVec(w, value);
  } else if (head == "concat") {
    if (n < 2) throw ParseError(e.line, "concat needs operands");
    out.kind = ArchExpr::Kind::Concat;
    for (std::size_t i = 1; i < n; ++i) out.args.push_back(expr_from_sexpr(e.items[i]));
  } else if (head == "extract") {
    if (n != 4) throw ParseError(e.line, "(extract hi lo e) takes three arguments");
    out.kind = ArchExpr::Kind::Extract;
    out.hi = parse_u32(e.items[1], "extract hi");
    out.lo = parse_u32(e.items[2], "extract lo");
    out.args.push_back(expr_from_sexpr(e.items[3]));
  } else if (head == "zext") {
    if (n != 3) throw ParseError(e.line, "(zext k e) takes two arguments");
    out.kind = ArchExpr::Kind::ZeroExtend;
    out.hi = parse_u32(e.items[1], "zext amount");
    out.args.push_back(expr_from_sexpr(e.items[2]));
  } else {
    throw ParseError(e.line, "unknown expression operator '" + head + "'");
  }
  return out;
}

void collect_names(const ArchExpr& e, std::set<std::string>& out) {
  if (e.kind == ArchExpr::Kind::Name) out.insert(e.name);
  for (const auto& a : e.args) collect_names(a, out);
}

/// (node, width) of `e` built into `b`; names resolve through `lookup`.
std::pair<Id, std::uint32_t> build_expr(const ArchExpr& e, ProgBuilder& b,
                                        const std::function<std::pair<Id, std::uint32_t>(const std::string&)>& lookup) {
  switch (e.kind) {
    case ArchExpr::Kind::Name:
      return lookup(e.name);
    case ArchExpr::Kind::Literal:
      return {b.bv(e.value), e.value.width()};
    case ArchExpr::Kind::Concat: {
      if (e.args.size() == 1) return build_expr(e.args[0], b, lookup);
      std::vector<Id> ids;
      std::uint32_t w = 0;
      for (const auto& a : e.args) {
        auto [id, aw] = build_expr(a, b, lookup);
        ids.push_back(id);
        w += aw;
      }
      if (w > BitVec::kMaxWidth) throw WidthMismatch("concat wider than 64 bits in " + e.to_string());
      return {b.op(OpKind::Concat, ids), w};
    }
    case ArchExpr::Kind::Extract: {
      auto [id, w] = build_expr(e.args[0], b, lookup);
      if (e.hi < e.lo || e.hi >= w) throw WidthMismatch("extract out of range in " + e.to_string());
      return {b.op(Operator::extract(e.hi, e.lo), {id}), e.hi - e.lo + 1};
    }
    case ArchExpr::Kind::ZeroExtend: {
      auto [id, w] = build_expr(e.args[0], b, lookup);
      if (e.hi == 0) return {id, w};
      if (w + e.hi > BitVec::kMaxWidth) throw WidthMismatch("zext wider than 64 bits in " + e.to_string());
      return {b.op(Operator::zero_extend(e.hi), {id}), w + e.hi};
    }
  }
  throw Error("unreachable expression kind");
}

}  // namespace

std::string ArchExpr::to_string() const {
  switch (kind) {
    case Kind::Name: return name;
    case Kind::Literal: return "(bv " + std::to_string(value.value()) + " " + std::to_string(value.width()) + ")";
    case Kind::Concat: {
      std::string s = "(concat";
      for (const auto& a : args) s += " " + a.to_string();
      return s + ")";
    }
    case Kind::Extract:
      return "(extract " + std::to_string(hi) + " " + std::to_string(lo) + " " + args[0].to_string() + ")";
    case Kind::ZeroExtend: return "(zext " + std::to_string(hi) + " " + args[0].to_string() + ")";
  }
  return "";
}

ArchExpr parse_arch_expr(std::string_view text) { return expr_from_sexpr(parse_sexpr(text)); }

// ---------------------------------------------------------------------------
// Description lookup

const InterfaceImpl* ArchDescription::find(const PrimitiveInterface& iface) const {
  for (const auto& impl : implementations) {
    if (impl.interface.kind == iface.kind && impl.interface.params == iface.params) return &impl;
  }
  return nullptr;
}

std::vector<std::uint32_t> ArchDescription::implemented_sizes(InterfaceKind kind) const {
  std::vector<std::uint32_t> out;
  for (const auto& impl : implementations) {
    if (impl.interface.kind != kind) continue;
    out.push_back(kind == InterfaceKind::LUT || kind == InterfaceKind::MUX ? impl.interface.param("num_inputs")
                                                                           : impl.interface.param("width"));
  }
  std::sort(out.begin(), out.end());
  return out;
}

// ---------------------------------------------------------------------------
// YAML reader

namespace {

class Reader {
 public:
  explicit Reader(std::string base_dir) : base_dir_(std::move(base_dir)) {}

  ArchDescription description(const YAML::Node& root) {
    const std::string path = "<root>";
    require_map(root, path);
    allow_keys(root, path, {"implementations"});
    const YAML::Node impls = need(root, "implementations", path);
    if (!impls.IsSequence()) throw SchemaError("implementations", "expected a list");
    ArchDescription desc;
    for (std::size_t i = 0; i < impls.size(); ++i) {
      std::string p = "implementations[" + std::to_string(i) + "]";
      InterfaceImpl impl = implementation(impls[i], p);
      if (desc.find(impl.interface)) {
        throw SchemaError(p, "duplicate implementation of " + impl.interface.label());
      }
      desc.implementations.push_back(std::move(impl));
    }
    return desc;
  }

 private:
  std::string base_dir_;

  static void require_map(const YAML::Node& n, const std::string& path) {
    if (!n.IsMap()) throw SchemaError(path, "expected a mapping");
  }

  static void allow_keys(const YAML::Node& n, const std::string& path, const std::set<std::string>& allowed) {
    for (const auto& kv : n) {
      auto key = kv.first.as<std::string>();
      if (!allowed.count(key)) throw SchemaError(path + "." + key, "unknown key");
    }
  }

  static YAML::Node need(const YAML::Node& n, const std::string& key, const std::string& path) {
    YAML::Node v = n[key];
    if (!v) throw SchemaError(path + "." + key, "missing required key");
    return v;
  }

  static std::string scalar(const YAML::Node& n, const std::string& path) {
    if (!n.IsScalar()) throw SchemaError(path, "expected a scalar");
    return n.as<std::string>();
  }

  static std::uint32_t positive(const YAML::Node& n, const std::string& path) {
    std::string s = scalar(n, path);
    try {
      std::size_t used = 0;
      unsigned long v = std::stoul(s, &used, 10);
      if (used != s.size() || v == 0 || v > 1u << 20) throw std::invalid_argument("range");
      return static_cast<std::uint32_t>(v);
    } catch (const std::logic_error&) {
      throw SchemaError(path, "expected a positive integer, got '" + s + "'");
    }
  }

  static ArchExpr expr(const YAML::Node& n, const std::string& path) {
    std::string text = scalar(n, path);
    try {
      return parse_arch_expr(text);
    } catch (const ParseError& e) {
      throw SchemaError(path, std::string("bad expression: ") + e.what());
    }
  }

  static PrimitiveInterface interface(const YAML::Node& n, const std::string& path) {
    require_map(n, path);
    std::string name = scalar(need(n, "name", path), path + ".name");
    InterfaceKind kind = interface_kind_from_name(name);
    std::map<std::string, std::uint32_t> params;
    auto add_params = [&](const YAML::Node& m, const std::string& p) {
      require_map(m, p);
      for (const auto& kv : m) {
        auto key = kv.first.as<std::string>();
        params[key] = positive(kv.second, p + "." + key);
      }
    };
    // Both `{name: LUT, num_inputs: 4}` and `{name: LUT, params: {num_inputs: 4}}`.
    for (const auto& kv : n) {
      auto key = kv.first.as<std::string>();
      if (key == "name") continue;
      if (key == "params") {
        add_params(kv.second, path + ".params");
      } else {
        params[key] = positive(kv.second, path + "." + key);
      }
    }
    const std::string expected = kind == InterfaceKind::LUT || kind == InterfaceKind::MUX ? "num_inputs" : "width";
    for (const auto& [k, v] : params) {
      if (k != expected) throw SchemaError(path + "." + k, "unknown parameter for " + name);
    }
    if (!params.count(expected)) throw SchemaError(path + "." + expected, "missing required parameter");
    try {
      return make_interface(kind, params);
    } catch (const UnknownInterface&) {
      throw;
    } catch (const Error& e) {
      throw SchemaError(path, e.what());
    }
  }

  InterfaceImpl implementation(const YAML::Node& n, const std::string& path) {
    require_map(n, path);
    allow_keys(n, path, {"interface", "internal_data", "modules", "outputs", "constraints"});
    InterfaceImpl impl;
    impl.interface = interface(need(n, "interface", path), path + ".interface");

    std::set<std::string> iface_inputs;
    for (const auto& in : impl.interface.inputs) iface_inputs.insert(in.name);

    if (YAML::Node data = n["internal_data"]) {
      require_map(data, path + ".internal_data");
      for (const auto& kv : data) {
        auto key = kv.first.as<std::string>();
        std::string p = path + ".internal_data." + key;
        if (iface_inputs.count(key)) throw SchemaError(p, "internal data name clashes with an interface input");
        std::uint32_t w = positive(kv.second, p);
        if (w > BitVec::kMaxWidth) throw SchemaError(p, "width above 64 is unsupported");
        impl.internal_data[key] = w;
      }
    }

    const YAML::Node modules = need(n, "modules", path);
    if (!modules.IsSequence() || modules.size() != 1) {
      throw SchemaError(path + ".modules", "expected a list with exactly one module");
    }
    module(modules[0], path + ".modules[0]", impl);

    auto known_name = [&](const std::string& name) {
      return iface_inputs.count(name) != 0 || impl.internal_data.count(name) != 0;
    };
    std::set<std::string> consumed;
    for (std::size_t i = 0; i < impl.ports.size(); ++i) {
      const auto& port = impl.ports[i];
      if (!port.value) continue;
      std::set<std::string> names;
      collect_names(*port.value, names);
      for (const auto& name : names) {
        if (!known_name(name)) {
          throw SchemaError(path + ".modules[0].ports[" + std::to_string(i) + "].value", "unknown name '" + name + "'");
        }
      }
      consumed.insert(names.begin(), names.end());
    }
    for (std::size_t i = 0; i < impl.parameters.size(); ++i) {
      std::set<std::string> names;
      collect_names(impl.parameters[i].value, names);
      for (const auto& name : names) {
        if (!impl.internal_data.count(name)) {
          throw SchemaError(path + ".modules[0].parameters[" + std::to_string(i) + "].value",
                            "unknown internal data '" + name + "'");
        }
      }
    }
    for (const auto& in : impl.interface.inputs) {
      if (!consumed.count(in.name)) {
        throw SchemaError(path + ".modules[0].ports", "interface input " + in.name + " is not consumed by any port");
      }
    }

    const YAML::Node outs = need(n, "outputs", path);
    require_map(outs, path + ".outputs");
    std::set<std::string> module_outputs;
    for (const auto& port : impl.ports) {
      if (port.direction == PortDirection::Output) module_outputs.insert(port.name);
    }
    for (const auto& kv : outs) {
      auto key = kv.first.as<std::string>();
      std::string p = path + ".outputs." + key;
      // `0` and `O` both name the primary output.
      if (key == "0" || key == "O") key = impl.interface.outputs.front().name;
      bool known = std::any_of(impl.interface.outputs.begin(), impl.interface.outputs.end(),
                               [&](const PortSignature& s) { return s.name == key; });
      if (!known) throw SchemaError(p, "not an output of " + impl.interface.label());
      if (impl.outputs.count(key)) throw SchemaError(p, "output mapped twice");
      std::string target = scalar(kv.second, p);
      if (!module_outputs.count(target)) throw SchemaError(p, "'" + target + "' is not an output port of the module");
      impl.outputs[key] = target;
    }
    for (const auto& o : impl.interface.outputs) {
      if (!impl.outputs.count(o.name)) throw SchemaError(path + ".outputs", "missing mapping for output " + o.name);
    }

    if (YAML::Node cs = n["constraints"]) {
      if (!cs.IsSequence()) throw SchemaError(path + ".constraints", "expected a list");
      for (std::size_t i = 0; i < cs.size(); ++i) {
        std::string p = path + ".constraints[" + std::to_string(i) + "]";
        ArchExpr c = expr(cs[i], p);
        std::set<std::string> names;
        collect_names(c, names);
        for (const auto& name : names) {
          if (!impl.internal_data.count(name)) throw SchemaError(p, "unknown internal data '" + name + "'");
        }
        impl.constraints.push_back(std::move(c));
      }
    }
    return impl;
  }

  void module(const YAML::Node& n, const std::string& path, InterfaceImpl& impl) {
    require_map(n, path);
    allow_keys(n, path, {"module_name", "filepath", "builtin", "ports", "parameters"});
    impl.module_name = scalar(need(n, "module_name", path), path + ".module_name");
    if (n["filepath"] && n["builtin"]) throw SchemaError(path, "give either filepath or builtin, not both");
    if (YAML::Node f = n["filepath"]) {
      std::filesystem::path file = scalar(f, path + ".filepath");
      if (file.is_relative()) file = std::filesystem::path(base_dir_) / file;
      impl.source = {ModuleSource::Kind::Btor2, file.lexically_normal().string()};
    } else if (YAML::Node bname = n["builtin"]) {
      impl.source = {ModuleSource::Kind::Builtin, scalar(bname, path + ".builtin")};
    } else {
      throw SchemaError(path, "missing model source (filepath or builtin)");
    }

    const YAML::Node ports = need(n, "ports", path);
    if (!ports.IsSequence()) throw SchemaError(path + ".ports", "expected a list");
    std::set<std::string> seen;
    for (std::size_t i = 0; i < ports.size(); ++i) {
      std::string p = path + ".ports[" + std::to_string(i) + "]";
      const YAML::Node& pn = ports[i];
      require_map(pn, p);
      allow_keys(pn, p, {"name", "direction", "width", "value"});
      ModulePortDecl port;
      port.name = scalar(need(pn, "name", p), p + ".name");
      if (!seen.insert(port.name).second) throw SchemaError(p + ".name", "duplicate port " + port.name);
      std::string dir = scalar(need(pn, "direction", p), p + ".direction");
      if (dir == "in" || dir == "input") {
        port.direction = PortDirection::Input;
      } else if (dir == "out" || dir == "output") {
        port.direction = PortDirection::Output;
      } else if (dir == "clock" || dir == "clk") {
        port.direction = PortDirection::Clock;
      } else {
        throw SchemaError(p + ".direction", "expected in, out or clock");
      }
      port.width = pn["width"] ? positive(pn["width"], p + ".width") : 1;
      if (YAML::Node v = pn["value"]) {
        if (port.direction != PortDirection::Input) throw SchemaError(p + ".value", "only input ports take a value");
        port.value = expr(v, p + ".value");
      } else if (port.direction == PortDirection::Input) {
        throw SchemaError(p + ".value", "missing required key");
      }
      if (port.direction == PortDirection::Clock && port.width != 1) throw SchemaError(p + ".width", "clock is 1 bit");
      impl.ports.push_back(std::move(port));
    }

    if (YAML::Node params = n["parameters"]) {
      if (!params.IsSequence()) throw SchemaError(path + ".parameters", "expected a list");
      for (std::size_t i = 0; i < params.size(); ++i) {
        std::string p = path + ".parameters[" + std::to_string(i) + "]";
        require_map(params[i], p);
        allow_keys(params[i], p, {"name", "value"});
        ModuleParameterDecl param;
        param.name = scalar(need(params[i], "name", p), p + ".name");
        if (!seen.insert(param.name).second) throw SchemaError(p + ".name", "duplicate name " + param.name);
        param.value = expr(need(params[i], "value", p), p + ".value");
        impl.parameters.push_back(std::move(param));
      }
    }
  }
};

}  // namespace

ArchDescription parse_arch(std::string_view text, const std::string& base_dir) {
  YAML::Node root;
  try {
    root = YAML::Load(std::string(text));
  } catch (const YAML::Exception& e) {
    throw SchemaError("<root>", std::string("invalid YAML: ") + e.what());
  }
  try {
    return Reader(base_dir).description(root);
  } catch (const YAML::Exception& e) {
    throw SchemaError("<root>", std::string("unexpected YAML structure: ") + e.what());
  }
}

ArchDescription load_arch(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw Error("cannot open architecture description " + path);
  std::stringstream ss;
  ss << in.rdbuf();
  return parse_arch(ss.str(), std::filesystem::path(path).parent_path().string());
}

// ---------------------------------------------------------------------------
// Instantiation

PrimitiveModel load_impl_model(const InterfaceImpl& impl) {
  if (impl.source.kind == ModuleSource::Kind::Builtin) return builtin_model(impl.source.name);
  try {
    return primitive_from_btor2(impl.source.name);
  } catch (const Error& e) {
    throw ModelLoadError("cannot load " + impl.source.name + ": " + e.what());
  }
}

Instance instantiate(const InterfaceImpl& impl, const std::map<std::string, Id>& inputs, ProgBuilder& b,
                     const std::string& prefix, Sketch& sketch) {
  PrimitiveModel model = load_impl_model(impl);
  const auto model_vars = free_var_widths(model.semantics);
  Instance inst;

  std::map<std::string, std::pair<Id, std::uint32_t>> names;
  for (const auto& in : impl.interface.inputs) {
    auto it = inputs.find(in.name);
    if (it == inputs.end()) throw Error("instantiate: interface input " + in.name + " is not connected");
    names[in.name] = {it->second, in.width};
  }
  for (const auto& [name, width] : impl.internal_data) {
    std::string label = prefix + name;
    if (sketch.holes.count(label)) throw Error("instantiate: hole label " + label + " already in use");
    sketch.holes[label] = ConstantHole{width};
    names[name] = {b.add(HoleNode{label, ConstantHole{width}}), width};
    inst.hole_labels.push_back(label);
  }
  auto lookup = [&](const std::string& name) -> std::pair<Id, std::uint32_t> {
    auto it = names.find(name);
    if (it == names.end()) throw Error("instantiate: unknown name " + name);
    return it->second;
  };

  PrimNode prim;
  prim.meta.module_name = impl.module_name;
  prim.meta.model_ref =
      (impl.source.kind == ModuleSource::Kind::Builtin ? "builtin:" : "btor2:") + impl.source.name;
  auto bind = [&](const std::string& var, const ArchExpr& value, PortDirection dir, std::optional<std::uint32_t> declared) {
    auto mv = model_vars.find(var);
    if (mv == model_vars.end()) throw ModelLoadError("model " + model.name + " has no input named " + var);
    auto [id, width] = build_expr(value, b, lookup);
    if (declared && *declared != width) {
      throw WidthMismatch("port " + var + " is declared " + std::to_string(*declared) + " bits but " +
                          value.to_string() + " is " + std::to_string(width) + " bits");
    }
    if (mv->second != width) {
      throw WidthMismatch("port " + var + " of " + model.name + " is " + std::to_string(mv->second) + " bits but " +
                          value.to_string() + " is " + std::to_string(width) + " bits");
    }
    prim.binds[var] = id;
    prim.meta.port_bindings[var] = {var, dir, width};
    if (dir == PortDirection::Parameter) {
      if (value.kind == ArchExpr::Kind::Name) {
        prim.meta.parameter_bindings[var] = prefix + value.name;
      } else if (value.kind == ArchExpr::Kind::Literal) {
        prim.meta.parameter_bindings[var] = value.value;
      }
    }
  };

  std::map<std::string, std::uint32_t> output_widths;
  for (const auto& port : impl.ports) {
    switch (port.direction) {
      case PortDirection::Input:
        bind(port.name, *port.value, PortDirection::Input, port.width);
        break;
      case PortDirection::Clock:
        prim.meta.clock_port = port.name;
        break;
      case PortDirection::Output:
        output_widths[port.name] = port.width;
        break;
      case PortDirection::Parameter:
        break;
    }
  }
  for (const auto& param : impl.parameters) bind(param.name, param.value, PortDirection::Parameter, std::nullopt);
  // Model inputs named like internal data are hole-backed parameters.
  for (const auto& [var, width] : model_vars) {
    if (prim.binds.count(var)) continue;
    if (impl.internal_data.count(var)) {
      ArchExpr e;
      e.name = var;
      bind(var, e, PortDirection::Parameter, std::nullopt);
    } else {
      throw ModelLoadError("input " + var + " of " + model.name + " is not bound by the description");
    }
  }

  // Module outputs in model order, first in the least significant bits.
  std::map<std::string, std::uint32_t> offset;
  std::uint32_t total = 0;
  for (const auto& name : model.outputs) {
    const auto* port = model.find_port(name);
    std::uint32_t w = port ? port->width : 0;
    auto declared = output_widths.find(name);
    if (declared != output_widths.end() && declared->second != w) {
      throw WidthMismatch("output " + name + " is declared " + std::to_string(declared->second) + " bits but " +
                          model.name + " drives " + std::to_string(w));
    }
    offset[name] = total;
    total += w;
    prim.meta.outputs.push_back({name, w});
  }
  for (const auto& [name, w] : output_widths) {
    if (!offset.count(name)) throw ModelLoadError("model " + model.name + " has no output named " + name);
  }

  prim.body = std::make_shared<Prog>(renumber(model.semantics, b.ids()));
  inst.prim = b.ids().fresh();
  b.set(inst.prim, std::move(prim));

  for (const auto& [iface_out, module_out] : impl.outputs) {
    std::uint32_t lo = offset.at(module_out);
    std::uint32_t w = 0;
    for (const auto& o : model.outputs) {
      if (o == module_out) w = model.find_port(o)->width;
    }
    std::uint32_t want = 0;
    for (const auto& s : impl.interface.outputs) {
      if (s.name == iface_out) want = s.width;
    }
    if (w != want) {
      throw WidthMismatch("interface output " + iface_out + " is " + std::to_string(want) + " bits but " + module_out +
                          " is " + std::to_string(w));
    }
    inst.outputs[iface_out] = w == total ? inst.prim : b.op(Operator::extract(lo + w - 1, lo), {inst.prim});
  }

  for (const auto& c : impl.constraints) {
    IdAllocator cids(1);
    ProgBuilder cb(cids);
    auto clookup = [&](const std::string& name) -> std::pair<Id, std::uint32_t> {
      std::uint32_t w = impl.internal_data.at(name);
      return {cb.shared_var(prefix + name, w), w};
    };
    auto [root, w] = build_expr(c, cb, clookup);
    if (w != 1) throw WidthMismatch("constraint " + c.to_string() + " is not 1 bit wide");
    sketch.constraints.push_back(cb.build(root));
  }
  return inst;
}

// ---------------------------------------------------------------------------
// Lowering

std::string to_string(LoweringRule rule) {
  switch (rule) {
    case LoweringRule::Direct: return "Direct";
    case LoweringRule::LutFromLarger: return "LutFromLarger";
    case LoweringRule::LutFromSmaller: return "LutFromSmaller";
    case LoweringRule::MuxFromLuts: return "MuxFromLuts";
    case LoweringRule::CarryFromLuts: return "CarryFromLuts";
    case LoweringRule::CarryFromLarger: return "CarryFromLarger";
    case LoweringRule::DspFromLarger: return "DspFromLarger";
  }
  return "?";
}

std::size_t LoweringPlan::depth() const {
  std::size_t d = 0;
  for (const auto& c : children) d = std::max(d, c.depth() + 1);
  return d;
}

std::string LoweringPlan::describe() const {
  std::string s = target.label() + " <- " + to_string(rule);
  if (rule == LoweringRule::Direct) return s + " " + impl->module_name;
  s += "(";
  for (std::size_t i = 0; i < children.size(); ++i) {
    if (i) s += ", ";
    s += children[i].describe();
  }
  return s + ")";
}

namespace {

std::optional<LoweringPlan> search(const PrimitiveInterface& req, const ArchDescription& desc, unsigned depth) {
  if (const InterfaceImpl* impl = desc.find(req)) return LoweringPlan{LoweringRule::Direct, req, impl, {}};
  if (depth == 0) return std::nullopt;
  auto plan = [&](LoweringRule rule, std::vector<PrimitiveInterface> needs) -> std::optional<LoweringPlan> {
    LoweringPlan p{rule, req, nullptr, {}};
    for (const auto& n : needs) {
      auto child = search(n, desc, depth - 1);
      if (!child) return std::nullopt;
      p.children.push_back(std::move(*child));
    }
    return p;
  };
  switch (req.kind) {
    case InterfaceKind::LUT: {
      const std::uint32_t n = req.param("num_inputs");
      for (std::uint32_t m : desc.implemented_sizes(InterfaceKind::LUT)) {
        if (m > n) {
          if (auto p = plan(LoweringRule::LutFromLarger, {lut_interface(m)})) return p;
        }
      }
      if (n >= 2) {
        if (auto p = plan(LoweringRule::LutFromSmaller, {lut_interface(n - 1), mux_interface(2)})) return p;
      }
      break;
    }
    case InterfaceKind::MUX: {
      if (auto p = plan(LoweringRule::MuxFromLuts, {lut_interface(3)})) return p;
      break;
    }
    case InterfaceKind::CARRY: {
      const std::uint32_t w = req.param("width");
      for (std::uint32_t big : desc.implemented_sizes(InterfaceKind::CARRY)) {
        if (big > w) {
          if (auto p = plan(LoweringRule::CarryFromLarger, {carry_interface(big)})) return p;
        }
      }
      if (auto p = plan(LoweringRule::CarryFromLuts, {lut_interface(3)})) return p;
      break;
    }
    case InterfaceKind::DSP: {
      const std::uint32_t w = req.param("width");
      for (std::uint32_t big : desc.implemented_sizes(InterfaceKind::DSP)) {
        if (big > w) {
          if (auto p = plan(LoweringRule::DspFromLarger, {dsp_interface(big)})) return p;
        }
      }
      break;
    }
  }
  return std::nullopt;
}

Id bit(ProgBuilder& b, Id x, std::uint32_t i) { return b.op(Operator::extract(i, i), {x}); }

Id concat_lsb_first(ProgBuilder& b, const std::vector<Id>& bits) {
  if (bits.size() == 1) return bits[0];
  return b.op(OpKind::Concat, std::vector<Id>(bits.rbegin(), bits.rend()));
}

}  // namespace

LoweringPlan lower_interface(const PrimitiveInterface& requested, const ArchDescription& desc, unsigned max_depth) {
  for (unsigned d = 0; d <= max_depth; ++d) {
    if (auto p = search(requested, desc, d)) return *p;
  }
  throw NoImplementation("no implementation of " + requested.label() + " within " + std::to_string(max_depth) +
                         " lowering steps");
}

std::map<std::string, Id> realize(const LoweringPlan& plan, const std::map<std::string, Id>& inputs, ProgBuilder& b,
                                  const std::string& prefix, Sketch& sketch) {
  switch (plan.rule) {
    case LoweringRule::Direct:
      return instantiate(*plan.impl, inputs, b, prefix, sketch).outputs;

    case LoweringRule::LutFromLarger: {
      const std::uint32_t n = plan.target.param("num_inputs");
      const std::uint32_t m = plan.children[0].target.param("num_inputs");
      std::map<std::string, Id> in;
      for (std::uint32_t k = 0; k < m; ++k) {
        std::string name = "I" + std::to_string(k);
        in[name] = k < n ? inputs.at(name) : b.bv(BitVec(1, 0));
      }
      return realize(plan.children[0], in, b, prefix, sketch);
    }

    case LoweringRule::LutFromSmaller: {
      const std::uint32_t n = plan.target.param("num_inputs");
      std::map<std::string, Id> in;
      for (std::uint32_t k = 0; k + 1 < n; ++k) in["I" + std::to_string(k)] = inputs.at("I" + std::to_string(k));
      Id lo = realize(plan.children[0], in, b, prefix + "lo_", sketch).at("O");
      Id hi = realize(plan.children[0], in, b, prefix + "hi_", sketch).at("O");
      std::map<std::string, Id> sel{{"I0", lo}, {"I1", hi}, {"S0", inputs.at("I" + std::to_string(n - 1))}};
      return {{"O", realize(plan.children[1], sel, b, prefix + "sel_", sketch).at("O")}};
    }

    case LoweringRule::MuxFromLuts: {
      const std::uint32_t n = plan.target.param("num_inputs");
      std::vector<Id> level;
      for (std::uint32_t k = 0; k < n; ++k) level.push_back(inputs.at("I" + std::to_string(k)));
      for (std::uint32_t s = 0; level.size() > 1; ++s) {
        std::vector<Id> next;
        for (std::size_t j = 0; j < level.size(); j += 2) {
          std::map<std::string, Id> in{{"I0", level[j]}, {"I1", level[j + 1]}, {"I2", inputs.at("S" + std::to_string(s))}};
          std::string p = prefix + "m" + std::to_string(s) + "_" + std::to_string(j / 2) + "_";
          next.push_back(realize(plan.children[0], in, b, p, sketch).at("O"));
        }
        level = std::move(next);
      }
      return {{"O", level[0]}};
    }

    case LoweringRule::CarryFromLuts: {
      const std::uint32_t w = plan.target.param("width");
      Id c = inputs.at("CI");
      std::vector<Id> sum;
      for (std::uint32_t i = 0; i < w; ++i) {
        std::map<std::string, Id> in{{"I0", bit(b, inputs.at("S"), i)}, {"I1", c}, {"I2", bit(b, inputs.at("DI"), i)}};
        std::string p = prefix + "b" + std::to_string(i) + "_";
        sum.push_back(realize(plan.children[0], in, b, p + "sum_", sketch).at("O"));
        c = realize(plan.children[0], in, b, p + "carry_", sketch).at("O");
      }
      return {{"O", concat_lsb_first(b, sum)}, {"CO", c}};
    }

    case LoweringRule::CarryFromLarger: {
      const std::uint32_t w = plan.target.param("width");
      const std::uint32_t big = plan.children[0].target.param("width");
      std::map<std::string, Id> in{{"DI", b.op(Operator::zero_extend(big - w), {inputs.at("DI")})},
                                   {"S", b.op(Operator::zero_extend(big - w), {inputs.at("S")})},
                                   {"CI", inputs.at("CI")}};
      Id o = realize(plan.children[0], in, b, prefix, sketch).at("O");
      // With the padding bits' S and DI at 0, bit w of the wide sum is the carry out of bit w-1.
      return {{"O", b.op(Operator::extract(w - 1, 0), {o})}, {"CO", bit(b, o, w)}};
    }

    case LoweringRule::DspFromLarger: {
      const std::uint32_t w = plan.target.param("width");
      const std::uint32_t big = plan.children[0].target.param("width");
      std::map<std::string, Id> in;
      for (const char* name : {"A", "B", "C", "D"}) in[name] = b.op(Operator::zero_extend(big - w), {inputs.at(name)});
      Id out = realize(plan.children[0], in, b, prefix, sketch).at("out");
      return {{"out", b.op(Operator::extract(w - 1, 0), {out})}};
    }
  }
  throw Error("unreachable lowering rule");
}

}  // namespace sketchmap
