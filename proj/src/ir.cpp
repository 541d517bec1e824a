#include "sketchmap/ir.hpp"

#include <algorithm>
#include <sstream>

#include "sketchmap/errors.hpp"
#include "sketchmap/well_formed.hpp"

namespace sketchmap {

bool operator==(const ChoiceHole& a, const ChoiceHole& b) { return a.alternatives == b.alternatives; }

bool operator==(const PrimNode& a, const PrimNode& b) {
  return a.binds == b.binds && a.body == b.body && a.meta == b.meta;
}

const Node& Prog::at(Id id) const {
  auto it = nodes.find(id);
  if (it == nodes.end()) throw Error("no node with id " + std::to_string(id));
  return it->second;
}

Id ProgBuilder::add(Node node) {
  Id id = ids_->fresh();
  nodes_.emplace(id, std::move(node));
  return id;
}

void ProgBuilder::set(Id id, Node node) { nodes_.insert_or_assign(id, std::move(node)); }

Id ProgBuilder::shared_var(const std::string& name, std::uint32_t width) {
  auto it = vars_.find(name);
  if (it != vars_.end()) return it->second;
  Id id = var(name, width);
  vars_.emplace(name, id);
  return id;
}

std::set<Id> inputs(const Node& node) {
  std::set<Id> out;
  if (const auto* op = node.get_if<OpNode>()) {
    out.insert(op->args.begin(), op->args.end());
  } else if (const auto* reg = node.get_if<RegNode>()) {
    out.insert(reg->data);
  } else if (const auto* prim = node.get_if<PrimNode>()) {
    for (const auto& [name, id] : prim->binds) out.insert(id);
  }
  return out;
}

std::set<std::string> free_vars(const Prog& p) {
  std::set<std::string> out;
  for (const auto& [id, node] : p.nodes) {
    if (const auto* v = node.get_if<VarNode>()) out.insert(v->name);
  }
  return out;
}

std::map<std::string, std::uint32_t> free_var_widths(const Prog& p) {
  std::map<std::string, std::uint32_t> out;
  for (const auto& [id, node] : p.nodes) {
    if (const auto* v = node.get_if<VarNode>()) {
      auto [it, inserted] = out.emplace(v->name, v->width);
      if (!inserted && it->second != v->width) {
        throw WidthError("variable " + v->name + " used at widths " + std::to_string(it->second) + " and " +
                         std::to_string(v->width));
      }
    }
  }
  return out;
}

namespace {

Id remap(const std::map<Id, Id>& m, Id id) {
  auto it = m.find(id);
  // Dangling references are preserved so the W3 check still reports them.
  return it == m.end() ? id : it->second;
}

Node remap_node(const Node& node, const std::map<Id, Id>& m, IdAllocator& ids);

Prog renumber_impl(const Prog& p, IdAllocator& ids) {
  std::map<Id, Id> m;
  for (const auto& [id, node] : p.nodes) m.emplace(id, ids.fresh());
  Prog out;
  out.root = remap(m, p.root);
  for (const auto& [id, node] : p.nodes) out.nodes.emplace(m.at(id), remap_node(node, m, ids));
  return out;
}

Node remap_node(const Node& node, const std::map<Id, Id>& m, IdAllocator& ids) {
  if (const auto* op = node.get_if<OpNode>()) {
    OpNode copy = *op;
    for (auto& a : copy.args) a = remap(m, a);
    return copy;
  }
  if (const auto* reg = node.get_if<RegNode>()) {
    return RegNode{remap(m, reg->data), reg->init};
  }
  if (const auto* prim = node.get_if<PrimNode>()) {
    PrimNode copy = *prim;
    for (auto& [name, id] : copy.binds) id = remap(m, id);
    if (prim->body) copy.body = std::make_shared<const Prog>(renumber_impl(*prim->body, ids));
    return copy;
  }
  if (const auto* hole = node.get_if<HoleNode>()) {
    HoleNode copy = *hole;
    if (auto* choice = std::get_if<ChoiceHole>(&copy.spec)) {
      for (auto& alt : choice->alternatives) alt = remap_node(alt, m, ids);
    }
    return copy;
  }
  return node;
}

void collect_ids(const Prog& p, std::vector<Id>& out) {
  for (const auto& [id, node] : p.nodes) {
    out.push_back(id);
    if (const auto* prim = node.get_if<PrimNode>(); prim && prim->body) collect_ids(*prim->body, out);
  }
}

void check_in_domain(const std::string& label, const HoleSpec& spec, const Node& assigned) {
  if (const auto* c = std::get_if<ConstantHole>(&spec)) {
    const auto* bv = assigned.get_if<BvNode>();
    if (bv == nullptr || bv->value.width() != c->width) {
      throw DomainError("hole " + label + " requires a " + std::to_string(c->width) + "-bit constant");
    }
    return;
  }
  const auto& alts = std::get<ChoiceHole>(spec).alternatives;
  if (std::find(alts.begin(), alts.end(), assigned) == alts.end()) {
    throw DomainError("node assigned to hole " + label + " is not one of its alternatives");
  }
}

Prog substitute_impl(const Prog& p, const std::map<std::string, HoleSpec>& domains,
                     const std::map<std::string, Node>& assignment) {
  Prog out;
  out.root = p.root;
  for (const auto& [id, node] : p.nodes) {
    if (const auto* hole = node.get_if<HoleNode>()) {
      auto it = assignment.find(hole->label);
      if (it == assignment.end()) throw MissingAssignment("no assignment for hole " + hole->label);
      auto dom = domains.find(hole->label);
      check_in_domain(hole->label, dom != domains.end() ? dom->second : hole->spec, it->second);
      out.nodes.emplace(id, it->second);
    } else if (const auto* prim = node.get_if<PrimNode>(); prim && prim->body && !is_hole_free(*prim->body)) {
      PrimNode copy = *prim;
      copy.body = std::make_shared<const Prog>(substitute_impl(*prim->body, domains, assignment));
      out.nodes.emplace(id, std::move(copy));
    } else {
      out.nodes.emplace(id, node);
    }
  }
  return out;
}

void collect_holes_impl(const Prog& p, std::map<std::string, HoleSpec>& out) {
  for (const auto& [id, node] : p.nodes) {
    if (const auto* hole = node.get_if<HoleNode>()) out.emplace(hole->label, hole->spec);
    if (const auto* prim = node.get_if<PrimNode>(); prim && prim->body) collect_holes_impl(*prim->body, out);
  }
}

void write_node(std::ostream& os, const Node& node);

void write_prog(std::ostream& os, const Prog& p) {
  os << "(prog (root " << p.root << ")";
  for (const auto& [id, node] : p.nodes) {
    os << " (" << id << " ";
    write_node(os, node);
    os << ")";
  }
  os << ")";
}

void write_bv(std::ostream& os, const BitVec& b) { os << "(bv #x" << b.to_hex() << " " << b.width() << ")"; }

void write_node(std::ostream& os, const Node& node) {
  std::visit(
      [&](const auto& n) {
        using T = std::decay_t<decltype(n)>;
        if constexpr (std::is_same_v<T, BvNode>) {
          write_bv(os, n.value);
        } else if constexpr (std::is_same_v<T, VarNode>) {
          os << "(var " << n.name << " " << n.width << ")";
        } else if constexpr (std::is_same_v<T, OpNode>) {
          os << "(op " << n.op.name();
          for (auto a : n.args) os << " " << a;
          os << ")";
        } else if constexpr (std::is_same_v<T, RegNode>) {
          os << "(reg " << n.data << " ";
          write_bv(os, n.init);
          os << ")";
        } else if constexpr (std::is_same_v<T, PrimNode>) {
          os << "(prim " << (n.meta.module_name.empty() ? "_" : n.meta.module_name) << " (binds";
          for (const auto& [name, id] : n.binds) os << " (" << name << " " << id << ")";
          os << ") ";
          if (n.body) {
            write_prog(os, *n.body);
          } else {
            os << "opaque";
          }
          os << ")";
        } else if constexpr (std::is_same_v<T, HoleNode>) {
          os << "(hole " << n.label << " ";
          if (const auto* c = std::get_if<ConstantHole>(&n.spec)) {
            os << "(const " << c->width << ")";
          } else {
            os << "(choice";
            for (const auto& alt : std::get<ChoiceHole>(n.spec).alternatives) {
              os << " ";
              write_node(os, alt);
            }
            os << ")";
          }
          os << ")";
        }
      },
      node.v);
}

}  // namespace

Prog renumber(const Prog& p, IdAllocator& ids) { return renumber_impl(p, ids); }

std::vector<Id> all_ids(const Prog& p) {
  std::vector<Id> out;
  collect_ids(p, out);
  return out;
}

Id max_id(const Prog& p) {
  auto ids = all_ids(p);
  Id m = p.root;
  for (auto id : ids) m = std::max(m, id);
  return m;
}

bool is_hole_free(const Prog& p) {
  for (const auto& [id, node] : p.nodes) {
    if (node.is<HoleNode>()) return false;
    if (const auto* prim = node.get_if<PrimNode>(); prim && prim->body && !is_hole_free(*prim->body)) return false;
  }
  return true;
}

Prog substitute_holes(const Sketch& s, const std::map<std::string, Node>& assignment) {
  Prog out = substitute_impl(s.psi, s.holes, assignment);
  check_well_formed(out);
  return out;
}

std::map<std::string, HoleSpec> collect_holes(const Prog& p) {
  std::map<std::string, HoleSpec> out;
  collect_holes_impl(p, out);
  return out;
}

std::string to_sexpr(const Prog& p) {
  std::ostringstream os;
  write_prog(os, p);
  return os.str();
}

std::string to_sexpr(const Node& n) {
  std::ostringstream os;
  write_node(os, n);
  return os.str();
}

}  // namespace sketchmap
