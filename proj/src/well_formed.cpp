#include "sketchmap/well_formed.hpp"

#include <algorithm>
#include <functional>
#include <unordered_map>
#include <unordered_set>

#include "sketchmap/errors.hpp"
#include "sketchmap/prog_index.hpp"

namespace sketchmap {

std::string to_string(WellFormednessKind kind) {
  switch (kind) {
    case WellFormednessKind::W1: return "W1";
    case WellFormednessKind::W2: return "W2";
    case WellFormednessKind::W3: return "W3";
    case WellFormednessKind::W4: return "W4";
    case WellFormednessKind::W5: return "W5";
    case WellFormednessKind::W6: return "W6";
    case WellFormednessKind::Width: return "WidthError";
  }
  return "?";
}

WellFormednessError::WellFormednessError(WellFormednessKind kind, std::vector<std::uint32_t> ids,
                                         const std::string& what)
    : Error(to_string(kind) + ": " + what), kind_(kind), ids_(std::move(ids)) {}

namespace {

using Kind = WellFormednessKind;

std::set<Id> hole_inputs(const HoleNode& hole) {
  std::set<Id> out;
  if (const auto* choice = std::get_if<ChoiceHole>(&hole.spec)) {
    for (const auto& alt : choice->alternatives) {
      auto in = inputs(alt);
      out.insert(in.begin(), in.end());
    }
  }
  return out;
}

/// W1, W3, W4 and W5 for `p` and, recursively, its bodies.
void check_local(const Prog& p) {
  if (!p.contains(p.root)) {
    throw WellFormednessError(Kind::W1, {p.root}, "root " + std::to_string(p.root) + " is not a node");
  }
  for (const auto& [id, node] : p.nodes) {
    auto in = inputs(node);
    if (const auto* hole = node.get_if<HoleNode>()) {
      in = hole_inputs(*hole);
      if (const auto* choice = std::get_if<ChoiceHole>(&hole->spec); choice && choice->alternatives.empty()) {
        throw WellFormednessError(Kind::Width, {id}, "choice hole " + hole->label + " has no alternatives");
      }
    }
    for (Id dep : in) {
      if (!p.contains(dep)) {
        throw WellFormednessError(Kind::W3, {id, dep},
                                  "node " + std::to_string(id) + " reads missing id " + std::to_string(dep));
      }
    }
    if (const auto* prim = node.get_if<PrimNode>()) {
      if (!prim->body) throw WellFormednessError(Kind::W4, {id}, "primitive " + std::to_string(id) + " has no body");
      try {
        check_local(*prim->body);
      } catch (const WellFormednessError& e) {
        auto ids = e.ids();
        ids.insert(ids.begin(), id);
        throw WellFormednessError(Kind::W4, ids, "body of primitive " + std::to_string(id) + ": " + e.what());
      }
      auto fv = free_vars(*prim->body);
      std::set<std::string> bound;
      for (const auto& [name, target] : prim->binds) bound.insert(name);
      if (fv != bound) {
        throw WellFormednessError(Kind::W5, {id},
                                  "primitive " + std::to_string(id) + " does not bind exactly its free variables");
      }
    }
  }
}

void check_unique(const Prog& p) {
  auto ids = all_ids(p);
  std::sort(ids.begin(), ids.end());
  std::vector<Id> dups;
  for (std::size_t i = 1; i < ids.size(); ++i) {
    if (ids[i] == ids[i - 1] && (dups.empty() || dups.back() != ids[i])) dups.push_back(ids[i]);
  }
  if (!dups.empty()) throw WellFormednessError(Kind::W2, dups, "ids are not unique across sub-programs");
}

/// Dependencies of each id under the monotonicity rules.
std::vector<Id> dependencies(const ProgIndex& index, Id id) {
  const auto& e = index.entry(id);
  const Node& node = *e.node;
  if (node.is<RegNode>()) return {};
  if (const auto* prim = node.get_if<PrimNode>()) return {prim->body->root};
  if (node.is<VarNode>()) {
    if (auto bound = index.binding_of(id)) return {*bound};
    return {};
  }
  if (const auto* hole = node.get_if<HoleNode>()) {
    auto in = hole_inputs(*hole);
    return {in.begin(), in.end()};
  }
  auto in = inputs(node);
  return {in.begin(), in.end()};
}

WitnessMap levels(const ProgIndex& index) {
  const std::size_t n = index.size();
  std::vector<std::uint32_t> level(n, 0);
  std::vector<std::uint8_t> state(n, 0);  // 0 new, 1 on stack, 2 done
  struct Frame {
    Id id;
    std::vector<Id> deps;
    std::size_t next = 0;
  };
  for (Id root : index.ids()) {
    if (state[index.entry(root).dense] != 0) continue;
    std::vector<Frame> stack;
    stack.push_back({root, dependencies(index, root)});
    state[index.entry(root).dense] = 1;
    while (!stack.empty()) {
      auto& top = stack.back();
      if (top.next < top.deps.size()) {
        Id dep = top.deps[top.next++];
        auto d = index.entry(dep).dense;
        if (state[d] == 1) {
          std::vector<Id> cycle;
          auto it = std::find_if(stack.begin(), stack.end(), [&](const Frame& f) { return f.id == dep; });
          for (; it != stack.end(); ++it) cycle.push_back(it->id);
          throw WellFormednessError(Kind::W6, cycle, "combinational loop through id " + std::to_string(dep));
        }
        if (state[d] == 0) {
          state[d] = 1;
          stack.push_back({dep, dependencies(index, dep)});
        }
        continue;
      }
      auto dense = index.entry(top.id).dense;
      std::uint32_t lv = 0;
      if (!top.deps.empty()) {
        for (Id dep : top.deps) lv = std::max(lv, level[index.entry(dep).dense] + 1);
      }
      level[dense] = lv;
      state[dense] = 2;
      stack.pop_back();
    }
  }
  WitnessMap w;
  for (Id id : index.ids()) w.emplace(id, level[index.entry(id).dense]);
  return w;
}

class WidthInference {
 public:
  explicit WidthInference(const ProgIndex& index) : index_(index) {}

  std::uint32_t of(Id id) {
    if (auto it = cache_.find(id); it != cache_.end()) return it->second;
    std::uint32_t w = compute(id);
    cache_.emplace(id, w);
    return w;
  }

  std::uint32_t of_node(const Node& node, Id context) {
    try {
      return std::visit([&](const auto& n) { return node_width(n, context); }, node.v);
    } catch (const WellFormednessError&) {
      throw;
    } catch (const Error& e) {
      throw WellFormednessError(Kind::Width, {context}, "node " + std::to_string(context) + ": " + e.what());
    }
  }

 private:
  std::uint32_t compute(Id id) {
    const auto& e = index_.entry(id);
    std::uint32_t w = of_node(*e.node, id);
    if (const auto* v = e.node->get_if<VarNode>()) {
      if (auto bound = index_.binding_of(id)) {
        std::uint32_t outer = of(*bound);
        if (outer != v->width) {
          throw WellFormednessError(Kind::Width, {id, *bound},
                                    "variable " + v->name + " is " + std::to_string(v->width) +
                                        " bits but is bound to a " + std::to_string(outer) + "-bit value");
        }
      }
    }
    if (const auto* reg = e.node->get_if<RegNode>()) {
      // Registers may sit on a feedback path, so record their width before following data.
      cache_.emplace(id, w);
      if (of(reg->data) != reg->init.width()) {
        throw WellFormednessError(Kind::Width, {id, reg->data},
                                  "register " + std::to_string(id) + " init width differs from its data width");
      }
    }
    if (const auto* prim = e.node->get_if<PrimNode>()) {
      for (const auto& [name, target] : prim->binds) of(target);
    }
    return w;
  }

  std::uint32_t node_width(const BvNode& n, Id) { return n.value.width(); }
  std::uint32_t node_width(const VarNode& n, Id) {
    if (n.width == 0 || n.width > BitVec::kMaxWidth) throw WidthError("variable " + n.name + " has invalid width");
    return n.width;
  }
  std::uint32_t node_width(const OpNode& n, Id) {
    std::vector<std::uint32_t> ws;
    ws.reserve(n.args.size());
    for (Id a : n.args) ws.push_back(of(a));
    return result_width(n.op, ws);
  }
  std::uint32_t node_width(const RegNode& n, Id) { return n.init.width(); }
  std::uint32_t node_width(const PrimNode& n, Id) { return of(n.body->root); }
  std::uint32_t node_width(const HoleNode& n, Id context) {
    if (const auto* c = std::get_if<ConstantHole>(&n.spec)) {
      if (c->width == 0 || c->width > BitVec::kMaxWidth) throw WidthError("hole " + n.label + " has invalid width");
      return c->width;
    }
    const auto& alts = std::get<ChoiceHole>(n.spec).alternatives;
    std::uint32_t first = of_node(alts.front(), context);
    for (const auto& alt : alts) {
      if (alt.is<HoleNode>()) throw WidthError("choice hole " + n.label + " has a hole alternative");
      if (of_node(alt, context) != first) {
        throw WidthError("choice hole " + n.label + " alternatives differ in width");
      }
    }
    return first;
  }

  const ProgIndex& index_;
  std::unordered_map<Id, std::uint32_t> cache_;
};

}  // namespace

WitnessMap check_well_formed(const Prog& p) {
  check_unique(p);
  check_local(p);
  ProgIndex index(p);
  WitnessMap w = levels(index);
  // Width inference follows the (now acyclic) dependency order; visiting ids
  // by increasing level keeps the recursion shallow.
  std::vector<Id> order = index.ids();
  std::stable_sort(order.begin(), order.end(), [&](Id a, Id b) { return w.at(a) < w.at(b); });
  WidthInference widths(index);
  for (Id id : order) widths.of(id);
  return w;
}

std::map<Id, std::uint32_t> node_widths(const Prog& p) {
  ProgIndex index(p);
  WidthInference widths(index);
  std::map<Id, std::uint32_t> out;
  for (const auto& [id, node] : p.nodes) out.emplace(id, widths.of(id));
  return out;
}

std::uint32_t root_width(const Prog& p) {
  ProgIndex index(p);
  WidthInference widths(index);
  return widths.of(p.root);
}

std::uint32_t hole_width(const Prog& p, const HoleSpec& spec) {
  if (const auto* c = std::get_if<ConstantHole>(&spec)) return c->width;
  ProgIndex index(p);
  WidthInference widths(index);
  return widths.of_node(std::get<ChoiceHole>(spec).alternatives.front(), p.root);
}

}  // namespace sketchmap
