#pragma once

// Random program generators and independent oracles shared by the unit and acceptance tests.

#include <algorithm>
#include <cstdint>
#include <functional>
#include <map>
#include <optional>
#include <random>
#include <string>
#include <vector>

#include "sketchmap/interp.hpp"
#include "sketchmap/ir.hpp"
#include "sketchmap/well_formed.hpp"

namespace testsupport {

using namespace sketchmap;
using Rng = std::mt19937_64;

inline std::uint64_t uniform(Rng& rng, std::uint64_t lo, std::uint64_t hi) {
  return std::uniform_int_distribution<std::uint64_t>(lo, hi)(rng);
}

inline BitVec random_bv(Rng& rng, std::uint32_t width) { return BitVec::truncate(width, rng()); }

/// Every (node, nested node) pair of `p`, as a flat list of (id, node, owning prog).
struct FlatNode {
  Id id;
  const Node* node;
  const Prog* owner;
  const PrimNode* prim;  // Prim whose body owns the node, null at top level
};

inline void flatten(const Prog& p, const PrimNode* prim, std::vector<FlatNode>& out) {
  for (const auto& [id, node] : p.nodes) {
    out.push_back({id, &node, &p, prim});
    if (const auto* pr = node.get_if<PrimNode>(); pr && pr->body) flatten(*pr->body, pr, out);
  }
}

/// Direct transcription of the four monotonicity conditions on a candidate witness.
inline bool witness_holds(const Prog& p, const std::map<Id, std::uint32_t>& w) {
  std::vector<FlatNode> flat;
  flatten(p, nullptr, flat);
  for (const auto& f : flat) {
    if (!w.count(f.id)) return false;
  }
  for (const auto& f : flat) {
    const Node& n = *f.node;
    std::uint32_t me = w.at(f.id);
    if (n.is<RegNode>()) {
      if (me != 0) return false;
    } else if (const auto* prim = n.get_if<PrimNode>()) {
      if (!(me > w.at(prim->body->root))) return false;
      for (const auto& [bid, bnode] : prim->body->nodes) {
        if (const auto* v = bnode.get_if<VarNode>()) {
          auto it = prim->binds.find(v->name);
          if (it != prim->binds.end() && !(w.at(bid) > w.at(it->second))) return false;
        }
      }
    } else {
      for (Id in : inputs(n)) {
        if (!(me > w.at(in))) return false;
      }
    }
  }
  return true;
}

/// Exhaustive search over witnesses with values below the node count.
/// Constraints are checked as soon as both ends are assigned, which prunes
/// the search without assuming anything about the program's shape.
inline bool brute_force_witness_exists(const Prog& p) {
  std::vector<FlatNode> flat;
  flatten(p, nullptr, flat);
  const std::size_t n = flat.size();
  std::map<Id, std::size_t> pos;
  for (std::size_t i = 0; i < n; ++i) pos[flat[i].id] = i;

  // (greater, smaller): w(greater) > w(smaller); plus a list of ids that must be 0.
  std::vector<std::pair<std::size_t, std::size_t>> edges;
  std::vector<std::size_t> zeros;
  for (std::size_t i = 0; i < n; ++i) {
    const Node& node = *flat[i].node;
    if (node.is<RegNode>()) {
      zeros.push_back(i);
    } else if (const auto* prim = node.get_if<PrimNode>()) {
      edges.push_back({i, pos.at(prim->body->root)});
      for (const auto& [bid, bnode] : prim->body->nodes) {
        if (const auto* v = bnode.get_if<VarNode>()) {
          auto it = prim->binds.find(v->name);
          if (it != prim->binds.end()) edges.push_back({pos.at(bid), pos.at(it->second)});
        }
      }
    } else {
      for (Id in : inputs(node)) edges.push_back({i, pos.at(in)});
    }
  }
  std::vector<int> value(n, -1);
  std::function<bool(std::size_t)> search = [&](std::size_t k) -> bool {
    if (k == n) return true;
    bool must_zero = std::find(zeros.begin(), zeros.end(), k) != zeros.end();
    for (int v = 0; v < static_cast<int>(n); ++v) {
      if (must_zero && v != 0) break;
      value[k] = v;
      bool ok = true;
      for (auto [g, s] : edges) {
        if (value[g] >= 0 && value[s] >= 0 && !(value[g] > value[s])) {
          ok = false;
          break;
        }
      }
      if (ok && search(k + 1)) return true;
    }
    value[k] = -1;
    return false;
  };
  return search(0);
}

/// Programs of at most `max_nodes` nodes (nested bodies included) with all
/// widths equal to `width`, satisfying W1-W5 by construction but with
/// arbitrary, possibly cyclic, argument references.
inline Prog random_loop_candidate(Rng& rng, std::uint32_t max_nodes, std::uint32_t width = 2) {
  IdAllocator ids(1);
  std::uint32_t total = static_cast<std::uint32_t>(uniform(rng, 1, max_nodes));
  // Reserve top-level ids first so arguments can point anywhere.
  std::uint32_t prims = total >= 3 && uniform(rng, 0, 2) == 0 ? 1 : 0;
  std::uint32_t top = total - 2 * prims;
  std::vector<Id> top_ids;
  for (std::uint32_t i = 0; i < top; ++i) top_ids.push_back(ids.fresh());
  auto any_top = [&] { return top_ids[uniform(rng, 0, top_ids.size() - 1)]; };
  Prog p;
  p.root = any_top();
  for (std::uint32_t i = 0; i < top; ++i) {
    Id id = top_ids[i];
    switch (uniform(rng, 0, 4)) {
      case 0:
        p.nodes.emplace(id, BvNode{random_bv(rng, width)});
        break;
      case 1:
        p.nodes.emplace(id, VarNode{std::string(1, static_cast<char>('a' + uniform(rng, 0, 2))), width});
        break;
      case 2:
        p.nodes.emplace(id, RegNode{any_top(), BitVec::zero(width)});
        break;
      case 3:
        p.nodes.emplace(id, OpNode{Operator{OpKind::Not}, {any_top()}});
        break;
      default: {
        static const OpKind binary[] = {OpKind::And, OpKind::Add, OpKind::Xor};
        p.nodes.emplace(id, OpNode{Operator{binary[uniform(rng, 0, 2)]}, {any_top(), any_top()}});
        break;
      }
    }
  }
  if (prims) {
    // Replace one top-level node with a Prim over a two-node body: x -> not x.
    Id victim = top_ids[uniform(rng, 0, top_ids.size() - 1)];
    auto body = std::make_shared<Prog>();
    Id x = ids.fresh();
    Id r = ids.fresh();
    body->nodes.emplace(x, VarNode{"x", width});
    body->nodes.emplace(r, OpNode{Operator{OpKind::Not}, {x}});
    body->root = r;
    PrimNode prim;
    prim.binds["x"] = any_top();
    prim.body = body;
    prim.meta.module_name = "inv";
    p.nodes.insert_or_assign(victim, prim);
  }
  return p;
}

/// Well-formed, hole-free programs of at most `max_nodes` nodes with widths up
/// to `max_width`, drawing on the whole operator set. Registers may feed back.
class AcyclicGenerator {
 public:
  AcyclicGenerator(Rng& rng, std::uint32_t max_nodes, std::uint32_t max_width)
      : rng_(rng), max_nodes_(max_nodes), max_width_(max_width) {}

  Prog operator()() {
    ids_ = IdAllocator(1);
    nodes_.clear();
    widths_.clear();
    var_width_.clear();
    for (char c = 'a'; c <= 'c'; ++c) var_width_[std::string(1, c)] = static_cast<std::uint32_t>(uniform(rng_, 1, max_width_));
    const std::uint32_t target = static_cast<std::uint32_t>(uniform(rng_, 1, max_nodes_));
    Id last = 0;
    while (count() < target) {
      auto made = make_node(target - count());
      if (made) last = *made;
    }
    if (last == 0) last = leaf(1);
    // Some registers take their data from a later node: feedback through the register is legal.
    for (auto& [id, node] : nodes_) {
      if (const auto* reg = node.get_if<RegNode>(); reg && uniform(rng_, 0, 2) == 0) {
        auto later = same_width_any(reg->init.width());
        if (later) node = RegNode{*later, reg->init};
      }
    }
    return Prog{last, nodes_};
  }

 private:
  std::uint32_t count() const {
    std::uint32_t n = 0;
    for (const auto& [id, node] : nodes_) n += node.is<PrimNode>() ? 3 : 1;
    return n;
  }

  Id add(Node n, std::uint32_t width) {
    Id id = ids_.fresh();
    nodes_.emplace(id, std::move(n));
    widths_[id] = width;
    return id;
  }

  Id leaf(std::uint32_t width) {
    if (uniform(rng_, 0, 1) == 0) {
      for (const auto& [name, w] : var_width_) {
        if (w == width && uniform(rng_, 0, 1) == 0) return add(VarNode{name, w}, w);
      }
    }
    return add(BvNode{random_bv(rng_, width)}, width);
  }

  std::optional<Id> same_width_any(std::uint32_t w) {
    std::vector<Id> c;
    for (const auto& [id, width] : widths_) {
      if (width == w) c.push_back(id);
    }
    if (c.empty()) return std::nullopt;
    return c[uniform(rng_, 0, c.size() - 1)];
  }

  /// Existing node of width `w`, or a fresh leaf.
  Id operand(std::uint32_t w) {
    if (uniform(rng_, 0, 3) != 0) {
      if (auto id = same_width_any(w)) return *id;
    }
    return leaf(w);
  }

  std::optional<Id> make_node(std::uint32_t budget) {
    std::uint32_t w = static_cast<std::uint32_t>(uniform(rng_, 1, max_width_));
    switch (uniform(rng_, 0, 9)) {
      case 0:
        return leaf(w);
      case 1:
        return add(RegNode{operand(w), random_bv(rng_, w)}, w);
      case 2:
        if (budget >= 3) {
          // Prim over body: root = op(x, const)
          auto body = std::make_shared<Prog>();
          IdAllocator& ids = ids_;
          Id x = ids.fresh();
          Id k = ids.fresh();
          Id r = ids.fresh();
          body->nodes.emplace(x, VarNode{"x", w});
          body->nodes.emplace(k, BvNode{random_bv(rng_, w)});
          static const OpKind ops[] = {OpKind::Add, OpKind::Xor, OpKind::Sub, OpKind::Mul};
          body->nodes.emplace(r, OpNode{Operator{ops[uniform(rng_, 0, 3)]}, {x, k}});
          body->root = r;
          PrimNode prim;
          prim.binds["x"] = operand(w);
          prim.body = body;
          prim.meta.module_name = "cell";
          return add(prim, w);
        }
        return leaf(w);
      default:
        return make_op(w);
    }
  }

  Id make_op(std::uint32_t w) {
    static const OpKind binary_same[] = {OpKind::Add, OpKind::Sub, OpKind::Mul, OpKind::And, OpKind::Or,
                                         OpKind::Xor, OpKind::Shl, OpKind::Lshr, OpKind::Ashr};
    static const OpKind compare[] = {OpKind::Eq, OpKind::Ult, OpKind::Ule, OpKind::Slt, OpKind::Sle};
    switch (uniform(rng_, 0, 8)) {
      case 0:
      case 1: {
        auto k = binary_same[uniform(rng_, 0, 8)];
        return add(OpNode{Operator{k}, {operand(w), operand(w)}}, w);
      }
      case 2: {
        auto k = uniform(rng_, 0, 1) ? OpKind::Not : OpKind::Neg;
        return add(OpNode{Operator{k}, {operand(w)}}, w);
      }
      case 3: {
        auto k = compare[uniform(rng_, 0, 4)];
        return add(OpNode{Operator{k}, {operand(w), operand(w)}}, 1);
      }
      case 4:
        return add(OpNode{Operator{OpKind::Mux}, {operand(1), operand(w), operand(w)}}, w);
      case 5: {
        auto k = uniform(rng_, 0, 1) ? OpKind::ReduceOr : OpKind::ReduceAnd;
        return add(OpNode{Operator{k}, {operand(w)}}, 1);
      }
      case 6: {
        if (w >= max_width_) return add(OpNode{Operator{OpKind::Not}, {operand(w)}}, w);
        std::uint32_t w2 = static_cast<std::uint32_t>(uniform(rng_, 1, max_width_ - w));
        return add(OpNode{Operator{OpKind::Concat}, {operand(w), operand(w2)}}, w + w2);
      }
      case 7: {
        std::uint32_t hi = static_cast<std::uint32_t>(uniform(rng_, 0, w - 1));
        std::uint32_t lo = static_cast<std::uint32_t>(uniform(rng_, 0, hi));
        return add(OpNode{Operator::extract(hi, lo), {operand(w)}}, hi - lo + 1);
      }
      default: {
        if (w >= max_width_) return add(OpNode{Operator{OpKind::Neg}, {operand(w)}}, w);
        std::uint32_t k = static_cast<std::uint32_t>(uniform(rng_, 1, max_width_ - w));
        auto op = uniform(rng_, 0, 1) ? Operator::zero_extend(k) : Operator::sign_extend(k);
        return add(OpNode{op, {operand(w)}}, w + k);
      }
    }
  }

  Rng& rng_;
  std::uint32_t max_nodes_;
  std::uint32_t max_width_;
  IdAllocator ids_{1};
  std::map<Id, Node> nodes_;
  std::map<Id, std::uint32_t> widths_;
  std::map<std::string, std::uint32_t> var_width_;
};

}  // namespace testsupport
