#pragma once

#include <cstdint>
#include <optional>
#include <vector>

#include "sketchmap/errors.hpp"
#include "sketchmap/ir.hpp"
#include "sketchmap/prog_index.hpp"

namespace sketchmap {

/// Evaluates a program's nodes over time, memoized on (time, id).
///
/// `Algebra` supplies the value domain:
///   Value constant(const BitVec&);
///   Value variable(const VarNode&, std::uint32_t t);      // top-level variables only
///   Value hole(const HoleNode&, Id id, std::uint32_t t, Unroller&);
///   Value apply(const Operator&, std::vector<Value>);
///
/// Ids are unique across nested bodies, so memoizing on the id alone already
/// distinguishes the same body node reached through different Prims.
template <typename Algebra>
class Unroller {
 public:
  using Value = typename Algebra::Value;

  Unroller(const Prog& p, Algebra& algebra, bool memoize = true)
      : prog_(p), index_(p), algebra_(algebra), memoize_(memoize) {}

  /// Value of node `id` at time `t`.
  Value at(std::uint32_t t, Id id) {
    if (memoize_) {
      // Fill earlier cycles first so register chains never recurse deeply.
      for (std::uint32_t s = warmed_; s < t; ++s) eval(s, prog_.root);
      if (t > warmed_) warmed_ = t;
    }
    return eval(t, id);
  }

  Value root(std::uint32_t t) { return at(t, prog_.root); }

  /// Value of a node that is not itself in the graph (choice alternatives).
  Value eval_detached(std::uint32_t t, const Node& node, Id context) { return eval_node(t, node, context); }

  const ProgIndex& index() const { return index_; }

 private:
  Value eval(std::uint32_t t, Id id) {
    const auto& e = index_.entry(id);
    if (memoize_) {
      if (memo_.size() <= t) memo_.resize(t + 1);
      auto& row = memo_[t];
      if (row.empty()) row.resize(index_.size());
      if (row[e.dense]) return *row[e.dense];
      Value v = eval_node(t, *e.node, id);
      memo_[t][e.dense] = v;
      return v;
    }
    return eval_node(t, *e.node, id);
  }

  Value eval_node(std::uint32_t t, const Node& node, Id id) {
    if (const auto* bv = node.get_if<BvNode>()) return algebra_.constant(bv->value);
    if (const auto* var = node.get_if<VarNode>()) {
      if (auto bound = index_.binding_of(id)) return eval(t, *bound);
      return algebra_.variable(*var, t);
    }
    if (const auto* reg = node.get_if<RegNode>()) {
      if (t == 0) return algebra_.constant(reg->init);
      return eval(t - 1, reg->data);
    }
    if (const auto* op = node.get_if<OpNode>()) {
      std::vector<Value> args;
      args.reserve(op->args.size());
      for (Id a : op->args) args.push_back(eval(t, a));
      return algebra_.apply(op->op, std::move(args));
    }
    if (const auto* prim = node.get_if<PrimNode>()) {
      if (!prim->body) throw Error("primitive " + std::to_string(id) + " has no semantics");
      return eval(t, prim->body->root);
    }
    return algebra_.hole(node.as<HoleNode>(), id, t, *this);
  }

  const Prog& prog_;
  ProgIndex index_;
  Algebra& algebra_;
  bool memoize_;
  std::uint32_t warmed_ = 0;
  std::vector<std::vector<std::optional<Value>>> memo_;
};

}  // namespace sketchmap
