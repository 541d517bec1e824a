#pragma once

#include <cstdint>
#include <map>
#include <memory>
#include <optional>
#include <set>
#include <string>
#include <type_traits>
#include <variant>
#include <vector>

#include "sketchmap/bitvec.hpp"
#include "sketchmap/ops.hpp"

namespace sketchmap {

using Id = std::uint32_t;

struct Node;
struct Prog;

struct ConstantHole {
  std::uint32_t width = 1;
  friend bool operator==(const ConstantHole&, const ConstantHole&) = default;
};

/// Finite choice among hole-free structural nodes; alternatives may reference
/// ids of the enclosing program.
struct ChoiceHole {
  std::vector<Node> alternatives;
  friend bool operator==(const ChoiceHole&, const ChoiceHole&);
};

using HoleSpec = std::variant<ConstantHole, ChoiceHole>;

enum class PortDirection { Input, Output, Parameter, Clock };

struct PortBinding {
  std::string port;
  PortDirection direction = PortDirection::Input;
  std::uint32_t width = 1;
  friend bool operator==(const PortBinding&, const PortBinding&) = default;
};

struct OutputPort {
  std::string port;
  std::uint32_t width = 1;
  friend bool operator==(const OutputPort&, const OutputPort&) = default;
};

/// What a Prim needs to be printed as a module instance.
///
/// `port_bindings` maps every bound variable of the Prim to the module port or
/// parameter it drives. The Prim's value is the concatenation of `outputs`,
/// with the first listed output in the least significant bits.
struct EmitMeta {
  std::string module_name;
  std::map<std::string, PortBinding> port_bindings;
  /// Parameter name -> hole label (before substitution) or fixed value.
  std::map<std::string, std::variant<std::string, BitVec>> parameter_bindings;
  std::vector<OutputPort> outputs;
  /// Module port tied to the design clock, if the primitive is clocked.
  std::optional<std::string> clock_port;
  /// Where the semantics came from: "builtin:<name>" or "btor2:<path>"; lets a
  /// netlist reader rebuild the Prim body.
  std::string model_ref;

  friend bool operator==(const EmitMeta&, const EmitMeta&) = default;
};

struct BvNode {
  BitVec value;
  friend bool operator==(const BvNode&, const BvNode&) = default;
};

struct VarNode {
  std::string name;
  std::uint32_t width = 1;
  friend bool operator==(const VarNode&, const VarNode&) = default;
};

struct OpNode {
  Operator op;
  std::vector<Id> args;
  friend bool operator==(const OpNode&, const OpNode&) = default;
};

struct RegNode {
  Id data = 0;
  BitVec init;
  friend bool operator==(const RegNode&, const RegNode&) = default;
};

struct PrimNode {
  std::map<std::string, Id> binds;
  /// Null only for opaque cells read back from a netlist without a model.
  std::shared_ptr<const Prog> body;
  EmitMeta meta;
  friend bool operator==(const PrimNode&, const PrimNode&);
};

struct HoleNode {
  std::string label;
  HoleSpec spec;
  friend bool operator==(const HoleNode&, const HoleNode&) = default;
};

struct Node {
  using Variant = std::variant<BvNode, VarNode, OpNode, RegNode, PrimNode, HoleNode>;
  Variant v;

  Node() = default;
  template <typename T>
    requires(!std::is_same_v<std::remove_cvref_t<T>, Node>)
  Node(T&& alt) : v(std::forward<T>(alt)) {}  // NOLINT(google-explicit-constructor)

  template <typename T>
  bool is() const {
    return std::holds_alternative<T>(v);
  }
  template <typename T>
  const T& as() const {
    return std::get<T>(v);
  }
  template <typename T>
  const T* get_if() const {
    return std::get_if<T>(&v);
  }

  friend bool operator==(const Node&, const Node&) = default;
};

/// Program graph: a root id plus an id -> node map.
struct Prog {
  Id root = 0;
  std::map<Id, Node> nodes;

  const Node& at(Id id) const;
  bool contains(Id id) const { return nodes.count(id) != 0; }
};

/// A program with holes and the domain of every hole label.
///
/// `constraints` are width-1 programs whose free variables are hole labels;
/// a completion is valid only when each evaluates to 1.
struct Sketch {
  Prog psi;
  std::map<std::string, HoleSpec> holes;
  std::vector<Prog> constraints;
};

/// Single monotone counter shared across nested Prim construction.
class IdAllocator {
 public:
  explicit IdAllocator(Id first = 0) : next_(first) {}
  Id fresh() { return next_++; }
  Id peek() const { return next_; }

 private:
  Id next_;
};

/// Incremental construction of a Prog with ids drawn from a shared allocator.
class ProgBuilder {
 public:
  explicit ProgBuilder(IdAllocator& ids) : ids_(&ids) {}

  Id add(Node node);
  Id bv(const BitVec& b) { return add(BvNode{b}); }
  Id var(const std::string& name, std::uint32_t width) { return add(VarNode{name, width}); }
  Id op(Operator op, std::vector<Id> args) { return add(OpNode{op, std::move(args)}); }
  Id op(OpKind kind, std::vector<Id> args) { return op(Operator{kind}, std::move(args)); }
  Id reg(Id data, const BitVec& init) { return add(RegNode{data, init}); }
  /// Reserves an id to be filled later (used for registers in feedback loops).
  Id reserve() { return ids_->fresh(); }
  void set(Id id, Node node);

  /// Var node for `name`, reusing an earlier one of the same name.
  Id shared_var(const std::string& name, std::uint32_t width);

  const std::map<Id, Node>& nodes() const { return nodes_; }
  IdAllocator& ids() { return *ids_; }

  Prog build(Id root) const { return Prog{root, nodes_}; }

 private:
  IdAllocator* ids_;
  std::map<Id, Node> nodes_;
  std::map<std::string, Id> vars_;
};

/// INPUTS(node): {} for BV/Var/Hole, args for Op, {data} for Reg, bound ids for Prim.
std::set<Id> inputs(const Node& node);

/// Names of the Var nodes of `p` itself; variables inside Prim bodies are excluded.
std::set<std::string> free_vars(const Prog& p);
/// Free variables together with their declared widths.
std::map<std::string, std::uint32_t> free_var_widths(const Prog& p);

/// Copy of `p` (and all nested bodies) with every id replaced by a fresh one.
Prog renumber(const Prog& p, IdAllocator& ids);

/// Largest id used anywhere in `p`, including nested bodies.
Id max_id(const Prog& p);

/// Every id of `p` and its sub-programs, with repeats (used by the W2 check).
std::vector<Id> all_ids(const Prog& p);

/// True when no Hole node occurs in `p` (nested bodies included).
bool is_hole_free(const Prog& p);

/// s[hole -> node, ...]: each Hole node is replaced in place by its assigned node.
/// Throws MissingAssignment or DomainError; the result is checked for well-formedness.
Prog substitute_holes(const Sketch& s, const std::map<std::string, Node>& assignment);

/// Canonical s-expression dump, ids in sorted order.
std::string to_sexpr(const Prog& p);
std::string to_sexpr(const Node& n);

/// Hole labels in `p` (nested bodies included), with their specs.
std::map<std::string, HoleSpec> collect_holes(const Prog& p);

}  // namespace sketchmap
