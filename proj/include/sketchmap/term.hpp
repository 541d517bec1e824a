#pragma once

#include <cstdint>
#include <functional>
#include <map>
#include <optional>
#include <string>
#include <unordered_map>
#include <vector>

#include "sketchmap/bitvec.hpp"
#include "sketchmap/ops.hpp"

namespace sketchmap {

using TermId = std::uint32_t;

enum class TermKind : std::uint8_t { Input, Hole, Const, Apply, Ite };

struct Term {
  TermKind kind = TermKind::Const;
  std::uint32_t width = 1;
  Operator op;                 // Apply
  std::vector<TermId> args;    // Apply operands, or (cond, then, else) for Ite
  std::string name;            // Input / Hole
  std::uint32_t time = 0;      // Input
  BitVec value;                // Const
};

/// Hash-consed bitvector term DAG.
///
/// Structurally identical terms share one id. Construction applies local
/// rewrites (constant folding, identities, extract push-down, commutative
/// argument ordering); every rewrite preserves the bit-level value.
class TermStore {
 public:
  TermId input(const std::string& name, std::uint32_t time, std::uint32_t width);
  TermId hole(const std::string& label, std::uint32_t width);
  TermId constant(const BitVec& value);
  TermId apply(const Operator& op, std::vector<TermId> args);
  TermId apply(OpKind kind, std::vector<TermId> args) { return apply(Operator{kind}, std::move(args)); }
  /// cond must be 1 bit wide; yields then_ when cond == 1.
  TermId ite(TermId cond, TermId then_, TermId else_);

  const Term& operator[](TermId id) const { return terms_[id]; }
  std::size_t size() const { return terms_.size(); }
  std::uint32_t width(TermId id) const { return terms_[id].width; }
  bool is_const(TermId id) const { return terms_[id].kind == TermKind::Const; }
  std::optional<BitVec> const_value(TermId id) const;

  /// Rebuilds `root` with leaves replaced where `leaf` returns a term.
  TermId substitute(TermId root, const std::function<std::optional<TermId>(TermId)>& leaf,
                    std::unordered_map<TermId, TermId>& memo);
  TermId substitute(TermId root, const std::function<std::optional<TermId>(TermId)>& leaf);

  /// Value of `root` with leaves (inputs and holes) taken from `leaves`.
  /// Missing leaves throw Error.
  BitVec evaluate(TermId root, const std::unordered_map<TermId, BitVec>& leaves) const;

  /// Input and hole leaves reachable from `roots`, in increasing id order.
  std::vector<TermId> leaves(const std::vector<TermId>& roots) const;

 private:
  struct Key {
    TermKind kind;
    std::uint32_t width;
    Operator op;
    std::vector<TermId> args;
    std::string name;
    std::uint32_t time;
    std::uint64_t value;
    friend bool operator==(const Key&, const Key&) = default;
  };
  struct KeyHash {
    std::size_t operator()(const Key& k) const;
  };

  TermId intern(Term t);
  TermId make_apply(const Operator& op, std::vector<TermId> args, std::uint32_t width);
  TermId simplify_extract(std::uint32_t hi, std::uint32_t lo, TermId x);
  TermId simplify_concat(std::vector<TermId> parts);
  bool is_zero(TermId id) const;
  bool is_ones(TermId id) const;

  std::vector<Term> terms_;
  std::unordered_map<Key, TermId, KeyHash> table_;
};

}  // namespace sketchmap
