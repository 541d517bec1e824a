#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <string_view>

#include "sketchmap/bitvec.hpp"

namespace sketchmap {

enum class OpKind {
  // wiring
  Concat,
  Extract,
  ZeroExtend,
  SignExtend,
  // bitvector
  Add,
  Sub,
  Mul,
  And,
  Or,
  Xor,
  Not,
  Neg,
  Shl,
  Lshr,
  Ashr,
  Eq,
  Ult,
  Ule,
  Slt,
  Sle,
  Mux,
  ReduceOr,
  ReduceAnd,
};

/// An operator plus its immediate arguments: extract(hi, lo), zero_extend(k), sign_extend(k).
struct Operator {
  OpKind kind = OpKind::Add;
  std::uint32_t hi = 0;  // extract high bit, or extension amount
  std::uint32_t lo = 0;

  static Operator extract(std::uint32_t hi, std::uint32_t lo) { return {OpKind::Extract, hi, lo}; }
  static Operator zero_extend(std::uint32_t k) { return {OpKind::ZeroExtend, k, 0}; }
  static Operator sign_extend(std::uint32_t k) { return {OpKind::SignExtend, k, 0}; }

  /// True for concat/extract/zero_extend/sign_extend, the ops allowed in structural programs.
  bool is_wiring() const;
  bool is_commutative() const;
  std::string name() const;

  friend bool operator==(const Operator&, const Operator&) = default;
  friend auto operator<=>(const Operator&, const Operator&) = default;
};

/// Operator for a plain mnemonic such as "add" or "reduce_or"; nullopt for
/// parameterized operators and unknown names.
std::optional<OpKind> op_kind_from_name(std::string_view name);
std::string_view op_kind_name(OpKind kind);

/// Result width of `op` applied to operands of the given widths.
/// Throws ArityError or WidthError when the operator's width rule fails.
std::uint32_t result_width(const Operator& op, std::span<const std::uint32_t> widths);

/// Bit-exact operator semantics over two's-complement modular arithmetic.
BitVec eval_op(const Operator& op, std::span<const BitVec> args);

}  // namespace sketchmap
