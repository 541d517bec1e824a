#include "sketchmap/ops.hpp"

#include <array>
#include <utility>

#include "sketchmap/errors.hpp"

namespace sketchmap {

namespace {

constexpr std::array<std::pair<OpKind, std::string_view>, 23> kNames{{
    {OpKind::Concat, "concat"},       {OpKind::Extract, "extract"},     {OpKind::ZeroExtend, "zero_extend"},
    {OpKind::SignExtend, "sign_extend"}, {OpKind::Add, "add"},          {OpKind::Sub, "sub"},
    {OpKind::Mul, "mul"},             {OpKind::And, "and"},             {OpKind::Or, "or"},
    {OpKind::Xor, "xor"},             {OpKind::Not, "not"},             {OpKind::Neg, "neg"},
    {OpKind::Shl, "shl"},             {OpKind::Lshr, "lshr"},           {OpKind::Ashr, "ashr"},
    {OpKind::Eq, "eq"},               {OpKind::Ult, "ult"},             {OpKind::Ule, "ule"},
    {OpKind::Slt, "slt"},             {OpKind::Sle, "sle"},             {OpKind::Mux, "mux"},
    {OpKind::ReduceOr, "reduce_or"},  {OpKind::ReduceAnd, "reduce_and"},
}};

void expect_arity(const Operator& op, std::size_t got, std::size_t want) {
  if (got != want) {
    throw ArityError(op.name() + " expects " + std::to_string(want) + " operands, got " + std::to_string(got));
  }
}

void expect_equal(const Operator& op, std::uint32_t a, std::uint32_t b) {
  if (a != b) {
    throw WidthError(op.name() + " operand widths differ: " + std::to_string(a) + " vs " + std::to_string(b));
  }
}

}  // namespace

std::string_view op_kind_name(OpKind kind) {
  for (const auto& [k, n] : kNames) {
    if (k == kind) return n;
  }
  return "?";
}

std::optional<OpKind> op_kind_from_name(std::string_view name) {
  for (const auto& [k, n] : kNames) {
    if (n == name && k != OpKind::Extract && k != OpKind::ZeroExtend && k != OpKind::SignExtend) return k;
  }
  return std::nullopt;
}

bool Operator::is_wiring() const {
  return kind == OpKind::Concat || kind == OpKind::Extract || kind == OpKind::ZeroExtend ||
         kind == OpKind::SignExtend;
}

bool Operator::is_commutative() const {
  switch (kind) {
    case OpKind::Add:
    case OpKind::Mul:
    case OpKind::And:
    case OpKind::Or:
    case OpKind::Xor:
    case OpKind::Eq:
      return true;
    default:
      return false;
  }
}

std::string Operator::name() const {
  switch (kind) {
    case OpKind::Extract:
      return "(extract " + std::to_string(hi) + " " + std::to_string(lo) + ")";
    case OpKind::ZeroExtend:
      return "(zero_extend " + std::to_string(hi) + ")";
    case OpKind::SignExtend:
      return "(sign_extend " + std::to_string(hi) + ")";
    default:
      return std::string(op_kind_name(kind));
  }
}

std::uint32_t result_width(const Operator& op, std::span<const std::uint32_t> w) {
  switch (op.kind) {
    case OpKind::Concat: {
      if (w.empty()) throw ArityError("concat expects at least one operand");
      std::uint32_t total = 0;
      for (auto x : w) total += x;
      if (total > BitVec::kMaxWidth) throw WidthError("concat result wider than 64 bits");
      return total;
    }
    case OpKind::Extract:
      expect_arity(op, w.size(), 1);
      if (op.lo > op.hi || op.hi >= w[0]) {
        throw WidthError(op.name() + " out of range for width " + std::to_string(w[0]));
      }
      return op.hi - op.lo + 1;
    case OpKind::ZeroExtend:
    case OpKind::SignExtend:
      expect_arity(op, w.size(), 1);
      if (w[0] + op.hi > BitVec::kMaxWidth) throw WidthError(op.name() + " result wider than 64 bits");
      return w[0] + op.hi;
    case OpKind::Add:
    case OpKind::Sub:
    case OpKind::Mul:
    case OpKind::And:
    case OpKind::Or:
    case OpKind::Xor:
    case OpKind::Shl:
    case OpKind::Lshr:
    case OpKind::Ashr:
      expect_arity(op, w.size(), 2);
      expect_equal(op, w[0], w[1]);
      return w[0];
    case OpKind::Not:
    case OpKind::Neg:
      expect_arity(op, w.size(), 1);
      return w[0];
    case OpKind::Eq:
    case OpKind::Ult:
    case OpKind::Ule:
    case OpKind::Slt:
    case OpKind::Sle:
      expect_arity(op, w.size(), 2);
      expect_equal(op, w[0], w[1]);
      return 1;
    case OpKind::Mux:
      expect_arity(op, w.size(), 3);
      if (w[0] != 1) throw WidthError("mux select must be 1 bit wide");
      expect_equal(op, w[1], w[2]);
      return w[1];
    case OpKind::ReduceOr:
    case OpKind::ReduceAnd:
      expect_arity(op, w.size(), 1);
      return 1;
  }
  throw ArityError("unknown operator");
}

BitVec eval_op(const Operator& op, std::span<const BitVec> args) {
  std::array<std::uint32_t, 8> small{};
  std::vector<std::uint32_t> large;
  std::span<const std::uint32_t> widths;
  if (args.size() <= small.size()) {
    for (std::size_t i = 0; i < args.size(); ++i) small[i] = args[i].width();
    widths = std::span<const std::uint32_t>(small.data(), args.size());
  } else {
    for (const auto& a : args) large.push_back(a.width());
    widths = large;
  }
  const std::uint32_t width = result_width(op, widths);
  auto bool_bv = [](bool b) { return BitVec(1, b ? 1 : 0); };
  auto shift_amount = [](const BitVec& s) { return s.value(); };

  switch (op.kind) {
    case OpKind::Concat: {
      std::uint64_t v = 0;
      for (const auto& a : args) {
        v = (a.width() >= 64 ? 0 : (v << a.width())) | a.value();
      }
      return BitVec::truncate(width, v);
    }
    case OpKind::Extract:
      return BitVec::truncate(width, args[0].value() >> op.lo);
    case OpKind::ZeroExtend:
      return BitVec(width, args[0].value());
    case OpKind::SignExtend:
      return BitVec::truncate(width, static_cast<std::uint64_t>(args[0].signed_value()));
    case OpKind::Add:
      return BitVec::truncate(width, args[0].value() + args[1].value());
    case OpKind::Sub:
      return BitVec::truncate(width, args[0].value() - args[1].value());
    case OpKind::Mul:
      return BitVec::truncate(width, args[0].value() * args[1].value());
    case OpKind::And:
      return BitVec(width, args[0].value() & args[1].value());
    case OpKind::Or:
      return BitVec(width, args[0].value() | args[1].value());
    case OpKind::Xor:
      return BitVec(width, args[0].value() ^ args[1].value());
    case OpKind::Not:
      return BitVec::truncate(width, ~args[0].value());
    case OpKind::Neg:
      return BitVec::truncate(width, std::uint64_t{0} - args[0].value());
    case OpKind::Shl: {
      auto s = shift_amount(args[1]);
      return s >= width ? BitVec::zero(width) : BitVec::truncate(width, args[0].value() << s);
    }
    case OpKind::Lshr: {
      auto s = shift_amount(args[1]);
      return s >= width ? BitVec::zero(width) : BitVec(width, args[0].value() >> s);
    }
    case OpKind::Ashr: {
      auto s = shift_amount(args[1]);
      std::int64_t v = args[0].signed_value();
      if (s >= width) return BitVec::truncate(width, v < 0 ? ~std::uint64_t{0} : 0);
      return BitVec::truncate(width, static_cast<std::uint64_t>(v >> s));
    }
    case OpKind::Eq:
      return bool_bv(args[0].value() == args[1].value());
    case OpKind::Ult:
      return bool_bv(args[0].value() < args[1].value());
    case OpKind::Ule:
      return bool_bv(args[0].value() <= args[1].value());
    case OpKind::Slt:
      return bool_bv(args[0].signed_value() < args[1].signed_value());
    case OpKind::Sle:
      return bool_bv(args[0].signed_value() <= args[1].signed_value());
    case OpKind::Mux:
      return args[0].value() == 1 ? args[1] : args[2];
    case OpKind::ReduceOr:
      return bool_bv(args[0].value() != 0);
    case OpKind::ReduceAnd:
      return bool_bv(args[0].value() == BitVec::mask(args[0].width()));
  }
  throw ArityError("unknown operator");
}

}  // namespace sketchmap
