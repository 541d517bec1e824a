#include "sketchmap/term.hpp"

#include <algorithm>

#include "sketchmap/errors.hpp"

namespace sketchmap {

namespace {

std::size_t mix(std::size_t h, std::size_t v) { return h ^ (v + 0x9e3779b97f4a7c15ULL + (h << 6) + (h >> 2)); }

/// Post-order walk over the DAG below `root`; `visit` runs once per term after its operands.
template <typename Visit>
void post_order(const std::vector<Term>& terms, TermId root, std::vector<std::uint8_t>& seen, Visit&& visit) {
  std::vector<std::pair<TermId, bool>> stack{{root, false}};
  while (!stack.empty()) {
    auto [id, expanded] = stack.back();
    stack.pop_back();
    if (seen[id] == 2) continue;
    if (expanded) {
      seen[id] = 2;
      visit(id);
      continue;
    }
    if (seen[id] == 1) continue;
    seen[id] = 1;
    stack.push_back({id, true});
    const auto& args = terms[id].args;
    for (auto it = args.rbegin(); it != args.rend(); ++it) {
      if (seen[*it] == 0) stack.push_back({*it, false});
    }
  }
}

}  // namespace

std::size_t TermStore::KeyHash::operator()(const Key& k) const {
  std::size_t h = std::hash<int>{}(static_cast<int>(k.kind));
  h = mix(h, k.width);
  h = mix(h, static_cast<std::size_t>(k.op.kind));
  h = mix(h, k.op.hi);
  h = mix(h, k.op.lo);
  for (auto a : k.args) h = mix(h, a);
  h = mix(h, std::hash<std::string>{}(k.name));
  h = mix(h, k.time);
  h = mix(h, std::hash<std::uint64_t>{}(k.value));
  return h;
}

TermId TermStore::intern(Term t) {
  Key key{t.kind, t.width, t.op, t.args, t.name, t.time, t.kind == TermKind::Const ? t.value.value() : 0};
  auto it = table_.find(key);
  if (it != table_.end()) return it->second;
  auto id = static_cast<TermId>(terms_.size());
  terms_.push_back(std::move(t));
  table_.emplace(std::move(key), id);
  return id;
}

TermId TermStore::input(const std::string& name, std::uint32_t time, std::uint32_t width) {
  Term t;
  t.kind = TermKind::Input;
  t.width = width;
  t.name = name;
  t.time = time;
  return intern(std::move(t));
}

TermId TermStore::hole(const std::string& label, std::uint32_t width) {
  Term t;
  t.kind = TermKind::Hole;
  t.width = width;
  t.name = label;
  return intern(std::move(t));
}

TermId TermStore::constant(const BitVec& value) {
  Term t;
  t.kind = TermKind::Const;
  t.width = value.width();
  t.value = value;
  return intern(std::move(t));
}

std::optional<BitVec> TermStore::const_value(TermId id) const {
  if (terms_[id].kind != TermKind::Const) return std::nullopt;
  return terms_[id].value;
}

bool TermStore::is_zero(TermId id) const { return is_const(id) && terms_[id].value.value() == 0; }

bool TermStore::is_ones(TermId id) const {
  return is_const(id) && terms_[id].value.value() == BitVec::mask(terms_[id].width);
}

TermId TermStore::make_apply(const Operator& op, std::vector<TermId> args, std::uint32_t width) {
  Term t;
  t.kind = TermKind::Apply;
  t.width = width;
  t.op = op;
  t.args = std::move(args);
  return intern(std::move(t));
}

TermId TermStore::ite(TermId cond, TermId then_, TermId else_) {
  if (width(cond) != 1) throw WidthError("ite condition must be 1 bit wide");
  if (width(then_) != width(else_)) throw WidthError("ite branches differ in width");
  if (auto c = const_value(cond)) return c->value() == 1 ? then_ : else_;
  if (then_ == else_) return then_;
  if (width(then_) == 1 && is_const(then_) && is_const(else_)) {
    // ite(c, 1, 0) == c and ite(c, 0, 1) == not c
    return is_ones(then_) ? cond : apply(OpKind::Not, {cond});
  }
  Term t;
  t.kind = TermKind::Ite;
  t.width = width(then_);
  t.args = {cond, then_, else_};
  return intern(std::move(t));
}

TermId TermStore::apply(const Operator& op, std::vector<TermId> args) {
  std::vector<std::uint32_t> widths;
  widths.reserve(args.size());
  for (auto a : args) widths.push_back(width(a));
  const std::uint32_t w = result_width(op, widths);

  if (op.kind == OpKind::Mux) return ite(args[0], args[1], args[2]);
  if (op.is_commutative()) std::sort(args.begin(), args.end());

  bool all_const = std::all_of(args.begin(), args.end(), [&](TermId a) { return is_const(a); });
  if (all_const) {
    std::vector<BitVec> vals;
    vals.reserve(args.size());
    for (auto a : args) vals.push_back(terms_[a].value);
    return constant(eval_op(op, vals));
  }

  auto zero = [&]() { return constant(BitVec::zero(w)); };
  auto one_bit = [&](bool b) { return constant(BitVec(1, b ? 1 : 0)); };
  auto is_one = [&](TermId a) { return is_const(a) && terms_[a].value.value() == 1; };

  switch (op.kind) {
    case OpKind::Extract:
      return simplify_extract(op.hi, op.lo, args[0]);
    case OpKind::Concat:
      return simplify_concat(std::move(args));
    case OpKind::ZeroExtend:
    case OpKind::SignExtend:
      if (op.hi == 0) return args[0];
      break;
    case OpKind::And:
      if (is_zero(args[0]) || is_zero(args[1])) return zero();
      if (is_ones(args[0])) return args[1];
      if (is_ones(args[1])) return args[0];
      if (args[0] == args[1]) return args[0];
      break;
    case OpKind::Or:
      if (is_zero(args[0])) return args[1];
      if (is_zero(args[1])) return args[0];
      if (is_ones(args[0]) || is_ones(args[1])) return constant(BitVec::ones(w));
      if (args[0] == args[1]) return args[0];
      break;
    case OpKind::Xor:
      if (is_zero(args[0])) return args[1];
      if (is_zero(args[1])) return args[0];
      if (args[0] == args[1]) return zero();
      break;
    case OpKind::Add:
      if (is_zero(args[0])) return args[1];
      if (is_zero(args[1])) return args[0];
      break;
    case OpKind::Sub:
      if (is_zero(args[1])) return args[0];
      if (args[0] == args[1]) return zero();
      break;
    case OpKind::Mul:
      if (is_zero(args[0]) || is_zero(args[1])) return zero();
      if (is_one(args[0])) return args[1];
      if (is_one(args[1])) return args[0];
      break;
    case OpKind::Not:
    case OpKind::Neg: {
      const Term& a = terms_[args[0]];
      if (a.kind == TermKind::Apply && a.op.kind == op.kind) return a.args[0];
      break;
    }
    case OpKind::Shl:
    case OpKind::Lshr:
    case OpKind::Ashr:
      if (is_zero(args[1])) return args[0];
      if (op.kind != OpKind::Ashr && is_const(args[1]) && terms_[args[1]].value.value() >= w) return zero();
      break;
    case OpKind::Eq:
      if (args[0] == args[1]) return one_bit(true);
      if (widths[0] == 1) {
        for (int i = 0; i < 2; ++i) {
          TermId c = args[i];
          TermId other = args[1 - i];
          if (is_const(c)) return terms_[c].value.value() == 1 ? other : apply(OpKind::Not, {other});
        }
      }
      break;
    case OpKind::Ult:
    case OpKind::Slt:
      if (args[0] == args[1]) return one_bit(false);
      break;
    case OpKind::Ule:
    case OpKind::Sle:
      if (args[0] == args[1]) return one_bit(true);
      break;
    case OpKind::ReduceOr:
    case OpKind::ReduceAnd:
      if (widths[0] == 1) return args[0];
      break;
    default:
      break;
  }
  return make_apply(op, std::move(args), w);
}

TermId TermStore::simplify_extract(std::uint32_t hi, std::uint32_t lo, TermId x) {
  const std::uint32_t w = width(x);
  if (lo > hi || hi >= w) throw WidthError("extract out of range");
  if (lo == 0 && hi == w - 1) return x;
  const std::uint32_t out_w = hi - lo + 1;
  if (auto v = const_value(x)) return constant(BitVec::truncate(out_w, v->value() >> lo));

  const Term t = terms_[x];  // copy: interning below may reallocate terms_
  if (t.kind == TermKind::Ite) {
    return ite(t.args[0], simplify_extract(hi, lo, t.args[1]), simplify_extract(hi, lo, t.args[2]));
  }
  if (t.kind == TermKind::Apply) {
    auto ex = [&](TermId a) { return simplify_extract(hi, lo, a); };
    switch (t.op.kind) {
      case OpKind::Extract:
        return simplify_extract(hi + t.op.lo, lo + t.op.lo, t.args[0]);
      case OpKind::Concat: {
        std::vector<TermId> pieces;  // most significant first
        std::uint32_t offset = w;
        for (TermId part : t.args) {
          std::uint32_t pw = width(part);
          offset -= pw;
          std::uint32_t part_lo = offset;
          std::uint32_t part_hi = offset + pw - 1;
          if (part_hi < lo || part_lo > hi) continue;
          std::uint32_t a = std::min(hi, part_hi);
          std::uint32_t b = std::max(lo, part_lo);
          pieces.push_back(simplify_extract(a - part_lo, b - part_lo, part));
        }
        return simplify_concat(std::move(pieces));
      }
      case OpKind::ZeroExtend: {
        TermId y = t.args[0];
        std::uint32_t wy = width(y);
        if (hi < wy) return simplify_extract(hi, lo, y);
        if (lo >= wy) return constant(BitVec::zero(out_w));
        return simplify_concat({constant(BitVec::zero(hi - wy + 1)), simplify_extract(wy - 1, lo, y)});
      }
      case OpKind::SignExtend:
        if (hi < width(t.args[0])) return simplify_extract(hi, lo, t.args[0]);
        break;
      case OpKind::And:
      case OpKind::Or:
      case OpKind::Xor:
        return apply(t.op, {ex(t.args[0]), ex(t.args[1])});
      case OpKind::Not:
        return apply(t.op, {ex(t.args[0])});
      case OpKind::Add:
      case OpKind::Sub:
      case OpKind::Mul:
        // Low bits of modular arithmetic depend only on low bits of the operands.
        if (lo == 0) return apply(t.op, {ex(t.args[0]), ex(t.args[1])});
        break;
      case OpKind::Neg:
        if (lo == 0) return apply(t.op, {ex(t.args[0])});
        break;
      case OpKind::Lshr:
        if (auto k = const_value(t.args[1])) {
          if (k->value() >= w || lo + k->value() >= w) return constant(BitVec::zero(out_w));
          if (hi + k->value() < w) {
            return simplify_extract(hi + static_cast<std::uint32_t>(k->value()),
                                    lo + static_cast<std::uint32_t>(k->value()), t.args[0]);
          }
        }
        break;
      case OpKind::Shl:
        if (auto k = const_value(t.args[1])) {
          if (k->value() >= w || hi < k->value()) return constant(BitVec::zero(out_w));
          if (lo >= k->value()) {
            return simplify_extract(hi - static_cast<std::uint32_t>(k->value()),
                                    lo - static_cast<std::uint32_t>(k->value()), t.args[0]);
          }
        }
        break;
      default:
        break;
    }
  }
  return make_apply(Operator::extract(hi, lo), {x}, out_w);
}

TermId TermStore::simplify_concat(std::vector<TermId> parts) {
  if (parts.empty()) throw ArityError("concat expects at least one operand");
  std::vector<TermId> flat;
  for (TermId p : parts) {
    const Term& t = terms_[p];
    if (t.kind == TermKind::Apply && t.op.kind == OpKind::Concat) {
      flat.insert(flat.end(), t.args.begin(), t.args.end());
    } else {
      flat.push_back(p);
    }
  }
  std::vector<TermId> merged;
  for (TermId p : flat) {
    if (!merged.empty()) {
      TermId prev = merged.back();
      const Term a = terms_[prev];
      const Term b = terms_[p];
      if (a.kind == TermKind::Const && b.kind == TermKind::Const && a.width + b.width <= BitVec::kMaxWidth) {
        merged.back() = constant(BitVec(a.width + b.width, (a.value.value() << b.width) | b.value.value()));
        continue;
      }
      bool a_ex = a.kind == TermKind::Apply && a.op.kind == OpKind::Extract;
      bool b_ex = b.kind == TermKind::Apply && b.op.kind == OpKind::Extract;
      if (a_ex && b_ex && a.args[0] == b.args[0] && a.op.lo == b.op.hi + 1) {
        merged.back() = simplify_extract(a.op.hi, b.op.lo, a.args[0]);
        continue;
      }
    }
    merged.push_back(p);
  }
  if (merged.size() == 1) return merged[0];
  std::uint32_t total = 0;
  for (TermId p : merged) total += width(p);
  if (total > BitVec::kMaxWidth) throw WidthError("concat result wider than 64 bits");
  return make_apply(Operator{OpKind::Concat}, std::move(merged), total);
}

TermId TermStore::substitute(TermId root, const std::function<std::optional<TermId>(TermId)>& leaf,
                             std::unordered_map<TermId, TermId>& memo) {
  if (auto it = memo.find(root); it != memo.end()) return it->second;
  std::vector<std::uint8_t> seen(terms_.size(), 0);
  for (const auto& [k, v] : memo) {
    if (k < seen.size()) seen[k] = 2;
  }
  // Terms created during the walk are never visited, so a snapshot of ids is enough.
  std::vector<TermId> order;
  post_order(terms_, root, seen, [&](TermId id) { order.push_back(id); });
  for (TermId id : order) {
    const Term t = terms_[id];
    TermId out = id;
    switch (t.kind) {
      case TermKind::Input:
      case TermKind::Hole:
        if (auto r = leaf(id)) out = *r;
        break;
      case TermKind::Const:
        break;
      case TermKind::Apply: {
        std::vector<TermId> args;
        args.reserve(t.args.size());
        bool changed = false;
        for (TermId a : t.args) {
          TermId n = memo.at(a);
          changed |= n != a;
          args.push_back(n);
        }
        if (changed) out = apply(t.op, std::move(args));
        break;
      }
      case TermKind::Ite: {
        TermId c = memo.at(t.args[0]);
        TermId a = memo.at(t.args[1]);
        TermId b = memo.at(t.args[2]);
        if (c != t.args[0] || a != t.args[1] || b != t.args[2]) out = ite(c, a, b);
        break;
      }
    }
    memo[id] = out;
  }
  return memo.at(root);
}

TermId TermStore::substitute(TermId root, const std::function<std::optional<TermId>(TermId)>& leaf) {
  std::unordered_map<TermId, TermId> memo;
  return substitute(root, leaf, memo);
}

BitVec TermStore::evaluate(TermId root, const std::unordered_map<TermId, BitVec>& leaves) const {
  std::vector<std::uint8_t> seen(terms_.size(), 0);
  std::unordered_map<TermId, BitVec> value;
  post_order(terms_, root, seen, [&](TermId id) {
    const Term& t = terms_[id];
    switch (t.kind) {
      case TermKind::Input:
      case TermKind::Hole: {
        auto it = leaves.find(id);
        if (it == leaves.end()) throw Error("no value for symbol " + t.name);
        value.emplace(id, it->second);
        break;
      }
      case TermKind::Const:
        value.emplace(id, t.value);
        break;
      case TermKind::Apply: {
        std::vector<BitVec> args;
        args.reserve(t.args.size());
        for (TermId a : t.args) args.push_back(value.at(a));
        value.emplace(id, eval_op(t.op, args));
        break;
      }
      case TermKind::Ite:
        value.emplace(id, value.at(t.args[0]).value() == 1 ? value.at(t.args[1]) : value.at(t.args[2]));
        break;
    }
  });
  return value.at(root);
}

std::vector<TermId> TermStore::leaves(const std::vector<TermId>& roots) const {
  std::vector<std::uint8_t> seen(terms_.size(), 0);
  std::vector<TermId> out;
  for (TermId r : roots) {
    post_order(terms_, r, seen, [&](TermId id) {
      auto k = terms_[id].kind;
      if (k == TermKind::Input || k == TermKind::Hole) out.push_back(id);
    });
  }
  std::sort(out.begin(), out.end());
  return out;
}

}  // namespace sketchmap
