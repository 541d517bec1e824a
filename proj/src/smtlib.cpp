#include "sketchmap/smtlib.hpp"

#include <algorithm>
#include <cctype>
#include <functional>
#include <set>
#include <sstream>
#include <unordered_map>

#include "sketchmap/errors.hpp"

namespace sketchmap {

namespace {

std::string sanitize(const std::string& name) {
  static const char* hex = "0123456789ABCDEF";
  std::string out;
  for (unsigned char ch : name) {
    if (std::isalnum(ch)) {
      out.push_back(static_cast<char>(ch));
    } else {
      out.push_back('_');
      out.push_back(hex[ch >> 4]);
      out.push_back(hex[ch & 15]);
    }
  }
  return out;
}

std::string sort_of(std::uint32_t width) { return "(_ BitVec " + std::to_string(width) + ")"; }

const char* smt_op_name(OpKind k) {
  switch (k) {
    case OpKind::Add: return "bvadd";
    case OpKind::Sub: return "bvsub";
    case OpKind::Mul: return "bvmul";
    case OpKind::And: return "bvand";
    case OpKind::Or: return "bvor";
    case OpKind::Xor: return "bvxor";
    case OpKind::Not: return "bvnot";
    case OpKind::Neg: return "bvneg";
    case OpKind::Shl: return "bvshl";
    case OpKind::Lshr: return "bvlshr";
    case OpKind::Ashr: return "bvashr";
    case OpKind::Ult: return "bvult";
    case OpKind::Ule: return "bvule";
    case OpKind::Slt: return "bvslt";
    case OpKind::Sle: return "bvsle";
    default: return nullptr;
  }
}

/// Renders terms, referring to `names` for terms bound elsewhere (define-fun or let).
class Printer {
 public:
  Printer(const TermStore& store, const std::unordered_map<TermId, std::string>& names)
      : store_(store), names_(names) {}

  std::string ref(TermId id) const {
    if (auto it = names_.find(id); it != names_.end()) return it->second;
    return body(id);
  }

  /// Boolean-sorted rendering of a width-1 term (`(= x #b1)` unless a direct predicate exists).
  std::string boolean(TermId id) const {
    const Term& t = store_[id];
    if (t.kind == TermKind::Apply) {
      if (t.op.kind == OpKind::Eq) return "(= " + ref(t.args[0]) + " " + ref(t.args[1]) + ")";
      if (t.op.kind == OpKind::Not) return "(= " + ref(t.args[0]) + " #b0)";
    }
    return "(= " + ref(id) + " #b1)";
  }

  /// Expression for `id` itself, operands by reference.
  std::string body(TermId id) const {
    const Term& t = store_[id];
    switch (t.kind) {
      case TermKind::Input:
      case TermKind::Hole:
        return smt_symbol(store_, id);
      case TermKind::Const:
        return t.value.to_smtlib();
      case TermKind::Ite: {
        // A negated condition is spelled as a comparison with #b0 to keep the branch order.
        return "(ite " + boolean(t.args[0]) + " " + ref(t.args[1]) + " " + ref(t.args[2]) + ")";
      }
      case TermKind::Apply:
        break;
    }
    const auto& a = t.args;
    switch (t.op.kind) {
      case OpKind::Concat: {
        std::string s = ref(a.back());
        for (std::size_t i = a.size() - 1; i-- > 0;) s = "(concat " + ref(a[i]) + " " + s + ")";
        return s;
      }
      case OpKind::Extract:
        return "((_ extract " + std::to_string(t.op.hi) + " " + std::to_string(t.op.lo) + ") " + ref(a[0]) + ")";
      case OpKind::ZeroExtend:
        return "((_ zero_extend " + std::to_string(t.op.hi) + ") " + ref(a[0]) + ")";
      case OpKind::SignExtend:
        return "((_ sign_extend " + std::to_string(t.op.hi) + ") " + ref(a[0]) + ")";
      case OpKind::Eq:
        return "(ite (= " + ref(a[0]) + " " + ref(a[1]) + ") #b1 #b0)";
      case OpKind::Ult:
      case OpKind::Ule:
      case OpKind::Slt:
      case OpKind::Sle:
        return std::string("(ite (") + smt_op_name(t.op.kind) + " " + ref(a[0]) + " " + ref(a[1]) + ") #b1 #b0)";
      case OpKind::ReduceOr:
        return "(ite (= " + ref(a[0]) + " " + BitVec::zero(store_.width(a[0])).to_smtlib() + ") #b0 #b1)";
      case OpKind::ReduceAnd:
        return "(ite (= " + ref(a[0]) + " " + BitVec::ones(store_.width(a[0])).to_smtlib() + ") #b1 #b0)";
      case OpKind::Mux:
        return "(ite (= " + ref(a[0]) + " #b1) " + ref(a[1]) + " " + ref(a[2]) + ")";
      default: {
        std::string s = std::string("(") + smt_op_name(t.op.kind);
        for (TermId x : a) s += " " + ref(x);
        return s + ")";
      }
    }
  }

 private:
  const TermStore& store_;
  const std::unordered_map<TermId, std::string>& names_;
};

/// Reachable terms in topological order (operands first) and their parent counts.
void collect(const TermStore& store, const std::vector<TermId>& roots, std::vector<TermId>& order,
             std::unordered_map<TermId, std::uint32_t>& parents) {
  std::unordered_map<TermId, std::uint8_t> state;
  for (TermId root : roots) {
    std::vector<std::pair<TermId, bool>> stack{{root, false}};
    while (!stack.empty()) {
      auto [id, done] = stack.back();
      stack.pop_back();
      if (done) {
        state[id] = 2;
        order.push_back(id);
        continue;
      }
      if (state[id] != 0) continue;
      state[id] = 1;
      stack.push_back({id, true});
      const auto& args = store[id].args;
      for (auto it = args.rbegin(); it != args.rend(); ++it) {
        ++parents[*it];
        if (state[*it] == 0) stack.push_back({*it, false});
      }
    }
  }
}

bool is_compound(const TermStore& store, TermId id) {
  auto k = store[id].kind;
  return k == TermKind::Apply || k == TermKind::Ite;
}

}  // namespace

std::string smt_symbol(const TermStore& store, TermId leaf) {
  const Term& t = store[leaf];
  if (t.kind == TermKind::Input) return "i_" + sanitize(t.name) + "_" + std::to_string(t.time);
  if (t.kind == TermKind::Hole) return "h_" + sanitize(t.name);
  throw Error("term " + std::to_string(leaf) + " is not a symbol");
}

std::string term_to_smtlib(const TermStore& store, TermId term) {
  std::unordered_map<TermId, std::string> none;
  std::function<std::string(TermId)> inline_all = [&](TermId id) -> std::string {
    // Materialize operands first so Printer never needs names.
    std::unordered_map<TermId, std::string> names;
    for (TermId a : store[id].args) names.emplace(a, inline_all(a));
    return Printer(store, names).body(id);
  };
  return inline_all(term);
}

std::string emit_smtlib(const TermStore& store, const SmtCheck& check) {
  std::vector<TermId> roots = check.assertions;
  roots.insert(roots.end(), check.get_values.begin(), check.get_values.end());
  std::vector<TermId> order;
  std::unordered_map<TermId, std::uint32_t> parents;
  collect(store, roots, order, parents);

  std::set<TermId> universal(check.universal.begin(), check.universal.end());
  std::ostringstream os;
  os << "(set-option :produce-models true)\n";
  os << "(set-logic " << (universal.empty() ? "QF_BV" : "BV") << ")\n";

  std::vector<TermId> leaves;
  for (TermId id : order) {
    auto k = store[id].kind;
    if (k == TermKind::Input || k == TermKind::Hole) leaves.push_back(id);
  }
  std::sort(leaves.begin(), leaves.end());
  for (TermId id : check.get_values) {
    if (!std::binary_search(leaves.begin(), leaves.end(), id)) {
      leaves.insert(std::upper_bound(leaves.begin(), leaves.end(), id), id);
    }
  }
  for (TermId id : leaves) {
    if (universal.count(id)) continue;
    os << "(declare-const " << smt_symbol(store, id) << " " << sort_of(store.width(id)) << ")\n";
  }

  std::unordered_map<TermId, std::string> names;
  std::vector<TermId> shared;
  for (TermId id : order) {
    if (is_compound(store, id) && parents[id] > 1) shared.push_back(id);
  }

  if (universal.empty()) {
    for (TermId id : shared) {
      std::string name = "d" + std::to_string(id);
      os << "(define-fun " << name << " () " << sort_of(store.width(id)) << " " << Printer(store, names).body(id)
         << ")\n";
      names.emplace(id, name);
    }
    Printer printer(store, names);
    for (std::size_t i = 0; i < check.assertions.size(); ++i) {
      os << "(assert (! " << printer.boolean(check.assertions[i]) << " :named a" << i << "))\n";
    }
  } else {
    // Shared subterms may mention bound variables, so they become nested lets inside the quantifier.
    std::string binder;
    for (TermId id : leaves) {
      if (universal.count(id)) binder += "(" + smt_symbol(store, id) + " " + sort_of(store.width(id)) + ")";
    }
    std::string lets;
    std::string closing;
    for (TermId id : shared) {
      std::string name = "d" + std::to_string(id);
      lets += "(let ((" + name + " " + Printer(store, names).body(id) + ")) ";
      closing += ")";
      names.emplace(id, name);
    }
    Printer printer(store, names);
    std::string conj = "(and true";
    for (TermId a : check.assertions) conj += " " + printer.boolean(a);
    conj += ")";
    os << "(assert (! (forall (" << binder << ") " << lets << conj << closing << ") :named a0))\n";
  }

  os << "(check-sat)\n";
  if (!check.get_values.empty()) {
    os << "(get-value (";
    for (std::size_t i = 0; i < check.get_values.size(); ++i) {
      if (i) os << " ";
      os << smt_symbol(store, check.get_values[i]);
    }
    os << "))\n";
  }
  os << "(exit)\n";
  return os.str();
}

namespace {

struct Tokenizer {
  std::string_view text;
  std::size_t pos = 0;

  std::size_t line() const { return 1 + static_cast<std::size_t>(std::count(text.begin(), text.begin() + pos, '\n')); }

  std::optional<std::string> next() {
    while (pos < text.size() && std::isspace(static_cast<unsigned char>(text[pos]))) ++pos;
    if (pos >= text.size()) return std::nullopt;
    char ch = text[pos];
    if (ch == '(' || ch == ')') {
      ++pos;
      return std::string(1, ch);
    }
    if (ch == '|') {
      auto end = text.find('|', pos + 1);
      if (end == std::string_view::npos) throw ParseError(line(), "unterminated quoted symbol");
      std::string s(text.substr(pos + 1, end - pos - 1));
      pos = end + 1;
      return s;
    }
    std::size_t start = pos;
    while (pos < text.size() && !std::isspace(static_cast<unsigned char>(text[pos])) && text[pos] != '(' &&
           text[pos] != ')') {
      ++pos;
    }
    return std::string(text.substr(start, pos - start));
  }

  std::string expect() {
    auto t = next();
    if (!t) throw ParseError(line(), "unexpected end of model");
    return *t;
  }
};

BitVec parse_literal(Tokenizer& tk, const std::string& first) {
  auto digits_value = [&](std::string_view digits, unsigned base) {
    std::uint64_t v = 0;
    for (char d : digits) {
      unsigned x;
      if (d >= '0' && d <= '9') x = static_cast<unsigned>(d - '0');
      else if (d >= 'a' && d <= 'f') x = static_cast<unsigned>(d - 'a' + 10);
      else if (d >= 'A' && d <= 'F') x = static_cast<unsigned>(d - 'A' + 10);
      else throw ParseError(tk.line(), "bad digit in literal");
      if (x >= base) throw ParseError(tk.line(), "bad digit in literal");
      v = v * base + x;
    }
    return v;
  };
  if (first.rfind("#b", 0) == 0) {
    auto digits = std::string_view(first).substr(2);
    if (digits.empty() || digits.size() > BitVec::kMaxWidth) throw ParseError(tk.line(), "bad binary literal");
    return BitVec(static_cast<std::uint32_t>(digits.size()), digits_value(digits, 2));
  }
  if (first.rfind("#x", 0) == 0) {
    auto digits = std::string_view(first).substr(2);
    if (digits.empty() || digits.size() * 4 > BitVec::kMaxWidth) throw ParseError(tk.line(), "bad hex literal");
    return BitVec(static_cast<std::uint32_t>(digits.size() * 4), digits_value(digits, 16));
  }
  if (first == "(") {
    if (tk.expect() != "_") throw ParseError(tk.line(), "expected indexed literal");
    std::string bv = tk.expect();
    if (bv.rfind("bv", 0) != 0) throw ParseError(tk.line(), "expected (_ bvN w)");
    std::uint64_t v = digits_value(std::string_view(bv).substr(2), 10);
    std::uint64_t w = digits_value(tk.expect(), 10);
    if (tk.expect() != ")") throw ParseError(tk.line(), "expected )");
    if (w == 0 || w > BitVec::kMaxWidth) throw ParseError(tk.line(), "bad literal width");
    return BitVec(static_cast<std::uint32_t>(w), v);
  }
  throw ParseError(tk.line(), "unsupported value '" + first + "'");
}

}  // namespace

std::map<std::string, BitVec> parse_model(std::string_view text) {
  Tokenizer tk{text};
  std::map<std::string, BitVec> model;
  if (tk.expect() != "(") throw ParseError(tk.line(), "model must start with (");
  for (;;) {
    std::string tok = tk.expect();
    if (tok == ")") break;
    if (tok != "(") throw ParseError(tk.line(), "expected (symbol value)");
    std::string name = tk.expect();
    if (name == "(" || name == ")") throw ParseError(tk.line(), "expected symbol");
    model[name] = parse_literal(tk, tk.expect());
    if (tk.expect() != ")") throw ParseError(tk.line(), "expected ) after value");
  }
  return model;
}

}  // namespace sketchmap
