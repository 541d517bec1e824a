#include "sketchmap/spec_dsl.hpp"

#include <fstream>
#include <map>
#include <sstream>

#include "sketchmap/errors.hpp"
#include "sketchmap/sexpr.hpp"
#include "sketchmap/well_formed.hpp"

namespace sketchmap {

namespace {

std::uint64_t number(const SExpr& e, const std::string& what) {
  if (!e.is_atom || e.atom.empty() || e.atom.find_first_not_of("0123456789") != std::string::npos) {
    throw ParseError(e.line, what + " must be a decimal number, got '" + e.to_string() + "'");
  }
  try {
    return std::stoull(e.atom);
  } catch (const std::exception&) {
    throw ParseError(e.line, what + " is out of range");
  }
}

std::uint32_t small(const SExpr& e, const std::string& what) {
  auto v = number(e, what);
  if (v > BitVec::kMaxWidth) throw ParseError(e.line, what + " must be at most 64");
  return static_cast<std::uint32_t>(v);
}

class ExprReader {
 public:
  ExprReader(ProgBuilder& b, const std::map<std::string, std::pair<Id, std::uint32_t>>& vars) : b_(b), vars_(vars) {}

  /// Node id and width.
  std::pair<Id, std::uint32_t> read(const SExpr& e) {
    if (e.is_atom) {
      auto it = vars_.find(e.atom);
      if (it == vars_.end()) throw ParseError(e.line, "unknown input '" + e.atom + "'");
      return it->second;
    }
    if (e.items.empty() || !e.items[0].is_atom) throw ParseError(e.line, "expected (operator operands...)");
    const std::string& head = e.items[0].atom;
    if (head == "bv") {
      expect_size(e, 3);
      std::uint32_t w = small(e.items[2], "literal width");
      if (w == 0) throw ParseError(e.line, "literal width must be positive");
      std::uint64_t v = number(e.items[1], "literal value");
      if (w < 64 && (v >> w) != 0) throw ParseError(e.line, "literal " + std::to_string(v) + " does not fit in " + std::to_string(w) + " bits");
      return {b_.bv(BitVec(w, v)), w};
    }
    if (head == "extract") {
      expect_size(e, 4);
      return apply(e, Operator::extract(small(e.items[1], "extract bound"), small(e.items[2], "extract bound")),
                   {e.items[3]});
    }
    if (head == "zext") {
      expect_size(e, 3);
      return apply(e, Operator::zero_extend(small(e.items[1], "extension")), {e.items[2]});
    }
    static const std::map<std::string, std::pair<OpKind, std::size_t>> plain = {
        {"add", {OpKind::Add, 2}}, {"sub", {OpKind::Sub, 2}}, {"mul", {OpKind::Mul, 2}}, {"and", {OpKind::And, 2}},
        {"or", {OpKind::Or, 2}},   {"xor", {OpKind::Xor, 2}}, {"not", {OpKind::Not, 1}}, {"eq", {OpKind::Eq, 2}},
        {"ult", {OpKind::Ult, 2}}, {"mux", {OpKind::Mux, 3}}, {"concat", {OpKind::Concat, 0}}};
    auto it = plain.find(head);
    if (it == plain.end()) throw ParseError(e.line, "unknown operator '" + head + "'");
    auto [kind, arity] = it->second;
    std::vector<SExpr> args(e.items.begin() + 1, e.items.end());
    if (arity ? args.size() != arity : args.empty()) {
      throw ParseError(e.line, head + " takes " + (arity ? std::to_string(arity) : std::string("at least one")) +
                                   " operand" + (arity == 1 ? "" : "s"));
    }
    return apply(e, Operator{kind}, args);
  }

 private:
  ProgBuilder& b_;
  const std::map<std::string, std::pair<Id, std::uint32_t>>& vars_;

  static void expect_size(const SExpr& e, std::size_t n) {
    if (e.items.size() != n) throw ParseError(e.line, "(" + e.items[0].atom + " ...) takes " + std::to_string(n - 1) + " arguments");
  }

  std::pair<Id, std::uint32_t> apply(const SExpr& e, const Operator& op, const std::vector<SExpr>& operands) {
    std::vector<Id> ids;
    std::vector<std::uint32_t> widths;
    for (const auto& x : operands) {
      auto [id, w] = read(x);
      ids.push_back(id);
      widths.push_back(w);
    }
    std::uint32_t w = 0;
    try {
      w = result_width(op, widths);
    } catch (const WidthError& err) {
      throw WidthError("line " + std::to_string(e.line) + ": " + err.what());
    }
    return {b_.op(op, ids), w};
  }
};

}  // namespace

SpecDocument parse_spec_document(std::string_view text) {
  SExpr doc = parse_sexpr(text);
  if (!doc.has_head("spec")) throw ParseError(doc.line, "expected (spec ...)");
  SpecDocument out;
  IdAllocator ids(1);
  ProgBuilder b(ids);
  std::map<std::string, std::pair<Id, std::uint32_t>> vars;
  const SExpr* expr = nullptr;
  bool seen_inputs = false;
  bool seen_pipeline = false;
  for (std::size_t i = 1; i < doc.items.size(); ++i) {
    const SExpr& item = doc.items[i];
    if (item.has_head("inputs")) {
      if (seen_inputs) throw ParseError(item.line, "duplicate (inputs ...)");
      seen_inputs = true;
      for (std::size_t k = 1; k < item.items.size(); ++k) {
        const SExpr& decl = item.items[k];
        if (!decl.is_list() || decl.items.size() != 2 || !decl.items[0].is_atom) {
          throw ParseError(decl.line, "input declarations look like (name width)");
        }
        const std::string& name = decl.items[0].atom;
        std::uint32_t w = small(decl.items[1], "input width");
        if (w == 0) throw ParseError(decl.line, "input width must be positive");
        if (vars.count(name)) throw ParseError(decl.line, "duplicate input '" + name + "'");
        vars[name] = {b.var(name, w), w};
        out.inputs.push_back({name, w});
      }
    } else if (item.has_head("pipeline")) {
      if (seen_pipeline) throw ParseError(item.line, "duplicate (pipeline ...)");
      seen_pipeline = true;
      if (item.items.size() != 2) throw ParseError(item.line, "(pipeline N) takes one number");
      auto n = number(item.items[1], "pipeline depth");
      if (n > 64) throw ParseError(item.line, "pipeline depth must be at most 64");
      out.pipeline_depth = static_cast<std::uint32_t>(n);
    } else {
      if (expr) throw ParseError(item.line, "more than one expression");
      expr = &item;
    }
  }
  if (!seen_inputs) throw ParseError(doc.line, "missing (inputs ...)");
  if (!expr) throw ParseError(doc.line, "missing expression");
  auto [root, w] = ExprReader(b, vars).read(*expr);
  for (std::uint32_t k = 0; k < out.pipeline_depth; ++k) root = b.reg(root, BitVec::zero(w));
  out.prog = b.build(root);
  check_well_formed(out.prog);
  return out;
}

Prog parse_spec(std::string_view text) { return parse_spec_document(text).prog; }

SpecDocument load_spec(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw Error("cannot read " + path);
  std::stringstream ss;
  ss << in.rdbuf();
  try {
    return parse_spec_document(ss.str());
  } catch (const ParseError& e) {
    throw ParseError(e.line(), path + ": " + std::string(e.what()).substr(std::string("line ").size() + std::to_string(e.line()).size() + 2));
  }
}

}  // namespace sketchmap
