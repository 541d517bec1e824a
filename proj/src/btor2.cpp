#include "sketchmap/btor2.hpp"

#include <charconv>
#include <optional>
#include <filesystem>
#include <fstream>
#include <set>
#include <sstream>
#include <unordered_map>

#include "sketchmap/errors.hpp"
#include "sketchmap/well_formed.hpp"

namespace sketchmap {

namespace {

enum class Shape { Sort, Input, State, Init, Next, Output, Const, Unary, Binary, Ternary, Slice, Extend };

const std::unordered_map<std::string, Shape>& shapes() {
  static const std::unordered_map<std::string, Shape> table = {
      {"sort", Shape::Sort},     {"input", Shape::Input},   {"state", Shape::State},   {"init", Shape::Init},
      {"next", Shape::Next},     {"output", Shape::Output}, {"const", Shape::Const},   {"constd", Shape::Const},
      {"consth", Shape::Const},  {"zero", Shape::Const},    {"one", Shape::Const},     {"ones", Shape::Const},
      {"not", Shape::Unary},     {"neg", Shape::Unary},     {"redor", Shape::Unary},   {"redand", Shape::Unary},
      {"and", Shape::Binary},    {"or", Shape::Binary},     {"xor", Shape::Binary},    {"nand", Shape::Binary},
      {"nor", Shape::Binary},    {"xnor", Shape::Binary},   {"add", Shape::Binary},    {"sub", Shape::Binary},
      {"mul", Shape::Binary},    {"eq", Shape::Binary},     {"neq", Shape::Binary},    {"ult", Shape::Binary},
      {"ulte", Shape::Binary},   {"ugt", Shape::Binary},    {"ugte", Shape::Binary},   {"slt", Shape::Binary},
      {"slte", Shape::Binary},   {"sgt", Shape::Binary},    {"sgte", Shape::Binary},   {"sll", Shape::Binary},
      {"srl", Shape::Binary},    {"sra", Shape::Binary},    {"concat", Shape::Binary}, {"ite", Shape::Ternary},
      {"slice", Shape::Slice},   {"uext", Shape::Extend},   {"sext", Shape::Extend},
  };
  return table;
}

const std::set<std::string>& unsupported_kinds() {
  static const std::set<std::string> kinds = {"bad", "constraint", "fair", "justice", "read", "write",
                                              "udiv", "sdiv", "urem", "srem", "smod", "rol", "ror",
                                              "inc", "dec", "redxor", "uaddo", "saddo", "umulo", "smulo",
                                              "usubo", "ssubo", "sdivo", "implies", "iff"};
  return kinds;
}

std::uint64_t parse_number(std::string_view tok, int base, std::size_t line) {
  std::uint64_t v = 0;
  auto [ptr, ec] = std::from_chars(tok.data(), tok.data() + tok.size(), v, base);
  if (ec != std::errc() || ptr != tok.data() + tok.size()) {
    throw ParseError(line, "bad number '" + std::string(tok) + "'");
  }
  return v;
}

std::int64_t parse_ref(std::string_view tok, std::size_t line) {
  bool neg = !tok.empty() && tok[0] == '-';
  std::uint64_t v = parse_number(neg ? tok.substr(1) : tok, 10, line);
  if (v == 0) throw ParseError(line, "id 0 is not valid");
  return neg ? -static_cast<std::int64_t>(v) : static_cast<std::int64_t>(v);
}

}  // namespace

std::vector<Btor2Line> parse_btor2(std::string_view text) {
  std::vector<Btor2Line> out;
  std::unordered_map<std::int64_t, std::uint32_t> sort_width;  // sort id -> width
  std::unordered_map<std::int64_t, std::uint32_t> node_width;  // node id -> width
  std::int64_t last_id = 0;
  std::size_t line_no = 0;
  std::size_t pos = 0;
  while (pos <= text.size()) {
    auto end = text.find('\n', pos);
    if (end == std::string_view::npos) end = text.size();
    std::string_view raw = text.substr(pos, end - pos);
    pos = end + 1;
    ++line_no;
    if (auto c = raw.find(';'); c != std::string_view::npos) raw = raw.substr(0, c);
    std::vector<std::string> tok;
    {
      std::istringstream is{std::string(raw)};
      std::string t;
      while (is >> t) tok.push_back(t);
    }
    if (tok.empty()) {
      if (end == text.size()) break;
      continue;
    }
    if (tok.size() < 2) throw ParseError(line_no, "expected '<id> <kind> ...'");
    Btor2Line l;
    l.line = line_no;
    l.id = static_cast<std::int64_t>(parse_number(tok[0], 10, line_no));
    if (l.id <= last_id) throw ParseError(line_no, "ids must be strictly increasing");
    last_id = l.id;
    l.kind = tok[1];
    if (unsupported_kinds().count(l.kind)) throw Unsupported("line " + std::to_string(line_no) + ": " + l.kind);
    auto it = shapes().find(l.kind);
    if (it == shapes().end()) throw ParseError(line_no, "unknown kind '" + l.kind + "'");
    const Shape shape = it->second;

    std::size_t k = 2;
    auto next_tok = [&]() -> const std::string& {
      if (k >= tok.size()) throw ParseError(line_no, "missing operand for " + l.kind);
      return tok[k++];
    };
    auto sort_ref = [&] {
      l.sort = parse_ref(next_tok(), line_no);
      auto s = sort_width.find(l.sort);
      if (s == sort_width.end()) throw ParseError(line_no, "undefined sort " + std::to_string(l.sort));
      l.width = s->second;
    };
    auto operand = [&] {
      std::int64_t r = parse_ref(next_tok(), line_no);
      std::int64_t target = r < 0 ? -r : r;
      if (!node_width.count(target)) throw ParseError(line_no, "reference to undefined id " + std::to_string(target));
      l.args.push_back(r);
    };

    switch (shape) {
      case Shape::Sort: {
        const std::string& what = next_tok();
        if (what == "array") throw Unsupported("line " + std::to_string(line_no) + ": array sort");
        if (what != "bitvec") throw ParseError(line_no, "unknown sort '" + what + "'");
        std::uint64_t w = parse_number(next_tok(), 10, line_no);
        if (w == 0 || w > BitVec::kMaxWidth) throw ParseError(line_no, "unsupported bitvector width");
        l.width = static_cast<std::uint32_t>(w);
        sort_width[l.id] = l.width;
        break;
      }
      case Shape::Input:
      case Shape::State:
        sort_ref();
        break;
      case Shape::Init:
      case Shape::Next:
        sort_ref();
        operand();
        operand();
        break;
      case Shape::Output:
        operand();
        break;
      case Shape::Const: {
        sort_ref();
        if (l.kind == "const" || l.kind == "constd" || l.kind == "consth") {
          std::string digits = next_tok();
          bool neg = l.kind == "constd" && !digits.empty() && digits[0] == '-';
          if (neg) digits = digits.substr(1);
          int base = l.kind == "const" ? 2 : l.kind == "constd" ? 10 : 16;
          std::uint64_t v = parse_number(digits, base, line_no);
          if (neg) v = ~v + 1;
          l.imms.push_back(BitVec::truncate(l.width, v).value());
        } else {
          std::uint64_t v = l.kind == "zero" ? 0 : l.kind == "one" ? 1 : BitVec::mask(l.width);
          l.imms.push_back(v);
        }
        break;
      }
      case Shape::Unary:
        sort_ref();
        operand();
        break;
      case Shape::Binary:
        sort_ref();
        operand();
        operand();
        break;
      case Shape::Ternary:
        sort_ref();
        operand();
        operand();
        operand();
        break;
      case Shape::Slice:
        sort_ref();
        operand();
        l.imms.push_back(parse_number(next_tok(), 10, line_no));
        l.imms.push_back(parse_number(next_tok(), 10, line_no));
        break;
      case Shape::Extend:
        sort_ref();
        operand();
        l.imms.push_back(parse_number(next_tok(), 10, line_no));
        break;
    }
    if (k < tok.size()) l.symbol = tok[k++];
    if (k < tok.size()) throw ParseError(line_no, "trailing tokens");
    if (shape != Shape::Sort) node_width[l.id] = l.width;
    out.push_back(std::move(l));
    if (end == text.size()) break;
  }
  return out;
}

ImportedModel to_prog(const std::vector<Btor2Line>& lines, const std::string& name) {
  IdAllocator ids(1);
  ProgBuilder b(ids);
  ImportedModel model;
  model.name = name;

  std::unordered_map<std::int64_t, Id> node;             // btor id -> program id
  std::unordered_map<std::int64_t, const Btor2Line*> by_id;
  std::unordered_map<std::int64_t, std::optional<BitVec>> init;
  std::unordered_map<std::int64_t, std::int64_t> next;   // state -> value ref
  std::vector<const Btor2Line*> states;
  std::vector<const Btor2Line*> outputs;
  std::set<std::string> names;

  auto fresh_name = [&](const Btor2Line& l, const std::string& prefix) {
    std::string n = l.symbol.empty() ? prefix + std::to_string(l.id) : l.symbol;
    if (!names.insert(n).second) throw ParseError(l.line, "duplicate symbol " + n);
    return n;
  };
  auto ref = [&](std::int64_t r) -> Id {
    Id base = node.at(r < 0 ? -r : r);
    return r < 0 ? b.op(OpKind::Not, {base}) : base;
  };

  for (const auto& l : lines) {
    by_id[l.id] = &l;
    const std::string& k = l.kind;
    if (k == "sort") continue;
    if (k == "input") {
      std::string n = fresh_name(l, "input");
      node[l.id] = b.var(n, l.width);
      model.inputs.push_back({n, l.width});
    } else if (k == "state") {
      node[l.id] = b.reserve();
      states.push_back(&l);
    } else if (k == "init" || k == "next") {
      std::int64_t state = l.args[0];
      auto s = by_id.find(state);
      if (state < 0 || s == by_id.end() || s->second->kind != "state") {
        throw ParseError(l.line, k + " must refer to a state");
      }
      if (k == "init") {
        const Btor2Line* v = by_id.at(l.args[1] < 0 ? -l.args[1] : l.args[1]);
        static const std::set<std::string> constants = {"const", "constd", "consth", "zero", "one", "ones"};
        if (!constants.count(v->kind)) {
          throw Unsupported("line " + std::to_string(l.line) + ": init value must be a constant");
        }
        std::uint64_t value = v->imms.at(0);
        if (l.args[1] < 0) value = ~value;
        init[state] = BitVec::truncate(l.width, value);
      } else {
        next[state] = l.args[1];
      }
    } else if (k == "output") {
      outputs.push_back(&l);
    } else if (k == "const" || k == "constd" || k == "consth" || k == "zero" || k == "one" || k == "ones") {
      node[l.id] = b.bv(BitVec(l.width, l.imms[0]));
    } else if (k == "slice") {
      node[l.id] = b.op(Operator::extract(static_cast<std::uint32_t>(l.imms[0]), static_cast<std::uint32_t>(l.imms[1])),
                        {ref(l.args[0])});
    } else if (k == "uext" || k == "sext") {
      Id x = ref(l.args[0]);
      auto amount = static_cast<std::uint32_t>(l.imms[0]);
      node[l.id] = amount == 0 ? x
                               : b.op(k == "uext" ? Operator::zero_extend(amount) : Operator::sign_extend(amount), {x});
    } else if (k == "ite") {
      node[l.id] = b.op(OpKind::Mux, {ref(l.args[0]), ref(l.args[1]), ref(l.args[2])});
    } else if (l.args.size() == 1) {
      static const std::unordered_map<std::string, OpKind> unary = {
          {"not", OpKind::Not}, {"neg", OpKind::Neg}, {"redor", OpKind::ReduceOr}, {"redand", OpKind::ReduceAnd}};
      node[l.id] = b.op(unary.at(k), {ref(l.args[0])});
    } else {
      static const std::unordered_map<std::string, OpKind> direct = {
          {"and", OpKind::And},   {"or", OpKind::Or},     {"xor", OpKind::Xor},   {"add", OpKind::Add},
          {"sub", OpKind::Sub},   {"mul", OpKind::Mul},   {"eq", OpKind::Eq},     {"ult", OpKind::Ult},
          {"ulte", OpKind::Ule},  {"slt", OpKind::Slt},   {"slte", OpKind::Sle},  {"sll", OpKind::Shl},
          {"srl", OpKind::Lshr},  {"sra", OpKind::Ashr},  {"concat", OpKind::Concat}};
      static const std::unordered_map<std::string, OpKind> swapped = {
          {"ugt", OpKind::Ult}, {"ugte", OpKind::Ule}, {"sgt", OpKind::Slt}, {"sgte", OpKind::Sle}};
      static const std::unordered_map<std::string, OpKind> negated = {
          {"nand", OpKind::And}, {"nor", OpKind::Or}, {"xnor", OpKind::Xor}, {"neq", OpKind::Eq}};
      Id x = ref(l.args[0]);
      Id y = ref(l.args[1]);
      if (auto d = direct.find(k); d != direct.end()) {
        node[l.id] = b.op(d->second, {x, y});
      } else if (auto s = swapped.find(k); s != swapped.end()) {
        node[l.id] = b.op(s->second, {y, x});
      } else {
        node[l.id] = b.op(OpKind::Not, {b.op(negated.at(k), {x, y})});
      }
    }
  }

  for (const auto* s : states) {
    std::string n = fresh_name(*s, "state");
    auto i = init.find(s->id);
    if (i == init.end() || !i->second) throw MissingInit("state " + n + " (line " + std::to_string(s->line) + ") has no init");
    auto nx = next.find(s->id);
    if (nx == next.end()) {
      throw Unsupported("state " + n + " (line " + std::to_string(s->line) + ") has no next function");
    }
    b.set(node.at(s->id), RegNode{ref(nx->second), *i->second});
    model.state_regs[n] = node.at(s->id);
  }

  if (outputs.size() != 1) {
    throw MultipleOutputs("expected exactly one output, found " + std::to_string(outputs.size()));
  }
  const Btor2Line& out = *outputs[0];
  model.output = out.symbol.empty() ? "out" : out.symbol;
  model.semantics = b.build(ref(out.args[0]));
  // Reject files whose declared sorts disagree with the operator width rules.
  try {
    check_well_formed(model.semantics);
  } catch (const WellFormednessError& e) {
    throw ParseError(out.line, std::string("imported model is not well-formed: ") + e.what());
  }
  auto widths = node_widths(model.semantics);
  for (const auto& l : lines) {
    auto it = node.find(l.id);
    if (it == node.end() || l.kind == "sort") continue;
    if (widths.count(it->second) && widths.at(it->second) != l.width) {
      throw ParseError(l.line, "declared sort width " + std::to_string(l.width) + " does not match operands");
    }
  }
  return model;
}

ImportedModel import_btor2_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw Error("cannot open " + path);
  std::stringstream ss;
  ss << in.rdbuf();
  return to_prog(parse_btor2(ss.str()), std::filesystem::path(path).stem().string());
}

PrimitiveModel primitive_from_btor2(const std::string& path) {
  ImportedModel imported = import_btor2_file(path);
  PrimitiveModel m;
  m.name = imported.name;
  for (const auto& [name, width] : imported.inputs) m.ports.push_back({name, PortDirection::Input, width});
  m.ports.push_back({imported.output, PortDirection::Output, node_widths(imported.semantics).at(imported.semantics.root)});
  m.outputs = {imported.output};
  m.semantics = std::move(imported.semantics);
  return m;
}

}  // namespace sketchmap
