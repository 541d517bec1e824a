#include "sketchmap/sexpr.hpp"

#include <cctype>

#include "sketchmap/errors.hpp"

namespace sketchmap {

std::string SExpr::to_string() const {
  if (is_atom) return atom;
  std::string out = "(";
  for (std::size_t i = 0; i < items.size(); ++i) {
    if (i) out += ' ';
    out += items[i].to_string();
  }
  return out + ")";
}

std::vector<SExpr> parse_sexprs(std::string_view text) {
  std::vector<SExpr> top;
  std::vector<SExpr> stack;
  std::size_t line = 1;
  auto emit = [&](SExpr e) {
    if (stack.empty()) {
      top.push_back(std::move(e));
    } else {
      stack.back().items.push_back(std::move(e));
    }
  };
  for (std::size_t i = 0; i < text.size();) {
    char c = text[i];
    if (c == '\n') {
      ++line;
      ++i;
    } else if (std::isspace(static_cast<unsigned char>(c))) {
      ++i;
    } else if (c == ';') {
      while (i < text.size() && text[i] != '\n') ++i;
    } else if (c == '(') {
      SExpr list;
      list.is_atom = false;
      list.line = line;
      stack.push_back(std::move(list));
      ++i;
    } else if (c == ')') {
      if (stack.empty()) throw ParseError(line, "unexpected ')'");
      SExpr done = std::move(stack.back());
      stack.pop_back();
      emit(std::move(done));
      ++i;
    } else {
      std::size_t j = i;
      while (j < text.size() && !std::isspace(static_cast<unsigned char>(text[j])) && text[j] != '(' &&
             text[j] != ')' && text[j] != ';') {
        ++j;
      }
      SExpr atom;
      atom.atom = std::string(text.substr(i, j - i));
      atom.line = line;
      emit(std::move(atom));
      i = j;
    }
  }
  if (!stack.empty()) throw ParseError(stack.back().line, "unclosed '('");
  return top;
}

SExpr parse_sexpr(std::string_view text) {
  auto all = parse_sexprs(text);
  if (all.size() != 1) {
    throw ParseError(all.empty() ? 1 : all[1].line, "expected exactly one expression, found " + std::to_string(all.size()));
  }
  return std::move(all[0]);
}

}  // namespace sketchmap
