#pragma once

#include <cstddef>
#include <string>
#include <string_view>
#include <vector>

namespace sketchmap {

/// Atom or parenthesized list; `;` comments run to end of line.
struct SExpr {
  bool is_atom = true;
  std::string atom;
  std::vector<SExpr> items;
  std::size_t line = 1;

  bool is_list() const { return !is_atom; }
  /// True for a list whose first item is the atom `head`.
  bool has_head(std::string_view head) const {
    return is_list() && !items.empty() && items[0].is_atom && items[0].atom == head;
  }
  std::string to_string() const;
};

/// All top-level expressions in `text`. Throws ParseError on unbalanced parentheses.
std::vector<SExpr> parse_sexprs(std::string_view text);
/// Exactly one top-level expression.
SExpr parse_sexpr(std::string_view text);

}  // namespace sketchmap
