#pragma once

#include <cstdint>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "sketchmap/ir.hpp"

namespace sketchmap {

/// A behavioral design written in the s-expression DSL:
///
///   (spec (inputs (a 16) (b 16) (c 16) (d 16))
///         (pipeline 2)
///         (and (mul (add a b) c) d))
///
/// Operators: add sub mul and or xor not eq ult mux concat, plus
/// (extract hi lo e), (zext k e) and literals (bv value width).
/// `(pipeline N)` is optional and appends N zero-initialized registers at the root.
struct SpecDocument {
  std::vector<std::pair<std::string, std::uint32_t>> inputs;
  std::uint32_t pipeline_depth = 0;
  Prog prog;
};

/// Throws ParseError for malformed documents, unknown operators or names,
/// and WidthError when an operator's width rule fails.
SpecDocument parse_spec_document(std::string_view text);

/// The program of parse_spec_document.
Prog parse_spec(std::string_view text);

/// Reads and parses a file; the ParseError message names the file.
SpecDocument load_spec(const std::string& path);

}  // namespace sketchmap
