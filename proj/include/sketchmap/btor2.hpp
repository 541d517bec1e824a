#pragma once

#include <cstdint>
#include <map>
#include <string>
#include <string_view>
#include <vector>

#include "sketchmap/ir.hpp"
#include "sketchmap/primitives.hpp"

namespace sketchmap {

/// One non-comment line of a btor2 file.
struct Btor2Line {
  std::int64_t id = 0;
  std::string kind;                  // "sort", "input", "and", "slice", ...
  std::int64_t sort = 0;             // sort id referenced by the line (0 if none)
  std::uint32_t width = 0;           // width of that sort, or of the sort being declared
  std::vector<std::int64_t> args;    // operand ids; a negative id means bitwise negation
  std::vector<std::uint64_t> imms;   // slice hi/lo, extension amount, constant value
  std::string symbol;
  std::size_t line = 0;
};

/// Parses btor2 text; `;` starts a comment. Throws ParseError (bad syntax,
/// undefined or non-increasing ids) or Unsupported (arrays, bad/constraint,
/// fairness and justice properties, unknown operators).
std::vector<Btor2Line> parse_btor2(std::string_view text);

struct ImportedModel {
  std::string name;
  std::vector<std::pair<std::string, std::uint32_t>> inputs;
  std::string output;  // output symbol, or "out" when unnamed
  Prog semantics;
  /// State symbol (or "state<id>") -> id of the Reg standing for it.
  std::map<std::string, Id> state_regs;
};

/// 1:1 translation into a behavioral program whose root is the single output.
/// One btor2 transition is one clock cycle. Throws MissingInit, MultipleOutputs,
/// or Unsupported for states without a next function or with non-constant init.
ImportedModel to_prog(const std::vector<Btor2Line>& lines, const std::string& name = "model");

/// Reads and imports a file; the model is named after the file stem.
ImportedModel import_btor2_file(const std::string& path);

/// Imported file as a primitive: every btor2 input becomes an input port
/// (declared internal data is matched by name when instantiated).
PrimitiveModel primitive_from_btor2(const std::string& path);

}  // namespace sketchmap
