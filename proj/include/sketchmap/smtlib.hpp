#pragma once

#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "sketchmap/bitvec.hpp"
#include "sketchmap/term.hpp"

namespace sketchmap {

/// SMT-LIB symbol for an input or hole term: `i_<name>_<cycle>` or `h_<label>`.
/// Characters outside [A-Za-z0-9] are escaped as `_XX` so distinct names stay distinct.
std::string smt_symbol(const TermStore& store, TermId leaf);

/// One satisfiability check: every assertion is a width-1 term required to be 1.
struct SmtCheck {
  std::vector<TermId> assertions;
  /// Leaves whose values are requested on sat (hole or input symbols).
  std::vector<TermId> get_values;
  /// Leaves to be universally quantified instead of declared (quantified mode).
  std::vector<TermId> universal;
};

/// QF_BV script (BV when `universal` is nonempty): declarations, shared
/// subterms as define-fun, named assertions, check-sat, get-value, exit.
/// Output depends only on the terms, so identical checks give identical bytes.
std::string emit_smtlib(const TermStore& store, const SmtCheck& check);

/// SMT-LIB text of a single term, subterms inlined.
std::string term_to_smtlib(const TermStore& store, TermId term);

/// Parses a get-value response such as `((x #b0110) (y #x6))`.
/// Throws ParseError on malformed input.
std::map<std::string, BitVec> parse_model(std::string_view text);

}  // namespace sketchmap
