#pragma once

#include <cstdint>
#include <map>
#include <memory>
#include <string>
#include <vector>

#include "sketchmap/ir.hpp"
#include "sketchmap/term.hpp"

namespace sketchmap {

/// How a sketch hole is represented in the term graph.
struct HoleEncoding {
  std::string label;
  TermId symbol = 0;         // hole term (the value itself, or the selector of a choice)
  std::uint32_t width = 1;   // width of `symbol`
  bool choice = false;
  std::size_t alternatives = 0;
};

/// Terms of one program unrolled over cycles 0..t, sharing a store with other programs.
struct SymbolicTrace {
  std::vector<TermId> root;                    // one term per cycle
  std::map<std::string, HoleEncoding> holes;   // every hole met while unrolling
  std::vector<TermId> side_constraints;        // width-1 terms that must equal 1
};

/// Symbolic evaluation of `p` at cycles 0..t. Variables become input symbols
/// named after the variable and stamped with the cycle; constant holes become
/// hole symbols; choice holes become an ite chain keyed by a selector symbol
/// of ceil(log2 k) bits (at least one) constrained to stay below k.
SymbolicTrace symbolic_interp(const Prog& p, std::uint32_t t, TermStore& store);

/// Convenience overload returning only the per-cycle root terms.
std::vector<TermId> symbolic_interp(const Prog& p, std::uint32_t t, const std::shared_ptr<TermStore>& store);

/// Width-1 term for a constraint program whose free variables name holes.
TermId constraint_term(const Prog& constraint, TermStore& store);

/// Equality of spec and sketch at cycles t..t+c.
struct EquivalenceQuery {
  std::shared_ptr<TermStore> store;
  std::uint32_t t = 0;
  std::uint32_t c = 0;
  std::vector<TermId> spec_terms;    // cycles t..t+c
  std::vector<TermId> sketch_terms;  // cycles t..t+c
  std::vector<TermId> input_symbols;
  std::vector<TermId> hole_symbols;
  std::vector<TermId> side_constraints;
  std::map<std::string, HoleEncoding> holes;
  /// Sources, kept so that results can be substituted and re-checked.
  Prog spec;
  Sketch sketch;
};

/// Throws FreeVarMismatch when the free variables differ, WidthError when the
/// root widths (or the widths of a shared variable) differ, and Error when the
/// spec contains holes. Well-formedness errors propagate.
EquivalenceQuery build_query(const Prog& spec, const Sketch& sketch, std::uint32_t t, std::uint32_t c);

}  // namespace sketchmap
