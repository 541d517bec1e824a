#pragma once

#include <cstdint>
#include <functional>
#include <map>
#include <string>
#include <vector>

#include "sketchmap/ir.hpp"
#include "sketchmap/solver.hpp"
#include "sketchmap/symbolic.hpp"

namespace sketchmap {

enum class SynthesisStatus { Success, Unsat, Timeout };

std::string to_string(SynthesisStatus s);

struct SynthesisResult {
  SynthesisStatus status = SynthesisStatus::Timeout;
  Prog program;                          // Success only: hole-free completion
  std::map<std::string, BitVec> model;   // hole label -> value (selector index for choice holes)
  std::string solver;                    // backend that answered the deciding query
  double seconds = 0;
  std::size_t iterations = 0;
};

struct CegisOptions {
  double timeout = 120.0;
  /// Discharge the exists-forall query in one quantified call instead of looping.
  bool quantified = false;
  /// Called with each new counterexample, keyed by input symbol.
  std::function<void(const std::map<TermId, BitVec>&)> on_counterexample;
};

/// Counterexample-guided search for a hole assignment making the query hold.
/// Throws AllSolversFailed when every backend fails and SoundnessFailure if a
/// result disagrees with the concrete interpreter.
SynthesisResult cegis(const EquivalenceQuery& q, const std::vector<SolverConfig>& solvers,
                      const CegisOptions& options = {});

/// build_query followed by cegis.
SynthesisResult synthesize(const Prog& spec, const Sketch& sketch, std::uint32_t t, std::uint32_t c,
                           const std::vector<SolverConfig>& solvers, const CegisOptions& options = {});

/// Hole assignment (for substitute_holes) described by a model.
std::map<std::string, Node> assignment_from_model(const Sketch& sketch, const std::map<std::string, BitVec>& model);

}  // namespace sketchmap
