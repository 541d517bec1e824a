#pragma once

#include <cstdint>
#include <optional>
#include <ostream>
#include <string>

#include "sketchmap/synth.hpp"

namespace sketchmap {

/// Process exit statuses shared by every subcommand.
enum ExitCode : int {
  kExitSuccess = 0,
  kExitFailure = 1,  // usage, IO, parse and every other error
  kExitUnsat = 2,
  kExitTimeout = 3,
  kExitSoundness = 4,  // a synthesized result failed simulation
};

struct MapOptions {
  std::string spec_path;
  std::string template_name;
  std::string arch_path;
  double timeout = 120.0;
  /// Defaults to the design file's own pipeline depth.
  std::optional<std::uint32_t> pipeline_depth;
  std::uint32_t clock_cycles = 2;
  /// Comma-separated solver names or a solver config file; empty means every known solver on PATH.
  std::string solvers;
  std::string out_path;
  std::string out_format = "verilog";  // or "json"
  std::string module_name = "top";
};

struct MapOutcome {
  int exit_code = kExitFailure;
  std::optional<SynthesisStatus> status;
  std::string solver;
  double seconds = 0;
  /// Error text for kExitFailure.
  std::string message;
  /// Emitted text on success (also written to out_path when set).
  std::string artifact;
};

/// parse spec -> generate sketch -> synthesize -> fill holes -> emit.
/// Never throws; errors become kExitFailure with a message.
MapOutcome run_map(const MapOptions& options);

/// Exit status for a synthesis verdict.
int exit_code_for(SynthesisStatus status);

}  // namespace sketchmap
