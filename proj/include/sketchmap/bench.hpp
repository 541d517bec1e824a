#pragma once

#include <cstdint>
#include <functional>
#include <string>
#include <vector>

#include "sketchmap/ir.hpp"

namespace sketchmap {

/// One expression shape of the microbenchmark family.
///
/// Ternary shapes are ((a pre b) * c) post d with pre in {add, sub} and post in
/// {and, or, add, sub, xor}. The rest are (a * b) and ((a * b) post c) with post in {add, sub}.
struct BenchShape {
  std::string name;  // e.g. "add_mul_and", "mul", "mul_sub"
  std::string pre;   // "" when absent
  std::string post;  // "" when absent
  std::uint32_t operands = 2;
};

/// The 13 shapes in a fixed order.
const std::vector<BenchShape>& bench_shapes();

struct BenchEntry {
  std::string name;  // <shape>_w<width>_d<depth>
  std::string file;  // relative to the corpus directory
  BenchShape shape;
  std::uint32_t width = 8;
  std::uint32_t depth = 0;
  bool expressible = false;
};

/// Spec DSL text for a shape at a width and pipeline depth.
std::string bench_spec_text(const BenchShape& shape, std::uint32_t width, std::uint32_t depth);

/// Whether one MiniDSP can compute the shape at the depth: the pre-adder adds or
/// subtracts, the ALU applies one of add, sub, and, or, xor, and at most three
/// optional register stages (input, product, output) are available.
bool minidsp_expressible(const BenchShape& shape, std::uint32_t depth);

/// The corpus for an architecture ("minidsp"): shapes x widths 8..16 x depths 0..3.
std::vector<BenchEntry> bench_corpus(const std::string& arch);

/// Writes one .spec file per entry and manifest.csv
/// (name,file,shape,width,depth,expressible). Output bytes depend only on `arch`.
std::vector<BenchEntry> benchgen(const std::string& arch, const std::string& out_dir);

/// Reads manifest.csv from a corpus directory.
std::vector<BenchEntry> read_manifest(const std::string& corpus_dir);

struct BenchRow {
  std::string name;
  std::string outcome;  // success, unsat, timeout, error, soundness-failure
  std::string solver;
  double seconds = 0;
  std::string detail;  // error text; not part of the CSV
};

struct BenchRunOptions {
  std::string corpus_dir;
  std::string arch_path;
  std::string template_name = "dsp";
  double timeout = 120.0;
  std::uint32_t clock_cycles = 2;
  std::string solvers;      // as MapOptions::solvers
  std::string report_path;  // CSV; empty to skip
  unsigned jobs = 1;
  /// Random cycles each success is simulated for before it is recorded.
  std::uint32_t validation_cycles = 2000;
  std::uint64_t seed = 1;
  /// Only run entries whose name passes; all when empty.
  std::function<bool(const BenchEntry&)> filter;
  /// Applied to each synthesized program before validation. Test seam.
  std::function<Prog(const Prog&)> result_hook;
};

/// Runs every selected benchmark. Each success is re-simulated against its spec
/// over validation_cycles random cycles, ignoring the first `depth` cycles.
/// A mismatch writes a soundness-failure row and throws SoundnessFailure.
/// The CSV header is `name,outcome,solver,seconds`.
std::vector<BenchRow> benchrun(const BenchRunOptions& options);

}  // namespace sketchmap
