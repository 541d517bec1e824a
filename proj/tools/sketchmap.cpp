// Command-line front end: map, simulate, benchgen, benchrun, templates.

#include <CLI11.hpp>

#include <filesystem>
#include <fstream>
#include <iomanip>
#include <iostream>
#include <random>
#include <sstream>

#include "sketchmap/bench.hpp"
#include "sketchmap/driver.hpp"
#include "sketchmap/emit.hpp"
#include "sketchmap/errors.hpp"
#include "sketchmap/interp.hpp"
#include "sketchmap/sketch_gen.hpp"
#include "sketchmap/spec_dsl.hpp"

using namespace sketchmap;

namespace {

std::string hex(const BitVec& v) {
  std::ostringstream os;
  os << v.width() << "'h" << std::hex << v.value();
  return os.str();
}

std::string read_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw Error("cannot read " + path);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

int simulate_file(const std::string& path, std::uint32_t cycles, std::uint64_t seed) {
  Prog p = std::filesystem::path(path).extension() == ".json" ? from_json_netlist(read_file(path)) : load_spec(path).prog;
  std::mt19937_64 rng(seed);
  Env env = random_env(p, cycles, rng);
  auto out = simulate(p, env, cycles - 1);
  std::cout << "cycle";
  for (const auto& [name, stream] : env) std::cout << ',' << name;
  std::cout << ",out\n";
  for (std::uint32_t t = 0; t < cycles; ++t) {
    std::cout << t;
    for (const auto& [name, stream] : env) std::cout << ',' << hex(stream[t]);
    std::cout << ',' << hex(out[t]) << '\n';
  }
  return kExitSuccess;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"sketchmap: sketch-guided technology mapping for FPGA primitives"};
  app.require_subcommand(1);

  MapOptions map;
  auto* map_cmd = app.add_subcommand("map", "Map a behavioral spec onto an architecture");
  map_cmd->add_option("spec", map.spec_path, "Spec DSL file")->required();
  map_cmd->add_option("--template", map.template_name, "Sketch template (see `templates`)")->required();
  map_cmd->add_option("--arch-desc", map.arch_path, "Architecture description YAML")->required();
  map_cmd->add_option("--timeout", map.timeout, "Synthesis budget in seconds")->capture_default_str();
  std::uint32_t depth = 0;
  auto* depth_opt = map_cmd->add_option("--pipeline-depth", depth, "Pipeline depth (defaults to the design file's)");
  map_cmd->add_option("--clock-cycles", map.clock_cycles, "Extra cycles checked after the pipeline fills")
      ->capture_default_str();
  map_cmd->add_option("--solver", map.solvers, "Comma-separated solver names or a solver config JSON file");
  map_cmd->add_option("--out", map.out_path, "Output file");
  map_cmd->add_option("--out-format", map.out_format, "verilog or json")
      ->check(CLI::IsMember({"verilog", "json"}))
      ->capture_default_str();
  map_cmd->add_option("--module-name", map.module_name, "Emitted module name")->capture_default_str();

  std::string sim_path;
  std::uint32_t sim_cycles = 8;
  std::uint64_t sim_seed = 1;
  auto* sim_cmd = app.add_subcommand("simulate", "Simulate a spec or JSON netlist on random inputs");
  sim_cmd->add_option("file", sim_path, "Spec DSL file or .json netlist")->required();
  sim_cmd->add_option("--cycles", sim_cycles, "Cycles to simulate")->check(CLI::Range(1u, 1000000u))->capture_default_str();
  sim_cmd->add_option("--seed", sim_seed, "Random seed")->capture_default_str();

  std::string gen_arch = "minidsp";
  std::string gen_out;
  auto* gen_cmd = app.add_subcommand("benchgen", "Write the microbenchmark corpus and its manifest");
  gen_cmd->add_option("--arch", gen_arch, "Target family")->check(CLI::IsMember({"minidsp"}))->capture_default_str();
  gen_cmd->add_option("--out-dir", gen_out, "Corpus directory")->required();

  BenchRunOptions run;
  auto* run_cmd = app.add_subcommand("benchrun", "Synthesize and validate every corpus entry");
  run_cmd->add_option("--corpus", run.corpus_dir, "Corpus directory from benchgen")->required();
  run_cmd->add_option("--arch-desc", run.arch_path, "Architecture description YAML")->required();
  run_cmd->add_option("--template", run.template_name, "Sketch template")->capture_default_str();
  run_cmd->add_option("--timeout", run.timeout, "Per-benchmark budget in seconds")->capture_default_str();
  run_cmd->add_option("--clock-cycles", run.clock_cycles, "Extra cycles checked")->capture_default_str();
  run_cmd->add_option("--solver", run.solvers, "Comma-separated solver names or a solver config JSON file");
  run_cmd->add_option("--report", run.report_path, "CSV report path")->required();
  run_cmd->add_option("--jobs", run.jobs, "Benchmarks run concurrently")->check(CLI::Range(1u, 256u))->capture_default_str();
  run_cmd->add_option("--validation-cycles", run.validation_cycles, "Random simulation cycles per success")
      ->check(CLI::Range(1u, 10000000u))
      ->capture_default_str();
  bool expressible_only = false;
  run_cmd->add_flag("--expressible-only", expressible_only, "Skip entries the manifest marks inexpressible");

  app.add_subcommand("templates", "List sketch templates and their parameters");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    return app.exit(e) == 0 ? kExitSuccess : kExitFailure;
  }

  try {
    if (*map_cmd) {
      if (*depth_opt) map.pipeline_depth = depth;
      MapOutcome r = run_map(map);
      if (r.exit_code == kExitFailure) {
        std::cerr << "error: " << r.message << "\n";
        return r.exit_code;
      }
      std::cerr << to_string(*r.status) << " (solver " << (r.solver.empty() ? "-" : r.solver) << ", "
                << std::fixed << std::setprecision(3) << r.seconds << " s)\n";
      if (r.exit_code == kExitSuccess && map.out_path.empty()) std::cout << r.artifact;
      return r.exit_code;
    }
    if (*sim_cmd) return simulate_file(sim_path, sim_cycles, sim_seed);
    if (*gen_cmd) {
      auto corpus = benchgen(gen_arch, gen_out);
      std::size_t expressible = 0;
      for (const auto& e : corpus) expressible += e.expressible;
      std::cerr << corpus.size() << " benchmarks (" << expressible << " expressible) in " << gen_out << "\n";
      return kExitSuccess;
    }
    if (*run_cmd) {
      if (expressible_only) run.filter = [](const BenchEntry& e) { return e.expressible; };
      try {
        auto rows = benchrun(run);
        std::map<std::string, std::size_t> counts;
        for (const auto& r : rows) counts[r.outcome]++;
        for (const auto& [outcome, n] : counts) std::cerr << outcome << ": " << n << "\n";
        for (const auto& r : rows) {
          if (r.outcome == "error") std::cerr << r.name << ": " << r.detail << "\n";
        }
        return kExitSuccess;
      } catch (const SoundnessFailure& e) {
        std::cerr << e.what() << "\n";
        return kExitSoundness;
      }
    }
    for (const auto& t : list_templates()) {
      std::cout << t.name << ": " << t.summary << "\n";
      for (const auto& p : t.params) std::cout << "  " << p.name << " [" << p.min << ".." << p.max << "] " << p.help << "\n";
    }
    return kExitSuccess;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitFailure;
  }
}
