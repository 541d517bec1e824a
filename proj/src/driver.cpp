#include "sketchmap/driver.hpp"

#include <algorithm>
#include <chrono>
#include <fstream>

#include "sketchmap/arch.hpp"
#include "sketchmap/emit.hpp"
#include "sketchmap/errors.hpp"
#include "sketchmap/sketch_gen.hpp"
#include "sketchmap/solver.hpp"
#include "sketchmap/spec_dsl.hpp"

namespace sketchmap {

int exit_code_for(SynthesisStatus status) {
  switch (status) {
    case SynthesisStatus::Success: return kExitSuccess;
    case SynthesisStatus::Unsat: return kExitUnsat;
    case SynthesisStatus::Timeout: return kExitTimeout;
  }
  return kExitFailure;
}

MapOutcome run_map(const MapOptions& options) {
  MapOutcome out;
  const auto start = std::chrono::steady_clock::now();
  try {
    if (options.out_format != "verilog" && options.out_format != "json") {
      throw Error("--out-format must be verilog or json");
    }
    SpecDocument spec = load_spec(options.spec_path);
    ArchDescription arch = load_arch(options.arch_path);

    TemplateRequest req;
    req.name = options.template_name;
    req.inputs = spec.inputs;
    req.width = 0;
    for (const auto& [name, w] : spec.inputs) req.width = std::max(req.width, w);
    req.pipeline_depth = options.pipeline_depth.value_or(spec.pipeline_depth);
    Sketch sketch = generate_sketch(req, arch);

    auto solvers = options.solvers.empty() ? default_portfolio(options.timeout)
                                           : resolve_solvers(options.solvers, options.timeout);
    if (solvers.empty()) throw Error("no SMT solver available");
    CegisOptions cegis;
    cegis.timeout = options.timeout;
    SynthesisResult r = synthesize(spec.prog, sketch, req.pipeline_depth, options.clock_cycles, solvers, cegis);
    out.status = r.status;
    out.solver = r.solver;
    out.exit_code = exit_code_for(r.status);
    if (r.status == SynthesisStatus::Success) {
      out.artifact = options.out_format == "json" ? to_json_netlist(r.program, options.module_name)
                                                  : to_structural_verilog(r.program, options.module_name);
      if (!options.out_path.empty()) {
        std::ofstream f(options.out_path, std::ios::binary);
        if (!f) throw Error("cannot write " + options.out_path);
        f << out.artifact;
      }
    }
  } catch (const std::exception& e) {
    out = MapOutcome{};
    out.message = e.what();
  }
  out.seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  return out;
}

}  // namespace sketchmap
