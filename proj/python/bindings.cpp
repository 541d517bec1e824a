// Python bindings for the main operations.

#include <pybind11/functional.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include "sketchmap/arch.hpp"
#include "sketchmap/bench.hpp"
#include "sketchmap/btor2.hpp"
#include "sketchmap/driver.hpp"
#include "sketchmap/emit.hpp"
#include "sketchmap/errors.hpp"
#include "sketchmap/interp.hpp"
#include "sketchmap/sketch_gen.hpp"
#include "sketchmap/solver.hpp"
#include "sketchmap/spec_dsl.hpp"
#include "sketchmap/synth.hpp"
#include "sketchmap/well_formed.hpp"

namespace py = pybind11;
using namespace sketchmap;

namespace {

/// Python dict {name: [int, ...]} to a stream environment sized by the program's variables.
Env to_env(const Prog& p, const std::map<std::string, std::vector<std::uint64_t>>& values) {
  Env env;
  auto widths = free_var_widths(p);
  for (const auto& [name, stream] : values) {
    auto it = widths.find(name);
    if (it == widths.end()) throw Error("program has no input named " + name);
    Stream s;
    for (auto v : stream) s.push_back(BitVec::truncate(it->second, v));
    env[name] = std::move(s);
  }
  return env;
}

std::vector<std::uint64_t> to_ints(const std::vector<BitVec>& trace) {
  std::vector<std::uint64_t> out;
  for (const auto& v : trace) out.push_back(v.value());
  return out;
}

std::vector<SolverConfig> pick_solvers(const std::string& spec, double timeout) {
  auto s = spec.empty() ? default_portfolio(timeout) : resolve_solvers(spec, timeout);
  if (s.empty()) throw Error("no SMT solver available");
  return s;
}

}  // namespace

PYBIND11_MODULE(_core, m) {
  m.doc() = "Sketch-guided technology mapping onto FPGA primitives";

  auto base = py::register_exception<Error>(m, "SketchmapError");
  py::register_exception<ParseError>(m, "ParseError", base.ptr());
  py::register_exception<WidthError>(m, "WidthError", base.ptr());
  py::register_exception<NotStructural>(m, "NotStructural", base.ptr());
  py::register_exception<JsonSchemaError>(m, "JsonSchemaError", base.ptr());
  py::register_exception<SchemaError>(m, "SchemaError", base.ptr());
  py::register_exception<MissingInit>(m, "MissingInit", base.ptr());

  py::class_<Prog>(m, "Prog")
      .def_property_readonly("inputs", [](const Prog& p) { return free_var_widths(p); })
      .def_property_readonly("width", [](const Prog& p) { return root_width(p); })
      .def_property_readonly("hole_free", [](const Prog& p) { return is_hole_free(p); })
      .def("simulate", [](const Prog& p, const std::map<std::string, std::vector<std::uint64_t>>& env,
                          std::uint32_t horizon) { return to_ints(simulate(p, to_env(p, env), horizon)); },
           py::arg("env"), py::arg("horizon"), "Output at cycles 0..horizon; env maps each input to per-cycle values.")
      .def("__str__", [](const Prog& p) { return to_sexpr(p); })
      .def("__len__", [](const Prog& p) { return p.nodes.size(); });

  py::class_<Sketch>(m, "Sketch")
      .def_property_readonly("program", [](const Sketch& s) { return s.psi; })
      .def_property_readonly("holes", [](const Sketch& s) {
        std::vector<std::string> labels;
        for (const auto& [label, spec] : s.holes) labels.push_back(label);
        return labels;
      });

  py::class_<ArchDescription>(m, "ArchDescription")
      .def_property_readonly("implementations", [](const ArchDescription& d) {
        std::vector<std::string> out;
        for (const auto& impl : d.implementations) out.push_back(impl.interface.label());
        return out;
      });

  m.def("parse_spec", [](const std::string& text) { return parse_spec(text); }, py::arg("text"),
        "Program of a spec DSL document.");
  m.def("load_spec", [](const std::string& path) { return load_spec(path).prog; }, py::arg("path"));
  m.def("load_arch", &load_arch, py::arg("path"));
  m.def("import_btor2", [](const std::string& path) { return import_btor2_file(path).semantics; }, py::arg("path"));
  m.def("check_well_formed", [](const Prog& p) { check_well_formed(p); }, py::arg("program"));

  m.def("list_templates", [] {
    std::vector<py::dict> out;
    for (const auto& t : list_templates()) {
      py::dict d;
      d["name"] = t.name;
      d["summary"] = t.summary;
      std::vector<py::dict> params;
      for (const auto& p : t.params) {
        py::dict pd;
        pd["name"] = p.name;
        pd["min"] = p.min;
        pd["max"] = p.max;
        params.push_back(pd);
      }
      d["params"] = params;
      out.push_back(d);
    }
    return out;
  });

  m.def(
      "generate_sketch",
      [](const std::string& name, const std::vector<std::pair<std::string, std::uint32_t>>& inputs, std::uint32_t width,
         const ArchDescription& arch, std::uint32_t pipeline_depth) {
        return generate_sketch(TemplateRequest{name, inputs, width, pipeline_depth}, arch);
      },
      py::arg("template"), py::arg("inputs"), py::arg("width"), py::arg("arch"), py::arg("pipeline_depth") = 0);

  m.def(
      "synthesize",
      [](const Prog& spec, const Sketch& sketch, std::uint32_t t, std::uint32_t c, double timeout,
         const std::string& solvers) {
        auto backends = pick_solvers(solvers, timeout);
        CegisOptions opt;
        opt.timeout = timeout;
        SynthesisResult r;
        {
          py::gil_scoped_release release;
          r = synthesize(spec, sketch, t, c, backends, opt);
        }
        py::dict d;
        d["status"] = to_string(r.status);
        d["solver"] = r.solver;
        d["seconds"] = r.seconds;
        d["program"] = r.status == SynthesisStatus::Success ? py::cast(r.program) : py::none();
        return d;
      },
      py::arg("spec"), py::arg("sketch"), py::arg("t") = 0, py::arg("c") = 0, py::arg("timeout") = 120.0,
      py::arg("solvers") = "");

  m.def("to_structural_verilog", &to_structural_verilog, py::arg("program"), py::arg("module_name") = "top");
  m.def("to_json_netlist", &to_json_netlist, py::arg("program"), py::arg("module_name") = "top");
  m.def("from_json_netlist", [](const std::string& text) { return from_json_netlist(text); }, py::arg("text"));
  m.def("netlists_isomorphic", &netlists_isomorphic, py::arg("a"), py::arg("b"));
  m.def("available_solvers", [] {
    std::vector<std::string> out;
    for (const auto& s : default_portfolio()) out.push_back(s.name);
    return out;
  });

  m.def(
      "run_map",
      [](const std::string& spec_path, const std::string& template_name, const std::string& arch_path, double timeout,
         std::optional<std::uint32_t> pipeline_depth, std::uint32_t clock_cycles, const std::string& solvers,
         const std::string& out_path, const std::string& out_format) {
        MapOptions o{spec_path, template_name, arch_path, timeout, pipeline_depth, clock_cycles, solvers, out_path, out_format};
        MapOutcome r;
        {
          py::gil_scoped_release release;
          r = run_map(o);
        }
        py::dict d;
        d["exit_code"] = r.exit_code;
        d["status"] = r.status ? py::cast(to_string(*r.status)) : py::none();
        d["solver"] = r.solver;
        d["seconds"] = r.seconds;
        d["message"] = r.message;
        d["artifact"] = r.artifact;
        return d;
      },
      py::arg("spec_path"), py::arg("template"), py::arg("arch_path"), py::arg("timeout") = 120.0,
      py::arg("pipeline_depth") = py::none(), py::arg("clock_cycles") = 2, py::arg("solvers") = "",
      py::arg("out_path") = "", py::arg("out_format") = "verilog");

  m.def(
      "benchgen",
      [](const std::string& arch, const std::string& out_dir) {
        std::vector<py::dict> out;
        for (const auto& e : benchgen(arch, out_dir)) {
          py::dict d;
          d["name"] = e.name;
          d["file"] = e.file;
          d["shape"] = e.shape.name;
          d["width"] = e.width;
          d["depth"] = e.depth;
          d["expressible"] = e.expressible;
          out.push_back(d);
        }
        return out;
      },
      py::arg("arch"), py::arg("out_dir"));
}
