#include "sketchmap/bench.hpp"

#include <atomic>
#include <chrono>
#include <filesystem>
#include <fstream>
#include <iomanip>
#include <map>
#include <mutex>
#include <random>
#include <set>
#include <sstream>
#include <thread>

#include "sketchmap/arch.hpp"
#include "sketchmap/errors.hpp"
#include "sketchmap/interp.hpp"
#include "sketchmap/sketch_gen.hpp"
#include "sketchmap/solver.hpp"
#include "sketchmap/spec_dsl.hpp"
#include "sketchmap/synth.hpp"

namespace sketchmap {

namespace fs = std::filesystem;

const std::vector<BenchShape>& bench_shapes() {
  static const std::vector<BenchShape> shapes = [] {
    std::vector<BenchShape> out;
    for (const char* pre : {"add", "sub"}) {
      for (const char* post : {"and", "or", "add", "sub", "xor"}) {
        out.push_back({std::string(pre) + "_mul_" + post, pre, post, 4});
      }
    }
    out.push_back({"mul", "", "", 2});
    for (const char* post : {"add", "sub"}) out.push_back({std::string("mul_") + post, "", post, 3});
    return out;
  }();
  return shapes;
}

std::string bench_spec_text(const BenchShape& shape, std::uint32_t width, std::uint32_t depth) {
  static const char* names[] = {"a", "b", "c", "d"};
  std::ostringstream os;
  os << "(spec (inputs";
  for (std::uint32_t i = 0; i < shape.operands; ++i) os << " (" << names[i] << " " << width << ")";
  os << ")\n      (pipeline " << depth << ")\n      ";
  std::string expr;
  if (shape.operands == 4) {
    expr = "(" + shape.post + " (mul (" + shape.pre + " a b) c) d)";
  } else if (shape.operands == 3) {
    expr = "(" + shape.post + " (mul a b) c)";
  } else {
    expr = "(mul a b)";
  }
  os << expr << ")\n";
  return os.str();
}

bool minidsp_expressible(const BenchShape& shape, std::uint32_t depth) {
  static const std::set<std::string> pre_adder = {"", "add", "sub"};
  static const std::set<std::string> alu = {"", "add", "sub", "and", "or", "xor"};
  return depth <= 3 && pre_adder.count(shape.pre) && alu.count(shape.post);
}

std::vector<BenchEntry> bench_corpus(const std::string& arch) {
  if (arch != "minidsp") throw Error("no benchmark corpus for architecture '" + arch + "'");
  std::vector<BenchEntry> out;
  for (const auto& shape : bench_shapes()) {
    for (std::uint32_t w = 8; w <= 16; ++w) {
      for (std::uint32_t d = 0; d <= 3; ++d) {
        BenchEntry e;
        e.name = shape.name + "_w" + std::to_string(w) + "_d" + std::to_string(d);
        e.file = e.name + ".spec";
        e.shape = shape;
        e.width = w;
        e.depth = d;
        e.expressible = minidsp_expressible(shape, d);
        out.push_back(e);
      }
    }
  }
  return out;
}

std::vector<BenchEntry> benchgen(const std::string& arch, const std::string& out_dir) {
  auto corpus = bench_corpus(arch);
  fs::create_directories(out_dir);
  std::ofstream manifest(fs::path(out_dir) / "manifest.csv", std::ios::binary);
  if (!manifest) throw Error("cannot write " + (fs::path(out_dir) / "manifest.csv").string());
  manifest << "name,file,shape,width,depth,expressible\n";
  for (const auto& e : corpus) {
    std::ofstream spec(fs::path(out_dir) / e.file, std::ios::binary);
    if (!spec) throw Error("cannot write " + (fs::path(out_dir) / e.file).string());
    spec << bench_spec_text(e.shape, e.width, e.depth);
    manifest << e.name << ',' << e.file << ',' << e.shape.name << ',' << e.width << ',' << e.depth << ','
             << (e.expressible ? 1 : 0) << '\n';
  }
  return corpus;
}

std::vector<BenchEntry> read_manifest(const std::string& corpus_dir) {
  fs::path path = fs::path(corpus_dir) / "manifest.csv";
  std::ifstream in(path);
  if (!in) throw Error("cannot read " + path.string());
  std::map<std::string, BenchShape> shapes;
  for (const auto& s : bench_shapes()) shapes[s.name] = s;
  std::vector<BenchEntry> out;
  std::string line;
  std::size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (lineno == 1 || line.empty()) continue;
    std::vector<std::string> cols;
    std::stringstream ss(line);
    std::string col;
    while (std::getline(ss, col, ',')) cols.push_back(col);
    if (cols.size() != 6) throw ParseError(lineno, path.string() + ": expected 6 columns");
    BenchEntry e;
    e.name = cols[0];
    e.file = cols[1];
    auto it = shapes.find(cols[2]);
    if (it == shapes.end()) throw ParseError(lineno, path.string() + ": unknown shape " + cols[2]);
    e.shape = it->second;
    try {
      e.width = static_cast<std::uint32_t>(std::stoul(cols[3]));
      e.depth = static_cast<std::uint32_t>(std::stoul(cols[4]));
    } catch (const std::exception&) {
      throw ParseError(lineno, path.string() + ": bad width or depth");
    }
    e.expressible = cols[5] == "1";
    out.push_back(e);
  }
  return out;
}

namespace {

/// Cycle index of the first disagreement from cycle `from` on, or -1.
long first_mismatch(const Prog& spec, const Prog& impl, std::uint32_t from, std::uint32_t cycles, std::mt19937_64& rng) {
  Env env = random_env(spec, cycles, rng);
  auto want = simulate(spec, env, cycles - 1);
  auto got = simulate(impl, env, cycles - 1);
  for (std::uint32_t t = from; t < cycles; ++t) {
    if (want[t] != got[t]) return t;
  }
  return -1;
}

std::string format_seconds(double s) {
  std::ostringstream os;
  os << std::fixed << std::setprecision(3) << s;
  return os.str();
}

}  // namespace

std::vector<BenchRow> benchrun(const BenchRunOptions& options) {
  auto entries = read_manifest(options.corpus_dir);
  if (options.filter) {
    std::erase_if(entries, [&](const BenchEntry& e) { return !options.filter(e); });
  }
  ArchDescription arch = load_arch(options.arch_path);
  auto solvers = options.solvers.empty() ? default_portfolio(options.timeout)
                                         : resolve_solvers(options.solvers, options.timeout);
  if (solvers.empty()) throw Error("no SMT solver available");

  std::ofstream report;
  if (!options.report_path.empty()) {
    report.open(options.report_path, std::ios::binary);
    if (!report) throw Error("cannot write " + options.report_path);
    report << "name,outcome,solver,seconds\n" << std::flush;
  }

  std::vector<BenchRow> rows(entries.size());
  std::vector<bool> done(entries.size(), false);
  std::mutex mu;
  std::atomic<std::size_t> next{0};
  std::atomic<bool> abort{false};
  std::string soundness_message;

  auto record = [&](std::size_t i, BenchRow row) {
    std::lock_guard lock(mu);
    if (report.is_open()) {
      report << row.name << ',' << row.outcome << ',' << row.solver << ',' << format_seconds(row.seconds) << '\n'
             << std::flush;
    }
    rows[i] = std::move(row);
    done[i] = true;
  };

  auto work = [&] {
    for (std::size_t i = next++; i < entries.size() && !abort; i = next++) {
      const BenchEntry& e = entries[i];
      BenchRow row;
      row.name = e.name;
      auto start = std::chrono::steady_clock::now();
      try {
        SpecDocument spec = load_spec((fs::path(options.corpus_dir) / e.file).string());
        TemplateRequest req{options.template_name, spec.inputs, e.width, spec.pipeline_depth};
        Sketch sketch = generate_sketch(req, arch);
        CegisOptions cegis;
        cegis.timeout = options.timeout;
        SynthesisResult r = synthesize(spec.prog, sketch, spec.pipeline_depth, options.clock_cycles, solvers, cegis);
        row.solver = r.solver;
        row.outcome = to_string(r.status);
        if (r.status == SynthesisStatus::Success) {
          Prog impl = options.result_hook ? options.result_hook(r.program) : r.program;
          std::mt19937_64 rng(options.seed ^ std::hash<std::string>{}(e.name));
          long bad = first_mismatch(spec.prog, impl, spec.pipeline_depth, options.validation_cycles, rng);
          if (bad >= 0) {
            row.outcome = "soundness-failure";
            row.detail = e.name + ": synthesized design disagrees with the design at cycle " + std::to_string(bad);
          }
        }
      } catch (const std::exception& ex) {
        row.outcome = "error";
        row.detail = ex.what();
      }
      row.seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
      const bool unsound = row.outcome == "soundness-failure";
      std::string detail = row.detail;
      record(i, std::move(row));
      if (unsound) {
        std::lock_guard lock(mu);
        if (!abort.exchange(true)) soundness_message = detail;
      }
    }
  };

  const unsigned jobs = std::max(1u, options.jobs);
  std::vector<std::thread> threads;
  for (unsigned j = 1; j < jobs; ++j) threads.emplace_back(work);
  work();
  for (auto& t : threads) t.join();

  if (abort) throw SoundnessFailure("soundness failure: " + soundness_message);
  return rows;
}

}  // namespace sketchmap
