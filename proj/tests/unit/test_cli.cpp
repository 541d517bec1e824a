#include <doctest.h>

#include <unistd.h>

#include <algorithm>
#include <filesystem>
#include <fstream>
#include <random>
#include <sstream>

#include "sketch_helpers.hpp"
#include "sketchmap/bench.hpp"
#include "sketchmap/driver.hpp"
#include "sketchmap/emit.hpp"
#include "sketchmap/errors.hpp"
#include "sketchmap/interp.hpp"
#include "sketchmap/ops.hpp"
#include "sketchmap/spec_dsl.hpp"

using namespace sketchmap;
namespace fs = std::filesystem;

namespace {

const std::string kData = SKETCHMAP_DATA_DIR;

fs::path scratch(const std::string& name) {
  fs::path dir = fs::temp_directory_path() / ("sketchmap_cli_" + name + "_" + std::to_string(::getpid()));
  fs::remove_all(dir);
  fs::create_directories(dir);
  return dir;
}

std::string write(const fs::path& path, const std::string& text) {
  std::ofstream(path) << text;
  return path.string();
}

std::string slurp(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

}  // namespace

TEST_CASE("the add_mul_and document is (a+b)*c&d delayed by two cycles") {
  SpecDocument doc = load_spec(kData + "/examples/add_mul_and.spec");
  CHECK(doc.pipeline_depth == 2);
  REQUIRE(doc.inputs.size() == 4);
  CHECK(doc.inputs[0] == std::pair<std::string, std::uint32_t>{"a", 16});
  std::mt19937_64 rng(9);
  Env env = random_env(doc.prog, 50, rng);
  auto out = simulate(doc.prog, env, 49);
  CHECK(out[0] == BitVec::zero(16));
  CHECK(out[1] == BitVec::zero(16));
  for (std::uint32_t t = 2; t < 50; ++t) {
    auto at = [&](const char* n) { return env.at(n)[t - 2].value(); };
    CHECK(out[t] == BitVec::truncate(16, ((at("a") + at("b")) * at("c")) & at("d")));
  }
}

TEST_CASE("a combinational 4-bit add matches the operator exhaustively") {
  Prog p = parse_spec("(spec (inputs (a 4) (b 4)) (pipeline 0) (add a b))");
  for (std::uint64_t a = 0; a < 16; ++a) {
    for (std::uint64_t b = 0; b < 16; ++b) {
      Env env{{"a", {BitVec(4, a)}}, {"b", {BitVec(4, b)}}};
      std::vector<BitVec> args{BitVec(4, a), BitVec(4, b)};
      CHECK(interp(p, env, 0, p.root) == eval_op(Operator{OpKind::Add}, args));
    }
  }
}

TEST_CASE("the DSL covers every listed operator") {
  Prog p = parse_spec(R"(
    (spec (inputs (a 4) (b 4) (s 1))
      (concat (mux s (not a) (sub a b))
              (zext 3 (eq (xor a b) (or a (and a b))))
              (extract 1 0 (mul a b))
              (ult a (bv 3 4))))
  )");
  Env env{{"a", {BitVec(4, 5)}}, {"b", {BitVec(4, 3)}}, {"s", {BitVec(1, 0)}}};
  // mux selects (sub a b) = 2; eq(6, 5) = 0; (5*3)[1:0] = 3; 5 < 3 = 0.
  CHECK(interp(p, env, 0, p.root) == BitVec(11, (2u << 7) | (0u << 3) | (3u << 1) | 0u));
}

TEST_CASE("DSL errors") {
  CHECK_THROWS_AS(parse_spec("(spec (inputs (a 4)) (frob a))"), ParseError);
  CHECK_THROWS_AS(parse_spec("(spec (inputs (a 4)) (add a z))"), ParseError);
  CHECK_THROWS_AS(parse_spec("(spec (inputs (a 4)) (add a)"), ParseError);
  CHECK_THROWS_AS(parse_spec("(spec (inputs (a 4)))"), ParseError);
  CHECK_THROWS_AS(parse_spec("(spec (inputs (a 4) (b 3)) (add a b))"), WidthError);
  CHECK_THROWS_AS(parse_spec("(spec (inputs (a 4)) (extract 4 0 a))"), WidthError);
  try {
    parse_spec("(spec (inputs (a 4))\n\n (frob a))");
    FAIL("expected ParseError");
  } catch (const ParseError& e) {
    CHECK(e.line() == 3);
  }
}

TEST_CASE("map on MiniDSP: add_mul_and becomes one DSP that simulates like the design") {
  fs::path dir = scratch("map");
  MapOptions o;
  o.spec_path = kData + "/examples/add_mul_and.spec";
  o.template_name = "dsp";
  o.arch_path = kData + "/arch/minidsp.yml";
  o.out_path = (dir / "out.json").string();
  o.out_format = "json";
  MapOutcome r = run_map(o);
  REQUIRE(r.exit_code == kExitSuccess);
  CHECK_FALSE(r.solver.empty());
  Prog impl = from_json_netlist(slurp(dir / "out.json"));
  std::size_t prims = 0;
  for (const auto& [id, node] : impl.nodes) prims += node.is<PrimNode>();
  CHECK(prims == 1);
  Prog spec = load_spec(o.spec_path).prog;
  std::mt19937_64 rng(4);
  Env env = random_env(spec, 1000, rng);
  auto want = simulate(spec, env, 999);
  auto got = simulate(impl, env, 999);
  for (std::uint32_t t = 2; t < 1000; ++t) REQUIRE(want[t] == got[t]);

  o.out_format = "verilog";
  o.out_path.clear();
  r = run_map(o);
  REQUIRE(r.exit_code == kExitSuccess);
  CHECK(r.artifact.find("MINIDSP") != std::string::npos);
  fs::remove_all(dir);
}

TEST_CASE("map exit codes") {
  fs::path dir = scratch("codes");
  MapOptions o;
  o.spec_path = write(dir / "add2.spec", "(spec (inputs (a 2) (b 2)) (add a b))");
  o.template_name = "bitwise";
  o.arch_path = kData + "/arch/generic-lut-carry.yml";
  CHECK(run_map(o).exit_code == kExitUnsat);

  o.template_name = "bitwise-with-carry";
  CHECK(run_map(o).exit_code == kExitSuccess);

  MapOptions missing = o;
  missing.arch_path = (dir / "nope.yml").string();
  MapOutcome r = run_map(missing);
  CHECK(r.exit_code == kExitFailure);
  CHECK_FALSE(r.message.empty());

  MapOptions bad_spec = o;
  bad_spec.spec_path = write(dir / "bad.spec", "(spec (inputs (a 2)) (frob a))");
  CHECK(run_map(bad_spec).exit_code == kExitFailure);

  MapOptions bad_format = o;
  bad_format.out_format = "edif";
  CHECK(run_map(bad_format).exit_code == kExitFailure);

  CHECK(exit_code_for(SynthesisStatus::Timeout) == kExitTimeout);
  fs::remove_all(dir);
}

TEST_CASE("benchgen: 13 shapes per cell, deterministic bytes, every spec parses") {
  CHECK(bench_shapes().size() == 13);
  auto corpus = bench_corpus("minidsp");
  CHECK(corpus.size() == 13 * 9 * 4);
  std::map<std::pair<std::uint32_t, std::uint32_t>, std::size_t> cells;
  for (const auto& e : corpus) cells[{e.width, e.depth}]++;
  CHECK(cells.size() == 36);
  for (const auto& [cell, n] : cells) CHECK(n == 13);

  fs::path one = scratch("gen1");
  fs::path two = scratch("gen2");
  benchgen("minidsp", one.string());
  benchgen("minidsp", two.string());
  CHECK(slurp(one / "manifest.csv") == slurp(two / "manifest.csv"));
  auto entries = read_manifest(one.string());
  REQUIRE(entries.size() == corpus.size());
  for (const auto& e : entries) {
    CAPTURE(e.name);
    CHECK(slurp(one / e.file) == slurp(two / e.file));
    SpecDocument doc = load_spec((one / e.file).string());
    CHECK(doc.pipeline_depth == e.depth);
    CHECK(doc.inputs.front().second == e.width);
  }
  auto row = std::find_if(entries.begin(), entries.end(), [](const BenchEntry& e) { return e.name == "add_mul_and_w8_d2"; });
  REQUIRE(row != entries.end());
  CHECK(row->expressible);
  CHECK_THROWS_AS(bench_corpus("xilinx"), Error);
  fs::remove_all(one);
  fs::remove_all(two);
}

TEST_CASE("inexpressible shapes are flagged from the DSP's operator table") {
  CHECK(minidsp_expressible({"x", "add", "xor", 4}, 3));
  CHECK_FALSE(minidsp_expressible({"x", "add", "xor", 4}, 4));
  CHECK_FALSE(minidsp_expressible({"x", "mul", "and", 4}, 0));
  CHECK_FALSE(minidsp_expressible({"x", "add", "mul", 4}, 0));
}

TEST_CASE("benchrun writes the fixed CSV columns and validates every success") {
  fs::path dir = scratch("run");
  benchgen("minidsp", (dir / "corpus").string());
  BenchRunOptions o;
  o.corpus_dir = (dir / "corpus").string();
  o.arch_path = kData + "/arch/minidsp.yml";
  o.report_path = (dir / "report.csv").string();
  o.jobs = 2;
  o.filter = [](const BenchEntry& e) { return e.width == 8 && (e.depth == 0 || e.depth == 3); };
  auto rows = benchrun(o);
  CHECK(rows.size() == 26);
  for (const auto& r : rows) CHECK(r.outcome == "success");
  std::istringstream report(slurp(dir / "report.csv"));
  std::string header;
  std::getline(report, header);
  CHECK(header == "name,outcome,solver,seconds");
  std::size_t lines = 0;
  for (std::string line; std::getline(report, line);) {
    ++lines;
    CHECK(std::count(line.begin(), line.end(), ',') == 3);
  }
  CHECK(lines == 26);
  fs::remove_all(dir);
}

TEST_CASE("benchrun aborts with a soundness failure when a result does not simulate like its spec") {
  fs::path dir = scratch("unsound");
  benchgen("minidsp", (dir / "corpus").string());
  BenchRunOptions o;
  o.corpus_dir = (dir / "corpus").string();
  o.arch_path = kData + "/arch/minidsp.yml";
  o.report_path = (dir / "report.csv").string();
  o.filter = [](const BenchEntry& e) { return e.name == "add_mul_xor_w8_d1" || e.name == "mul_w8_d0"; };
  // Replace each result with a constant: agrees nowhere with the design.
  o.result_hook = [](const Prog& p) {
    IdAllocator ids(1);
    ProgBuilder b(ids);
    std::uint32_t w = 8;
    (void)p;
    return b.build(b.bv(BitVec(w, 0x5a)));
  };
  CHECK_THROWS_AS(benchrun(o), SoundnessFailure);
  CHECK(slurp(dir / "report.csv").find("soundness-failure") != std::string::npos);
  fs::remove_all(dir);
}
