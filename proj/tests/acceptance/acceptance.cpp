// Acceptance suite: one PASS/FAIL line per criterion, exit status 1 if any fails.
//
//   acceptance            run every criterion
//   acceptance 3 9        run only the listed criteria

#include <unistd.h>

#include <chrono>
#include <filesystem>
#include <functional>
#include <iomanip>
#include <iostream>
#include <random>
#include <set>
#include <sstream>
#include <unordered_map>

#include "oracles.hpp"
#include "random_progs.hpp"
#include "sketch_helpers.hpp"
#include "structural_gen.hpp"
#include "sketchmap/arch.hpp"
#include "sketchmap/bench.hpp"
#include "sketchmap/btor2.hpp"
#include "sketchmap/emit.hpp"
#include "sketchmap/errors.hpp"
#include "sketchmap/interp.hpp"
#include "sketchmap/sketch_gen.hpp"
#include "sketchmap/solver.hpp"
#include "sketchmap/spec_dsl.hpp"
#include "sketchmap/symbolic.hpp"
#include "sketchmap/synth.hpp"
#include "sketchmap/well_formed.hpp"

using namespace sketchmap;
namespace fs = std::filesystem;

namespace {

const std::string kData = SKETCHMAP_DATA_DIR;

/// Outcome of one criterion; `detail` is printed after the verdict.
struct Verdict {
  bool pass = true;
  std::ostringstream detail;

  void require(bool ok, const std::string& why) {
    if (!ok && pass) detail << "first failure: " << why << "; ";
    pass = pass && ok;
  }
};

const std::vector<SolverConfig>& solvers() {
  static const auto s = default_portfolio(120);
  return s;
}

const ArchDescription& arch(const std::string& file) {
  static std::map<std::string, ArchDescription> cache;
  auto it = cache.find(file);
  if (it == cache.end()) it = cache.emplace(file, load_arch(kData + "/arch/" + file)).first;
  return it->second;
}

std::string var_name(std::uint32_t i) { return "x" + std::to_string(i); }

/// f(x0..x(n-1)) with truth table `table` (bit k is the output when the inputs spell k), as a sum of minterms.
Prog truth_table_spec(std::uint32_t n, std::uint64_t table) {
  IdAllocator ids(1);
  ProgBuilder b(ids);
  std::vector<Id> x, nx;
  for (std::uint32_t i = 0; i < n; ++i) {
    x.push_back(b.var(var_name(i), 1));
    nx.push_back(b.op(OpKind::Not, {x.back()}));
  }
  Id acc = b.bv(BitVec(1, 0));
  for (std::uint64_t k = 0; k < (std::uint64_t{1} << n); ++k) {
    if (!((table >> k) & 1)) continue;
    Id term = b.bv(BitVec(1, 1));
    for (std::uint32_t i = 0; i < n; ++i) term = b.op(OpKind::And, {term, (k >> i) & 1 ? x[i] : nx[i]});
    acc = b.op(OpKind::Or, {acc, term});
  }
  return b.build(acc);
}

/// A single LUT(n) realized on `desc` through interface lowering.
Sketch single_lut(std::uint32_t n, const ArchDescription& desc) {
  IdAllocator ids(1);
  ProgBuilder b(ids);
  Sketch s;
  std::map<std::string, Id> in;
  for (std::uint32_t i = 0; i < n; ++i) in["I" + std::to_string(i)] = b.var(var_name(i), 1);
  auto outs = realize(lower_interface(lut_interface(n), desc), in, b, "", s);
  s.psi = b.build(outs.at("O"));
  return s;
}

// ---------------------------------------------------------------------------

Verdict lut_completeness() {
  Verdict v;
  const auto start = std::chrono::steady_clock::now();
  std::size_t ok = 0, total = 0;
  for (std::uint32_t n : {2u, 3u}) {
    Sketch sketch = single_lut(n, arch("sofa.yml"));
    for (std::uint64_t table = 0; table < (std::uint64_t{1} << (1u << n)); ++table) {
      ++total;
      auto r = synthesize(truth_table_spec(n, table), sketch, 0, 0, solvers());
      if (r.status != SynthesisStatus::Success) {
        v.require(false, "LUT" + std::to_string(n) + " table " + std::to_string(table) + " gave " + to_string(r.status));
        continue;
      }
      bool exact = true;
      for (std::uint64_t in = 0; in < (std::uint64_t{1} << n); ++in) {
        Env env;
        for (std::uint32_t i = 0; i < n; ++i) env[var_name(i)] = {BitVec(1, (in >> i) & 1)};
        exact = exact && interp(r.program, env, 0, r.program.root).value() == ((table >> in) & 1);
      }
      v.require(exact, "LUT" + std::to_string(n) + " table " + std::to_string(table) + " is wrong on some input");
      ok += exact;
    }
  }
  double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  v.require(secs < 600, "took longer than 10 minutes");
  v.detail << ok << "/" << total << " functions exact, " << std::fixed << std::setprecision(1) << secs << " s";
  return v;
}

Verdict carry_arithmetic() {
  Verdict v;
  std::mt19937_64 rng(8);
  std::size_t ok = 0, total = 0;
  for (std::uint32_t w = 2; w <= 8; ++w) {
    Sketch sketch = generate_sketch(TemplateRequest{"bitwise-with-carry", {{"a", w}, {"b", w}}, w, 0}, arch("generic-lut-carry.yml"));
    for (OpKind op : {OpKind::Add, OpKind::Sub}) {
      ++total;
      Prog spec = testsupport::binary_spec(op, w);
      auto r = synthesize(spec, sketch, 0, 0, solvers());
      std::string label = std::string(op == OpKind::Add ? "add" : "sub") + " w=" + std::to_string(w);
      if (r.status != SynthesisStatus::Success) {
        v.require(false, label + " gave " + to_string(r.status));
        continue;
      }
      bool exact = w <= 5 ? testsupport::agree_exhaustively(spec, r.program, 0, 0)
                          : testsupport::agree_randomly(spec, r.program, 0, 0, 10000, rng);
      v.require(exact, label + " disagrees with the operator");
      ok += exact;
    }
  }
  v.detail << ok << "/" << total << " verified (exhaustive w<=5, 10^4 vectors above)";
  return v;
}

Verdict minidsp_suite() {
  Verdict v;
  fs::path dir = fs::temp_directory_path() / ("sketchmap_acceptance_" + std::to_string(::getpid()));
  fs::remove_all(dir);
  auto corpus = benchgen("minidsp", (dir / "corpus").string());
  std::set<std::string> expressible;
  for (const auto& e : corpus) {
    if (e.expressible) expressible.insert(e.name);
  }
  BenchRunOptions o;
  o.corpus_dir = (dir / "corpus").string();
  o.arch_path = kData + "/arch/minidsp.yml";
  o.report_path = (dir / "report.csv").string();
  o.timeout = 120;
  o.validation_cycles = 2000;
  o.filter = [&](const BenchEntry& e) { return expressible.count(e.name) != 0; };
  std::size_t success = 0;
  double slowest = 0;
  try {
    for (const auto& row : benchrun(o)) {
      v.require(row.outcome == "success", row.name + " gave " + row.outcome + (row.detail.empty() ? "" : ": " + row.detail));
      v.require(row.seconds <= 120, row.name + " exceeded 120 s");
      success += row.outcome == "success";
      slowest = std::max(slowest, row.seconds);
    }
  } catch (const SoundnessFailure& e) {
    v.require(false, e.what());
  }
  v.detail << success << "/" << expressible.size() << " expressible benchmarks (of " << corpus.size()
           << ") succeeded and passed 2000-cycle simulation, slowest " << std::fixed << std::setprecision(2) << slowest << " s";
  fs::remove_all(dir);
  return v;
}

Verdict unsat_soundness() {
  Verdict v;
  struct Case {
    std::string name;
    Prog spec;
    Sketch sketch;
    std::uint32_t t = 0, c = 0;
  };
  std::vector<Case> cases;
  for (std::uint32_t w : {2u, 3u}) {
    for (OpKind op : {OpKind::Add, OpKind::Sub, OpKind::Mul, OpKind::Shl, OpKind::Lshr, OpKind::Ashr}) {
      cases.push_back({std::string(op_kind_name(op)) + " on per-bit LUT2 w=" + std::to_string(w), testsupport::binary_spec(op, w),
                       testsupport::per_bit_lut2_sketch(w)});
    }
  }
  for (OpKind op : {OpKind::Add, OpKind::Sub, OpKind::Mul}) {
    cases.push_back({std::string(op_kind_name(op)) + " on per-bit LUT2 w=4", testsupport::binary_spec(op, 4),
                     testsupport::per_bit_lut2_sketch(4)});
  }
  for (std::uint32_t w : {2u, 3u}) {
    for (OpKind op : {OpKind::Add, OpKind::Sub}) {
      cases.push_back({std::string(op_kind_name(op)) + " on the generic bitwise template w=" + std::to_string(w),
                       testsupport::binary_spec(op, w),
                       generate_sketch(TemplateRequest{"bitwise", {{"a", w}, {"b", w}}, w, 0}, arch("generic-lut-carry.yml"))});
    }
  }
  {
    // Register init values that differ inside the window.
    Sketch s;
    s.psi = Prog{2, {{1, VarNode{"x", 4}}, {2, RegNode{1, BitVec(4, 7)}}}};
    cases.push_back({"reg init 5 vs 7 at t=0", Prog{2, {{1, VarNode{"x", 4}}, {2, RegNode{1, BitVec(4, 5)}}}}, s, 0, 0});
  }
  {
    // A combinational LUT cannot produce last cycle's XOR.
    IdAllocator ids(1);
    ProgBuilder b(ids);
    Id a = b.var("a", 1), bb = b.var("b", 1);
    Prog delayed = b.build(b.reg(b.op(OpKind::Xor, {a, bb}), BitVec(1, 0)));
    cases.push_back({"delayed xor on a LUT2", delayed, testsupport::single_lut_sketch({"a", "b"}), 1, 1});
  }

  std::size_t constructed_unsat = 0, agreed = 0;
  for (const auto& k : cases) {
    if (testsupport::hole_domain_size(k.sketch) > (std::uint64_t{1} << 16)) {
      v.require(false, k.name + " exceeds the 2^16 hole domain");
      continue;
    }
    bool exists = testsupport::exists_completion(k.spec, k.sketch, k.t, k.c);
    constructed_unsat += !exists;
    auto r = synthesize(k.spec, k.sketch, k.t, k.c, solvers());
    bool agree = r.status == (exists ? SynthesisStatus::Success : SynthesisStatus::Unsat);
    v.require(agree, k.name + ": enumeration says " + (exists ? "realizable" : "unrealizable") + ", synthesis said " +
                         to_string(r.status));
    agreed += agree;
  }
  v.require(constructed_unsat >= 20, "fewer than 20 unsat cases");
  v.detail << agreed << "/" << cases.size() << " verdicts agree with enumeration, " << constructed_unsat << " unsat cases";
  return v;
}

Verdict window_semantics() {
  Verdict v;
  auto reg = [](std::uint64_t init) { return Prog{2, {{1, VarNode{"x", 4}}, {2, RegNode{1, BitVec(4, init)}}}}; };
  Sketch s;
  s.psi = reg(7);
  auto early = synthesize(reg(5), s, 0, 0, solvers());
  auto late = synthesize(reg(5), s, 1, 3, solvers());
  v.require(early.status == SynthesisStatus::Unsat, "init 5 vs 7 at (0,0) gave " + to_string(early.status));
  v.require(late.status == SynthesisStatus::Success, "init 5 vs 7 at (1,3) gave " + to_string(late.status));

  SpecDocument spec = load_spec(kData + "/examples/add_mul_and.spec");
  Sketch dsp = generate_sketch(TemplateRequest{"dsp", spec.inputs, 16, 2}, arch("minidsp.yml"));
  const std::uint32_t c = 2;
  auto r = synthesize(spec.prog, dsp, 2, c, solvers());
  v.require(r.status == SynthesisStatus::Success, "pipelined add_mul_and gave " + to_string(r.status));
  std::size_t early_diffs = 0;
  if (r.status == SynthesisStatus::Success) {
    std::mt19937_64 rng(12);
    for (int i = 0; i < 1000; ++i) {
      Env env = random_env(spec.prog, 2 + c + 1, rng);
      auto want = simulate(spec.prog, env, 2 + c);
      auto got = simulate(r.program, env, 2 + c);
      early_diffs += want[0] != got[0] || want[1] != got[1];
      bool window = true;
      for (std::uint32_t t = 2; t <= 2 + c; ++t) window = window && want[t] == got[t];
      v.require(window, "pipelined result differs inside cycles 2..4");
    }
  }
  v.detail << "reg pair " << to_string(early.status) << "/" << to_string(late.status)
           << "; pipelined DSP matches on cycles 2..4 over 1000 runs (" << early_diffs << " differ before cycle 2)";
  return v;
}

/// Concrete value of a term under a stream environment.
BitVec eval_term(const TermStore& store, TermId root, const Env& env) {
  std::unordered_map<TermId, BitVec> leaves;
  for (TermId leaf : store.leaves({root})) {
    const Term& t = store[leaf];
    leaves[leaf] = env.at(t.name).at(t.time);
  }
  return store.evaluate(root, leaves);
}

Verdict symbolic_agreement() {
  Verdict v;
  testsupport::Rng rng(606);
  testsupport::AcyclicGenerator gen(rng, 12, 6);
  std::size_t ok = 0;
  for (int i = 0; i < 500; ++i) {
    Prog p = gen();
    const auto horizon = static_cast<std::uint32_t>(rng() % 5);
    TermStore store;
    auto tr = symbolic_interp(p, horizon, store);
    Env env = random_env(p, horizon + 1, rng);
    auto trace = simulate(p, env, horizon);
    bool same = true;
    for (std::uint32_t t = 0; t <= horizon; ++t) same = same && eval_term(store, tr.root[t], env) == trace[t];
    v.require(same, "program " + std::to_string(i) + " disagrees");
    ok += same;
  }
  v.detail << ok << "/500 programs agree at every cycle";
  return v;
}

Verdict well_formedness_oracle() {
  Verdict v;
  testsupport::Rng rng(707);
  std::size_t agree = 0, accepted = 0;
  for (int i = 0; i < 1000; ++i) {
    Prog p = testsupport::random_loop_candidate(rng, 6);
    bool ok = true;
    try {
      auto w = check_well_formed(p);
      v.require(testsupport::witness_holds(p, w), "returned witness violates monotonicity on sample " + std::to_string(i));
      ++accepted;
    } catch (const WellFormednessError&) {
      ok = false;
    }
    bool same = ok == testsupport::brute_force_witness_exists(p);
    v.require(same, "verdict differs from brute force on sample " + std::to_string(i));
    agree += same;
  }
  v.detail << agree << "/1000 verdicts match brute force (" << accepted << " well-formed, " << 1000 - accepted << " rejected)";
  return v;
}

Verdict btor2_import() {
  Verdict v;
  auto and2 = import_btor2_file(kData + "/models/and2.btor2");
  for (unsigned a = 0; a < 2; ++a) {
    for (unsigned b = 0; b < 2; ++b) {
      Env env{{"a", {BitVec(1, a)}}, {"b", {BitVec(1, b)}}};
      v.require(interp(and2.semantics, env, 0, and2.semantics.root).value() == (a & b), "and2 wrong");
    }
  }
  auto lut4 = import_btor2_file(kData + "/models/lut4.btor2");
  std::mt19937_64 rng(88);
  std::size_t ok = 0;
  for (int i = 0; i < 10000; ++i) {
    std::uint64_t idx = rng() & 15, sram = rng() & 0xffff;
    Env env{{"sram", {BitVec(16, sram)}}};
    for (int k = 0; k < 4; ++k) env["I" + std::to_string(k)] = {BitVec(1, (idx >> k) & 1)};
    bool same = interp(lut4.semantics, env, 0, lut4.semantics.root).value() == ((sram >> idx) & 1);
    ok += same;
  }
  v.require(ok == 10000, "lut4 disagrees with the indexed memory bit");
  bool missing_init = false;
  try {
    import_btor2_file(kData + "/models/uninit.btor2");
  } catch (const MissingInit&) {
    missing_init = true;
  }
  v.require(missing_init, "uninitialized state imported without MissingInit");
  v.detail << "and2 exhaustive, lut4 " << ok << "/10000 samples, MissingInit " << (missing_init ? "raised" : "not raised");
  return v;
}

Verdict netlist_round_trip() {
  Verdict v;
  std::mt19937_64 rng(909);
  std::size_t iso = 0, sim = 0, prims = 0;
  for (int i = 0; i < 100; ++i) {
    Prog p = testsupport::random_structural(rng);
    for (const auto& [id, node] : p.nodes) prims += node.is<PrimNode>();
    Prog back = from_json_netlist(to_json_netlist(p));
    bool same_graph = netlists_isomorphic(p, back);
    v.require(same_graph, "program " + std::to_string(i) + " is not isomorphic after the round trip");
    iso += same_graph;
    bool same_sim = true;
    for (int e = 0; e < 100 && same_sim; ++e) {
      Env env = random_env(p, 4, rng);
      same_sim = simulate(p, env, 3) == simulate(back, env, 3);
    }
    v.require(same_sim, "program " + std::to_string(i) + " simulates differently after the round trip");
    sim += same_sim;
  }
  v.detail << iso << "/100 isomorphic, " << sim << "/100 simulation-equal, " << prims << " instances in total";
  return v;
}

Verdict portfolio_behavior() {
  Verdict v;
  if (solvers().empty()) {
    v.require(false, "no SMT solver on PATH");
    return v;
  }
  const SolverConfig live = solvers().front();
  const SolverConfig wedged{"wedged", {"sleep", "1000"}, 60};
  std::size_t live_wins = 0;
  for (int i = 0; i < 10; ++i) {
    std::string script = "(set-logic QF_BV)\n(declare-const x (_ BitVec 8))\n(assert (= (bvmul x #x03) #x" +
                         [&] {
                           std::ostringstream os;
                           os << std::hex << std::setw(2) << std::setfill('0') << ((3 * (i + 1)) & 0xff);
                           return os.str();
                         }() +
                         "))\n(check-sat)\n(get-value (x))\n";
    auto order = i % 2 ? std::vector<SolverConfig>{live, wedged} : std::vector<SolverConfig>{wedged, live};
    auto r = portfolio_solve(script, order, 60);
    bool good = r.status == SatStatus::Sat && r.winner == live.name && r.model.count("x") &&
                r.model.at("x") == BitVec(8, static_cast<std::uint64_t>(i + 1));
    v.require(good, "run " + std::to_string(i) + " did not resolve through " + live.name);
    live_wins += good;
  }
  v.detail << live_wins << "/10 queries answered by " << live.name << " beside a wedged backend";
  return v;
}

}  // namespace

int main(int argc, char** argv) {
  const std::vector<std::pair<std::string, std::function<Verdict()>>> criteria = {
      {"LUT-function completeness on SOFA", lut_completeness},
      {"bitwise-with-carry add/sub w=2..8", carry_arithmetic},
      {"MiniDSP microbenchmark suite", minidsp_suite},
      {"unsat verdicts match hole enumeration", unsat_soundness},
      {"bounded window semantics", window_semantics},
      {"symbolic/concrete agreement", symbolic_agreement},
      {"well-formedness oracle", well_formedness_oracle},
      {"btor2 import", btor2_import},
      {"netlist round trip", netlist_round_trip},
      {"portfolio with a wedged backend", portfolio_behavior},
  };
  std::set<std::size_t> only;
  for (int i = 1; i < argc; ++i) only.insert(std::stoul(argv[i]));
  bool all = true;
  for (std::size_t k = 0; k < criteria.size(); ++k) {
    if (!only.empty() && !only.count(k + 1)) continue;
    const auto start = std::chrono::steady_clock::now();
    Verdict v;
    try {
      v = criteria[k].second();
    } catch (const std::exception& e) {
      v.require(false, std::string("exception: ") + e.what());
    }
    double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    std::cout << (v.pass ? "PASS" : "FAIL") << " criterion " << k + 1 << ": " << criteria[k].first << " -- "
              << v.detail.str() << " [" << std::fixed << std::setprecision(1) << secs << " s]" << std::endl;
    all = all && v.pass;
  }
  return all ? 0 : 1;
}
