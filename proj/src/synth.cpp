#include "sketchmap/synth.hpp"

#include <algorithm>
#include <chrono>
#include <set>

#include "sketchmap/errors.hpp"
#include "sketchmap/interp.hpp"
#include "sketchmap/smtlib.hpp"

namespace sketchmap {

std::string to_string(SynthesisStatus s) {
  switch (s) {
    case SynthesisStatus::Success: return "success";
    case SynthesisStatus::Unsat: return "unsat";
    case SynthesisStatus::Timeout: return "timeout";
  }
  return "?";
}

std::map<std::string, Node> assignment_from_model(const Sketch& sketch, const std::map<std::string, BitVec>& model) {
  std::map<std::string, Node> out;
  for (const auto& [label, spec] : sketch.holes) {
    auto it = model.find(label);
    if (const auto* c = std::get_if<ConstantHole>(&spec)) {
      BitVec v = it == model.end() ? BitVec::zero(c->width) : it->second;
      if (v.width() != c->width) throw DomainError("model value for " + label + " has the wrong width");
      out.emplace(label, BvNode{v});
    } else {
      const auto& alts = std::get<ChoiceHole>(spec).alternatives;
      std::uint64_t index = it == model.end() ? 0 : it->second.value();
      if (index >= alts.size()) throw DomainError("selector for " + label + " is out of range");
      out.emplace(label, alts[index]);
    }
  }
  return out;
}

namespace {

using Clock = std::chrono::steady_clock;
using Assignment = std::map<TermId, BitVec>;

class Cegis {
 public:
  Cegis(const EquivalenceQuery& q, const std::vector<SolverConfig>& solvers, const CegisOptions& options)
      : q_(q), store_(*q.store), solvers_(solvers), options_(options), start_(Clock::now()) {
    for (TermId h : q.hole_symbols) symbol_to_term_[smt_symbol(store_, h)] = h;
    for (TermId i : q.input_symbols) symbol_to_term_[smt_symbol(store_, i)] = i;
    for (const auto& [label, enc] : q.holes) hole_label_[enc.symbol] = label;
  }

  SynthesisResult run() {
    if (solvers_.empty()) throw SolverError("no solver configured");
    return options_.quantified ? run_quantified() : run_loop();
  }

 private:
  double elapsed() const { return std::chrono::duration<double>(Clock::now() - start_).count(); }
  double remaining() const { return options_.timeout - elapsed(); }

  SynthesisResult finish(SynthesisStatus status) {
    result_.status = status;
    result_.seconds = elapsed();
    return result_;
  }

  /// Solves `check`; nullopt means the budget ran out.
  std::optional<SolveResult> solve(const SmtCheck& check) {
    if (remaining() <= 0) return std::nullopt;
    SolveResult r = portfolio_solve(emit_smtlib(store_, check), solvers_, remaining());
    if (r.status == SatStatus::Timeout) return std::nullopt;
    last_solver_ = r.winner;
    return r;
  }

  Assignment decode(const std::map<std::string, BitVec>& model, const std::vector<TermId>& wanted) const {
    Assignment out;
    for (TermId id : wanted) {
      auto it = model.find(smt_symbol(store_, id));
      out[id] = it == model.end() ? BitVec::zero(store_.width(id)) : it->second;
      if (out[id].width() != store_.width(id)) throw SolverError("solver returned a value of the wrong width");
    }
    return out;
  }

  TermId bind(TermId term, const Assignment& values, std::unordered_map<TermId, TermId>& memo) {
    return store_.substitute(
        term,
        [&](TermId leaf) -> std::optional<TermId> {
          auto it = values.find(leaf);
          if (it == values.end()) return std::nullopt;
          return store_.constant(it->second);
        },
        memo);
  }

  std::vector<TermId> symbols_in(const std::vector<TermId>& roots, TermKind kind) const {
    std::vector<TermId> out;
    for (TermId l : store_.leaves(roots)) {
      if (store_[l].kind == kind) out.push_back(l);
    }
    return out;
  }

  /// Term that is 1 exactly when the candidate disagrees with the design at some checked cycle.
  TermId violation(const Assignment& holes) {
    std::unordered_map<TermId, TermId> memo;
    TermId any = store_.constant(BitVec(1, 0));
    for (std::size_t i = 0; i < q_.spec_terms.size(); ++i) {
      TermId impl = bind(q_.sketch_terms[i], holes, memo);
      TermId differs = store_.apply(OpKind::Not, {store_.apply(OpKind::Eq, {q_.spec_terms[i], impl})});
      any = store_.apply(OpKind::Or, {any, differs});
    }
    return any;
  }

  /// Adds the equalities demanded by one counterexample; false if one is already violated outright.
  bool add_counterexample(const Assignment& cex) {
    std::unordered_map<TermId, TermId> memo;
    for (std::size_t i = 0; i < q_.spec_terms.size(); ++i) {
      TermId eq = store_.apply(OpKind::Eq, {bind(q_.spec_terms[i], cex, memo), bind(q_.sketch_terms[i], cex, memo)});
      if (auto v = store_.const_value(eq)) {
        if (v->value() == 0) return false;
        continue;
      }
      synth_assertions_.push_back(eq);
    }
    return true;
  }

  SynthesisResult run_loop() {
    // Side constraints are part of every synthesis query.
    for (TermId s : q_.side_constraints) {
      if (auto v = store_.const_value(s)) {
        if (v->value() == 0) return finish(SynthesisStatus::Unsat);
        continue;
      }
      synth_assertions_.push_back(s);
    }
    Assignment candidate;
    if (!next_candidate(candidate)) return result_.status == SynthesisStatus::Unsat ? finish(SynthesisStatus::Unsat)
                                                                                     : finish(SynthesisStatus::Timeout);
    std::set<Assignment> seen;
    for (;;) {
      ++result_.iterations;
      TermId bad = violation(candidate);
      Assignment cex;
      if (auto v = store_.const_value(bad)) {
        if (v->value() == 0) return success(candidate, "simplifier");
        for (TermId i : q_.input_symbols) cex[i] = BitVec::zero(store_.width(i));
      } else {
        SmtCheck check;
        check.assertions = {bad};
        check.get_values = symbols_in({bad}, TermKind::Input);
        auto r = solve(check);
        if (!r) return finish(SynthesisStatus::Timeout);
        if (r->status == SatStatus::Unsat) return success(candidate, r->winner);
        cex = decode(r->model, q_.input_symbols);
      }
      if (!seen.insert(cex).second) throw Error("counterexample repeated; CEGIS made no progress");
      counterexamples_.push_back(cex);
      if (options_.on_counterexample) options_.on_counterexample(cex);
      if (!add_counterexample(cex)) return finish(SynthesisStatus::Unsat);
      if (!next_candidate(candidate)) {
        return result_.status == SynthesisStatus::Unsat ? finish(SynthesisStatus::Unsat)
                                                         : finish(SynthesisStatus::Timeout);
      }
    }
  }

  /// SYNTH phase; false on Unsat (recorded in result_) or timeout.
  bool next_candidate(Assignment& candidate) {
    candidate.clear();
    for (TermId h : q_.hole_symbols) candidate[h] = BitVec::zero(store_.width(h));
    if (synth_assertions_.empty()) return true;
    SmtCheck check;
    check.assertions = synth_assertions_;
    check.get_values = symbols_in(synth_assertions_, TermKind::Hole);
    auto r = solve(check);
    if (!r) {
      result_.status = SynthesisStatus::Timeout;
      return false;
    }
    if (r->status == SatStatus::Unsat) {
      result_.status = SynthesisStatus::Unsat;
      return false;
    }
    for (const auto& [id, v] : decode(r->model, check.get_values)) candidate[id] = v;
    return true;
  }

  SynthesisResult run_quantified() {
    ++result_.iterations;
    SmtCheck check;
    for (std::size_t i = 0; i < q_.spec_terms.size(); ++i) {
      check.assertions.push_back(store_.apply(OpKind::Eq, {q_.spec_terms[i], q_.sketch_terms[i]}));
    }
    check.assertions.insert(check.assertions.end(), q_.side_constraints.begin(), q_.side_constraints.end());
    check.get_values = q_.hole_symbols;
    check.universal = q_.input_symbols;
    auto r = solve(check);
    if (!r) return finish(SynthesisStatus::Timeout);
    if (r->status == SatStatus::Unsat) return finish(SynthesisStatus::Unsat);
    return success(decode(r->model, q_.hole_symbols), r->winner);
  }

  Env env_of(const Assignment& inputs) const {
    Env env;
    const std::uint32_t horizon = q_.t + q_.c;
    for (const auto& [name, width] : free_var_widths(q_.spec)) env[name] = Stream(horizon + 1, BitVec::zero(width));
    for (const auto& [id, value] : inputs) {
      const Term& term = store_[id];
      if (term.time <= horizon) env[term.name][term.time] = value;
    }
    return env;
  }

  SynthesisResult success(const Assignment& holes, const std::string& solver) {
    for (const auto& [id, v] : holes) {
      auto it = hole_label_.find(id);
      if (it != hole_label_.end()) result_.model[it->second] = v;
    }
    result_.program = substitute_holes(q_.sketch, assignment_from_model(q_.sketch, result_.model));
    result_.solver = solver;

    // Independent re-check with the concrete interpreter.
    std::vector<Assignment> envs = counterexamples_;
    envs.emplace_back();
    for (const auto& inputs : envs) {
      Env env = env_of(inputs);
      auto expect = simulate(q_.spec, env, q_.t + q_.c);
      auto got = simulate(result_.program, env, q_.t + q_.c);
      for (std::uint32_t i = q_.t; i <= q_.t + q_.c; ++i) {
        if (expect[i] != got[i]) {
          throw SoundnessFailure("synthesized program disagrees with the design at cycle " + std::to_string(i) +
                                 ": expected " + expect[i].to_hex() + ", got " + got[i].to_hex());
        }
      }
    }
    return finish(SynthesisStatus::Success);
  }

  const EquivalenceQuery& q_;
  TermStore& store_;
  const std::vector<SolverConfig>& solvers_;
  const CegisOptions& options_;
  Clock::time_point start_;
  std::map<std::string, TermId> symbol_to_term_;
  std::map<TermId, std::string> hole_label_;
  std::vector<TermId> synth_assertions_;
  std::vector<Assignment> counterexamples_;
  std::string last_solver_;
  SynthesisResult result_;
};

}  // namespace

SynthesisResult cegis(const EquivalenceQuery& q, const std::vector<SolverConfig>& solvers,
                      const CegisOptions& options) {
  return Cegis(q, solvers, options).run();
}

SynthesisResult synthesize(const Prog& spec, const Sketch& sketch, std::uint32_t t, std::uint32_t c,
                           const std::vector<SolverConfig>& solvers, const CegisOptions& options) {
  auto q = build_query(spec, sketch, t, c);
  return cegis(q, solvers, options);
}

}  // namespace sketchmap
