#include "sketchmap/symbolic.hpp"

#include <algorithm>
#include <set>

#include "sketchmap/errors.hpp"
#include "sketchmap/unroll.hpp"
#include "sketchmap/well_formed.hpp"

namespace sketchmap {

namespace {

std::uint32_t selector_width(std::size_t k) {
  std::uint32_t w = 1;
  while ((std::size_t{1} << w) < k) ++w;
  return w;
}

struct SymbolicAlgebra {
  using Value = TermId;

  TermStore* store;
  SymbolicTrace* trace;
  bool vars_are_holes = false;  // constraint programs read hole labels as variables
  std::set<std::string> constrained;

  TermId constant(const BitVec& b) const { return store->constant(b); }

  TermId variable(const VarNode& var, std::uint32_t t) const {
    if (vars_are_holes) return store->hole(var.name, var.width);
    return store->input(var.name, t, var.width);
  }

  template <typename U>
  TermId hole(const HoleNode& h, Id id, std::uint32_t t, U& unroller) {
    if (const auto* c = std::get_if<ConstantHole>(&h.spec)) {
      TermId sym = store->hole(h.label, c->width);
      trace->holes.emplace(h.label, HoleEncoding{h.label, sym, c->width, false, 0});
      return sym;
    }
    const auto& alts = std::get<ChoiceHole>(h.spec).alternatives;
    const std::size_t k = alts.size();
    const std::uint32_t sw = selector_width(k);
    TermId sel = store->hole(h.label, sw);
    trace->holes.emplace(h.label, HoleEncoding{h.label, sel, sw, true, k});
    if ((std::size_t{1} << sw) != k && constrained.insert(h.label).second) {
      trace->side_constraints.push_back(
          store->apply(OpKind::Ult, {sel, store->constant(BitVec(sw, k))}));
    }
    // Alternatives in order: ite(sel == 0, alt0, ite(sel == 1, alt1, ... alt_{k-1})).
    TermId acc = unroller.eval_detached(t, alts[k - 1], id);
    for (std::size_t i = k - 1; i-- > 0;) {
      TermId value = unroller.eval_detached(t, alts[i], id);
      TermId cond = store->apply(OpKind::Eq, {sel, store->constant(BitVec(sw, i))});
      acc = store->ite(cond, value, acc);
    }
    return acc;
  }

  TermId apply(const Operator& op, std::vector<TermId> args) const { return store->apply(op, std::move(args)); }
};

}  // namespace

SymbolicTrace symbolic_interp(const Prog& p, std::uint32_t t, TermStore& store) {
  check_well_formed(p);
  SymbolicTrace trace;
  SymbolicAlgebra algebra{.store = &store, .trace = &trace, .vars_are_holes = false, .constrained = {}};
  Unroller<SymbolicAlgebra> unroller(p, algebra);
  trace.root.reserve(t + 1);
  for (std::uint32_t i = 0; i <= t; ++i) trace.root.push_back(unroller.root(i));
  return trace;
}

std::vector<TermId> symbolic_interp(const Prog& p, std::uint32_t t, const std::shared_ptr<TermStore>& store) {
  return symbolic_interp(p, t, *store).root;
}

TermId constraint_term(const Prog& constraint, TermStore& store) {
  check_well_formed(constraint);
  SymbolicTrace trace;
  SymbolicAlgebra algebra{.store = &store, .trace = &trace, .vars_are_holes = true, .constrained = {}};
  Unroller<SymbolicAlgebra> unroller(constraint, algebra);
  TermId term = unroller.root(0);
  if (store.width(term) != 1) throw WidthError("constraint must be 1 bit wide");
  return term;
}

EquivalenceQuery build_query(const Prog& spec, const Sketch& sketch, std::uint32_t t, std::uint32_t c) {
  if (!is_hole_free(spec)) throw Error("reference design contains holes");
  auto spec_vars = free_var_widths(spec);
  auto sketch_vars = free_var_widths(sketch.psi);
  std::set<std::string> spec_names;
  std::set<std::string> sketch_names;
  for (const auto& [n, w] : spec_vars) spec_names.insert(n);
  for (const auto& [n, w] : sketch_vars) sketch_names.insert(n);
  if (spec_names != sketch_names) {
    std::string msg = "free variables differ: spec {";
    for (const auto& n : spec_names) msg += " " + n;
    msg += " } vs sketch {";
    for (const auto& n : sketch_names) msg += " " + n;
    throw FreeVarMismatch(msg + " }");
  }
  for (const auto& [name, width] : spec_vars) {
    if (sketch_vars.at(name) != width) throw WidthError("variable " + name + " has different widths");
  }
  check_well_formed(spec);
  check_well_formed(sketch.psi);
  if (root_width(spec) != root_width(sketch.psi)) throw WidthError("spec and sketch root widths differ");

  EquivalenceQuery q;
  q.store = std::make_shared<TermStore>();
  q.t = t;
  q.c = c;
  q.spec = spec;
  q.sketch = sketch;
  auto spec_trace = symbolic_interp(spec, t + c, *q.store);
  auto sketch_trace = symbolic_interp(sketch.psi, t + c, *q.store);
  for (std::uint32_t i = t; i <= t + c; ++i) {
    q.spec_terms.push_back(spec_trace.root[i]);
    q.sketch_terms.push_back(sketch_trace.root[i]);
  }
  q.holes = sketch_trace.holes;
  q.side_constraints = sketch_trace.side_constraints;

  // Holes never reached while unrolling (e.g. dead logic) still need a value.
  for (const auto& [label, spec_h] : sketch.holes) {
    if (q.holes.count(label)) continue;
    if (const auto* ch = std::get_if<ConstantHole>(&spec_h)) {
      q.holes.emplace(label, HoleEncoding{label, q.store->hole(label, ch->width), ch->width, false, 0});
    } else {
      std::size_t k = std::get<ChoiceHole>(spec_h).alternatives.size();
      std::uint32_t sw = selector_width(k);
      TermId sel = q.store->hole(label, sw);
      q.holes.emplace(label, HoleEncoding{label, sel, sw, true, k});
      if ((std::size_t{1} << sw) != k) {
        q.side_constraints.push_back(q.store->apply(OpKind::Ult, {sel, q.store->constant(BitVec(sw, k))}));
      }
    }
  }
  for (const auto& constraint : sketch.constraints) q.side_constraints.push_back(constraint_term(constraint, *q.store));

  std::vector<TermId> roots = q.spec_terms;
  roots.insert(roots.end(), q.sketch_terms.begin(), q.sketch_terms.end());
  for (TermId leaf : q.store->leaves(roots)) {
    if ((*q.store)[leaf].kind == TermKind::Input) q.input_symbols.push_back(leaf);
  }
  for (const auto& [label, enc] : q.holes) q.hole_symbols.push_back(enc.symbol);
  std::sort(q.hole_symbols.begin(), q.hole_symbols.end());
  return q;
}

}  // namespace sketchmap
