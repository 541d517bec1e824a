#include <doctest.h>

#include "random_progs.hpp"
#include "sketchmap/errors.hpp"
#include "sketchmap/ir.hpp"
#include "sketchmap/ops.hpp"
#include "sketchmap/well_formed.hpp"

using namespace sketchmap;

namespace {

Prog prog(Id root, std::map<Id, Node> nodes) { return Prog{root, std::move(nodes)}; }

WellFormednessKind failure_kind(const Prog& p) {
  try {
    check_well_formed(p);
  } catch (const WellFormednessError& e) {
    return e.kind();
  }
  FAIL("program unexpectedly well-formed");
  return WellFormednessKind::Width;
}

/// Prim over a body {x -> not x}, x bound to `arg`, with ids `x` and `r` in the body.
PrimNode inverter(Id arg, Id x, Id r, std::uint32_t width = 1) {
  auto body = std::make_shared<Prog>();
  body->nodes.emplace(x, VarNode{"x", width});
  body->nodes.emplace(r, OpNode{Operator{OpKind::Not}, {x}});
  body->root = r;
  PrimNode prim;
  prim.binds["x"] = arg;
  prim.body = body;
  prim.meta.module_name = "inv";
  return prim;
}

}  // namespace

TEST_CASE("inputs of each node kind") {
  CHECK(inputs(BvNode{BitVec(4, 0xF)}).empty());
  CHECK(inputs(RegNode{7, BitVec(1, 0)}) == std::set<Id>{7});
  CHECK(inputs(OpNode{Operator{OpKind::Add}, {3, 5}}) == std::set<Id>{3, 5});
  CHECK(inputs(VarNode{"a", 1}).empty());
  CHECK(inputs(HoleNode{"h", ConstantHole{4}}).empty());
  CHECK(inputs(inverter(9, 10, 11)) == std::set<Id>{9});
}

TEST_CASE("free variables exclude sub-program variables") {
  auto p = prog(3, {{1, VarNode{"a", 4}}, {2, VarNode{"b", 4}}, {3, OpNode{Operator{OpKind::Add}, {1, 2}}}});
  CHECK(free_vars(p) == std::set<std::string>{"a", "b"});

  auto q = prog(2, {{1, VarNode{"a", 1}}, {2, inverter(1, 3, 4)}});
  CHECK(free_vars(q) == std::set<std::string>{"a"});

  CHECK(free_vars(prog(1, {{1, BvNode{BitVec(1, 0)}}})).empty());
}

TEST_CASE("register feeding itself is well-formed with w = 0") {
  auto p = prog(2, {{1, VarNode{"a", 4}}, {2, RegNode{2, BitVec(4, 0)}}});
  auto w = check_well_formed(p);
  CHECK(w.at(2) == 0);
  CHECK(testsupport::witness_holds(p, w));
}

TEST_CASE("combinational self loop is a W6 violation") {
  auto p = prog(1, {{1, OpNode{Operator{OpKind::And}, {1, 1}}}});
  CHECK(failure_kind(p) == WellFormednessKind::W6);
}

TEST_CASE("missing root is a W1 violation") {
  auto p = prog(9, {{1, BvNode{BitVec(1, 0)}}});
  CHECK(failure_kind(p) == WellFormednessKind::W1);
}

TEST_CASE("W2, W3, W4 and W5 violations are reported by kind") {
  // Body reuses outer id 1.
  auto dup = prog(2, {{1, VarNode{"a", 1}}, {2, inverter(1, 1, 4)}});
  CHECK(failure_kind(dup) == WellFormednessKind::W2);

  auto dangling = prog(2, {{2, OpNode{Operator{OpKind::Not}, {7}}}});
  CHECK(failure_kind(dangling) == WellFormednessKind::W3);

  auto bad_body = inverter(1, 3, 4);
  auto body = std::make_shared<Prog>(*bad_body.body);
  body->root = 99;
  bad_body.body = body;
  CHECK(failure_kind(prog(2, {{1, VarNode{"a", 1}}, {2, bad_body}})) == WellFormednessKind::W4);

  auto unbound = inverter(1, 3, 4);
  unbound.binds = {{"y", 1}};
  CHECK(failure_kind(prog(2, {{1, VarNode{"a", 1}}, {2, unbound}})) == WellFormednessKind::W5);
}

TEST_CASE("loop through a primitive binding is a W6 violation") {
  // Prim 2 feeds its own input through its body.
  auto p = prog(2, {{2, inverter(2, 3, 4)}});
  CHECK(failure_kind(p) == WellFormednessKind::W6);
}

TEST_CASE("width rule violations") {
  auto p = prog(3, {{1, VarNode{"a", 4}}, {2, VarNode{"b", 3}}, {3, OpNode{Operator{OpKind::Add}, {1, 2}}}});
  CHECK(failure_kind(p) == WellFormednessKind::Width);
  auto r = prog(2, {{1, VarNode{"a", 4}}, {2, RegNode{1, BitVec(2, 0)}}});
  CHECK(failure_kind(r) == WellFormednessKind::Width);
}

TEST_CASE("substitute_holes") {
  Sketch s;
  s.psi = prog(2, {{1, VarNode{"a", 16}}, {2, OpNode{Operator{OpKind::And}, {1, 3}}}, {3, HoleNode{"sram", ConstantHole{16}}}});
  s.holes["sram"] = ConstantHole{16};

  SUBCASE("constant hole") {
    auto p = substitute_holes(s, {{"sram", BvNode{BitVec(16, 0x6)}}});
    CHECK(is_hole_free(p));
    CHECK(p.at(3) == Node(BvNode{BitVec(16, 0x6)}));
    check_well_formed(p);
  }
  SUBCASE("missing label") { CHECK_THROWS_AS(substitute_holes(s, {}), MissingAssignment); }
  SUBCASE("wrong width") {
    CHECK_THROWS_AS(substitute_holes(s, {{"sram", BvNode{BitVec(8, 0x6)}}}), DomainError);
  }

  SUBCASE("choice hole") {
    Sketch c;
    Node add = OpNode{Operator{OpKind::Add}, {1, 2}};
    Node sub = OpNode{Operator{OpKind::Sub}, {1, 2}};
    c.psi = prog(3, {{1, VarNode{"a", 4}}, {2, VarNode{"b", 4}}, {3, HoleNode{"op", ChoiceHole{{add, sub}}}}});
    c.holes["op"] = ChoiceHole{{add, sub}};
    auto p = substitute_holes(c, {{"op", sub}});
    CHECK(p.at(3) == sub);
    CHECK_THROWS_AS(substitute_holes(c, {{"op", Node(OpNode{Operator{OpKind::Mul}, {1, 2}})}}), DomainError);
  }
}

TEST_CASE("substitute_holes is the identity on hole-free programs") {
  testsupport::Rng rng(11);
  testsupport::AcyclicGenerator gen(rng, 12, 6);
  for (int i = 0; i < 100; ++i) {
    Sketch s;
    s.psi = gen();
    CHECK(substitute_holes(s, {}).nodes == s.psi.nodes);
  }
}

TEST_CASE("free variables survive substitution of variable-free nodes") {
  Sketch s;
  s.psi = prog(3, {{1, VarNode{"a", 4}}, {2, HoleNode{"k", ConstantHole{4}}}, {3, OpNode{Operator{OpKind::Xor}, {1, 2}}}});
  s.holes["k"] = ConstantHole{4};
  for (std::uint64_t v = 0; v < 16; ++v) {
    auto p = substitute_holes(s, {{"k", BvNode{BitVec(4, v)}}});
    CHECK(free_vars(p) == free_vars(s.psi));
  }
}

TEST_CASE("returned witnesses satisfy monotonicity") {
  testsupport::Rng rng(5);
  testsupport::AcyclicGenerator gen(rng, 12, 6);
  for (int i = 0; i < 300; ++i) {
    auto p = gen();
    auto w = check_well_formed(p);
    CHECK(testsupport::witness_holds(p, w));
  }
}

TEST_CASE("well-formedness verdict matches brute-force witness search up to 8 nodes") {
  testsupport::Rng rng(99);
  int rejected = 0;
  for (int i = 0; i < 400; ++i) {
    auto p = testsupport::random_loop_candidate(rng, 8);
    bool accepted = true;
    try {
      auto w = check_well_formed(p);
      CHECK(testsupport::witness_holds(p, w));
    } catch (const WellFormednessError& e) {
      CHECK(e.kind() == WellFormednessKind::W6);
      accepted = false;
      ++rejected;
    }
    CHECK(accepted == testsupport::brute_force_witness_exists(p));
  }
  CHECK(rejected > 0);
}

TEST_CASE("canonical s-expression dump is stable and sorted") {
  auto p = prog(3, {{3, OpNode{Operator{OpKind::Add}, {1, 2}}}, {1, VarNode{"a", 4}}, {2, BvNode{BitVec(4, 0xA)}}});
  auto text = to_sexpr(p);
  CHECK(text == to_sexpr(p));
  CHECK(text.find("(1 ") < text.find("(2 "));
  CHECK(text.find("(2 ") < text.find("(3 "));
}

TEST_CASE("eval_op examples") {
  std::vector<BitVec> cat{BitVec(2, 0b10), BitVec(1, 1)};
  CHECK(eval_op(Operator{OpKind::Concat}, cat) == BitVec(3, 0b101));
  std::vector<BitVec> ex{BitVec(4, 0b1100)};
  CHECK(eval_op(Operator::extract(3, 2), ex) == BitVec(2, 0b11));
  std::vector<BitVec> mul{BitVec(4, 7), BitVec(4, 3)};
  CHECK(eval_op(Operator{OpKind::Mul}, mul) == BitVec(4, 5));
  std::vector<BitVec> mux{BitVec(1, 1), BitVec(4, 2), BitVec(4, 9)};
  CHECK(eval_op(Operator{OpKind::Mux}, mux) == BitVec(4, 2));
  std::vector<BitVec> bad{BitVec(4, 1), BitVec(3, 1)};
  CHECK_THROWS_AS(eval_op(Operator{OpKind::Add}, bad), WidthError);
  std::vector<BitVec> one{BitVec(4, 1)};
  CHECK_THROWS_AS(eval_op(Operator{OpKind::Add}, one), ArityError);
  CHECK_THROWS_AS(eval_op(Operator::extract(4, 0), one), WidthError);
  CHECK_THROWS_AS(BitVec(4, 16), WidthError);
}
