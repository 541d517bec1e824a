#include <doctest.h>

#include "random_progs.hpp"
#include "sketchmap/errors.hpp"
#include "sketchmap/interp.hpp"

using namespace sketchmap;

namespace {

Stream bits(std::uint32_t width, std::initializer_list<std::uint64_t> values) {
  Stream s;
  for (auto v : values) s.push_back(BitVec(width, v));
  return s;
}

}  // namespace

TEST_CASE("register yields init at t=0 and the previous data value afterwards") {
  Prog p{2, {{1, VarNode{"x", 8}}, {2, RegNode{1, BitVec(8, 0xAB)}}}};
  Env env{{"x", bits(8, {0x11, 0x22, 0x33})}};
  CHECK(interp(p, env, 0, 2) == BitVec(8, 0xAB));
  CHECK(interp(p, env, 1, 2) == BitVec(8, 0x11));
  CHECK(interp(p, env, 2, 2) == BitVec(8, 0x22));
}

TEST_CASE("addition wraps around") {
  Prog p{3, {{1, VarNode{"a", 4}}, {2, VarNode{"b", 4}}, {3, OpNode{Operator{OpKind::Add}, {1, 2}}}}};
  Env env{{"a", bits(4, {0xF})}, {"b", bits(4, {0x1})}};
  CHECK(interp(p, env, 0, 3) == BitVec(4, 0));
}

TEST_CASE("pipelined AND trace") {
  Prog p{4,
         {{1, VarNode{"a", 1}},
          {2, VarNode{"b", 1}},
          {3, OpNode{Operator{OpKind::And}, {1, 2}}},
          {4, RegNode{3, BitVec(1, 0)}}}};
  Env env{{"a", bits(1, {1, 1})}, {"b", bits(1, {1, 0})}};
  // t=0: init 0; t=1: a0 & b0 = 1.
  CHECK(simulate(p, env, 1) == bits(1, {0, 1}));
  CHECK(simulate(p, env, 0) == bits(1, {0}));
  CHECK(format_trace(simulate(p, env, 1)) == "t=0 out=0\nt=1 out=1\n");
}

TEST_CASE("reading past the end of a stream is an error") {
  Prog p{1, {{1, VarNode{"a", 1}}}};
  Env env{{"a", bits(1, {1})}};
  CHECK_THROWS_AS(interp(p, env, 1, 1), HorizonExceeded);
}

TEST_CASE("primitive body reads the bound outer value") {
  auto body = std::make_shared<Prog>();
  body->nodes.emplace(10, VarNode{"x", 4});
  body->nodes.emplace(11, BvNode{BitVec(4, 3)});
  body->nodes.emplace(12, OpNode{Operator{OpKind::Add}, {10, 11}});
  body->root = 12;
  PrimNode prim;
  prim.binds["x"] = 1;
  prim.body = body;
  Prog p{2, {{1, VarNode{"a", 4}}, {2, prim}}};
  Env env{{"a", bits(4, {5})}};
  CHECK(interp(p, env, 0, 2) == BitVec(4, 8));
}

TEST_CASE("combinational program trace matches per-cycle interp") {
  testsupport::Rng rng(3);
  testsupport::AcyclicGenerator gen(rng, 12, 6);
  for (int i = 0; i < 50; ++i) {
    auto p = gen();
    auto env = random_env(p, 5, rng);
    auto trace = simulate(p, env, 4);
    for (std::uint32_t t = 0; t <= 4; ++t) CHECK(trace[t] == interp(p, env, t, p.root));
  }
}

TEST_CASE("memoization is observationally invisible and interp is deterministic") {
  testsupport::Rng rng(17);
  testsupport::AcyclicGenerator gen(rng, 12, 6);
  for (int i = 0; i < 300; ++i) {
    auto p = gen();
    auto env = random_env(p, 5, rng);
    Interpreter memo(p, env, true);
    Interpreter plain(p, env, false);
    for (std::uint32_t t = 0; t <= 4; ++t) {
      for (const auto& [id, node] : p.nodes) {
        auto a = memo.at(t, id);
        CHECK(a == plain.at(t, id));
        CHECK(a == interp(p, env, t, id));
      }
    }
  }
}

TEST_CASE("future inputs never affect the present") {
  testsupport::Rng rng(23);
  testsupport::AcyclicGenerator gen(rng, 12, 6);
  for (int i = 0; i < 200; ++i) {
    auto p = gen();
    auto env = random_env(p, 6, rng);
    const std::uint32_t t = static_cast<std::uint32_t>(testsupport::uniform(rng, 0, 4));
    auto before = interp(p, env, t, p.root);
    for (auto& [name, stream] : env) {
      for (std::size_t k = t + 1; k < stream.size(); ++k) stream[k] = testsupport::random_bv(rng, stream[k].width());
    }
    CHECK(interp(p, env, t, p.root) == before);
  }
}

TEST_CASE("every register holds its init at t=0") {
  testsupport::Rng rng(29);
  testsupport::AcyclicGenerator gen(rng, 12, 6);
  for (int i = 0; i < 200; ++i) {
    auto p = gen();
    auto env = random_env(p, 1, rng);
    for (const auto& [id, node] : p.nodes) {
      if (const auto* reg = node.get_if<RegNode>()) CHECK(interp(p, env, 0, id) == reg->init);
    }
  }
}
