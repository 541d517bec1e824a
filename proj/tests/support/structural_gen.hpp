#pragma once

// Random structural programs: built-in LUT, MUX, carry and MiniDSP instances
// wired through extract/concat/zero-extend, with constant parameters.

#include <random>
#include <vector>

#include "sketch_helpers.hpp"
#include "sketchmap/ir.hpp"
#include "sketchmap/primitives.hpp"

namespace testsupport {

struct StructuralGenOptions {
  std::size_t max_prims = 20;
  /// Allow clocked MiniDSP instances.
  bool with_dsp = true;
};

inline Prog random_structural(std::mt19937_64& rng, const StructuralGenOptions& opt = {}) {
  IdAllocator ids(1);
  ProgBuilder b(ids);
  auto pick = [&](std::size_t n) { return static_cast<std::size_t>(rng() % n); };

  struct Signal {
    Id id;
    std::uint32_t width;
  };
  std::vector<Signal> pool;
  const std::size_t num_vars = 1 + pick(3);
  for (std::size_t i = 0; i < num_vars; ++i) {
    auto w = static_cast<std::uint32_t>(1 + pick(8));
    pool.push_back({b.var(std::string(1, static_cast<char>('a' + i)), w), w});
  }

  // A w-bit value assembled from random slices of the pool and constants.
  auto wire = [&](std::uint32_t w) -> Id {
    std::vector<Id> parts;  // least significant first
    std::uint32_t have = 0;
    while (have < w) {
      std::uint32_t need = w - have;
      auto roll = pick(10);
      if (roll == 0) {
        auto k = static_cast<std::uint32_t>(1 + pick(need));
        parts.push_back(b.bv(BitVec::truncate(k, rng())));
        have += k;
        continue;
      }
      const Signal& s = pool[pick(pool.size())];
      if (roll == 1 && s.width < need) {
        auto k = static_cast<std::uint32_t>(1 + pick(need - s.width));
        parts.push_back(b.op(Operator::zero_extend(k), {s.id}));
        have += s.width + k;
        continue;
      }
      auto k = static_cast<std::uint32_t>(1 + pick(std::min(need, s.width)));
      if (k == s.width) {
        parts.push_back(s.id);
      } else {
        auto lo = static_cast<std::uint32_t>(pick(s.width - k + 1));
        parts.push_back(b.op(Operator::extract(lo + k - 1, lo), {s.id}));
      }
      have += k;
    }
    if (parts.size() == 1) return parts[0];
    return b.op(OpKind::Concat, std::vector<Id>(parts.rbegin(), parts.rend()));
  };

  const std::size_t num_prims = 1 + pick(opt.max_prims);
  std::vector<Signal> prim_outputs;
  for (std::size_t n = 0; n < num_prims; ++n) {
    PrimitiveModel model;
    auto kind = pick(opt.with_dsp ? 10 : 9);
    if (kind < 5) {
      model = lut_model(static_cast<std::uint32_t>(1 + pick(4)));
    } else if (kind < 7) {
      model = carry_model(static_cast<std::uint32_t>(1 + pick(4)));
    } else if (kind < 9) {
      model = mux_model(pick(2) ? 2 : 4);
    } else {
      model = minidsp_model(static_cast<std::uint32_t>(4 + pick(3)));
    }
    std::map<std::string, Id> binds;
    for (const auto& port : model.ports) {
      if (port.direction == PortDirection::Input) binds[port.name] = wire(port.width);
    }
    for (const auto& [name, w] : model.internal_data) binds[name] = b.bv(BitVec::truncate(w, rng()));
    PrimNode prim = prim_of(model, binds, ids);
    for (const auto& port : model.ports) {
      if (port.direction == PortDirection::Clock) prim.meta.clock_port = port.name;
    }
    std::uint32_t width = 0;
    for (const auto& out : prim.meta.outputs) width += out.width;
    Id id = ids.fresh();
    b.set(id, std::move(prim));
    pool.push_back({id, width});
    prim_outputs.push_back({id, width});
  }

  // The output gathers every instance so all of them stay reachable.
  std::vector<Id> parts;
  std::uint32_t total = 0;
  for (const auto& s : prim_outputs) {
    std::uint32_t k = std::min<std::uint32_t>(s.width, 1 + static_cast<std::uint32_t>(pick(3)));
    if (total + k > BitVec::kMaxWidth) break;
    parts.push_back(k == s.width ? s.id : b.op(Operator::extract(k - 1, 0), {s.id}));
    total += k;
  }
  Id root = parts.size() == 1 ? parts[0] : b.op(OpKind::Concat, std::vector<Id>(parts.rbegin(), parts.rend()));
  return b.build(root);
}

}  // namespace testsupport
