#pragma once

#include <cstdint>
#include <map>
#include <memory>
#include <string>
#include <vector>

#include "sketchmap/bitvec.hpp"
#include "sketchmap/ir.hpp"

namespace sketchmap {

/// Values of one signal at times 0..size()-1.
using Stream = std::vector<BitVec>;
/// Variable name -> stream.
using Env = std::map<std::string, Stream>;

/// Concrete synchronous semantics of a hole-free, well-formed program.
///
/// Each instance owns its memo table, so separate instances may run on
/// separate threads over the same program.
class Interpreter {
 public:
  Interpreter(const Prog& p, const Env& env, bool memoize = true);
  ~Interpreter();
  Interpreter(const Interpreter&) = delete;
  Interpreter& operator=(const Interpreter&) = delete;

  /// Throws HorizonExceeded when a variable is read past the end of its stream.
  BitVec at(std::uint32_t t, Id id);
  BitVec root(std::uint32_t t);

 private:
  struct Impl;
  std::unique_ptr<Impl> impl_;
};

BitVec interp(const Prog& p, const Env& env, std::uint32_t t, Id n);

/// [interp(p, env, i, p.root) for i in 0..horizon].
std::vector<BitVec> simulate(const Prog& p, const Env& env, std::uint32_t horizon);

/// `t=<n> out=<hex>` per cycle, newline terminated.
std::string format_trace(const std::vector<BitVec>& trace);

/// Env with uniformly random streams of `length` cycles for every free variable of `p`.
template <typename Rng>
Env random_env(const Prog& p, std::uint32_t length, Rng& rng) {
  Env env;
  for (const auto& [name, width] : free_var_widths(p)) {
    Stream s;
    s.reserve(length);
    for (std::uint32_t i = 0; i < length; ++i) s.push_back(BitVec::truncate(width, rng()));
    env.emplace(name, std::move(s));
  }
  return env;
}

}  // namespace sketchmap
