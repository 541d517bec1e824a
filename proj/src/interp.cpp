#include "sketchmap/interp.hpp"

#include <sstream>

#include "sketchmap/errors.hpp"
#include "sketchmap/unroll.hpp"

namespace sketchmap {

namespace {

struct ConcreteAlgebra {
  using Value = BitVec;
  const Env* env;

  BitVec constant(const BitVec& b) const { return b; }

  BitVec variable(const VarNode& var, std::uint32_t t) const {
    auto it = env->find(var.name);
    if (it == env->end()) throw Error("environment has no stream for " + var.name);
    if (t >= it->second.size()) {
      throw HorizonExceeded("stream " + var.name + " has " + std::to_string(it->second.size()) +
                            " cycles; cycle " + std::to_string(t) + " requested");
    }
    const BitVec& v = it->second[t];
    if (v.width() != var.width) {
      throw WidthError("stream " + var.name + " carries " + std::to_string(v.width()) + "-bit values, expected " +
                       std::to_string(var.width));
    }
    return v;
  }

  template <typename U>
  BitVec hole(const HoleNode& h, Id, std::uint32_t, U&) const {
    throw Error("hole " + h.label + " has no concrete semantics");
  }

  BitVec apply(const Operator& op, std::vector<BitVec> args) const { return eval_op(op, args); }
};

}  // namespace

struct Interpreter::Impl {
  Env env;
  ConcreteAlgebra algebra;
  Unroller<ConcreteAlgebra> unroller;

  Impl(const Prog& p, const Env& e, bool memoize) : env(e), algebra{&env}, unroller(p, algebra, memoize) {}
};

Interpreter::Interpreter(const Prog& p, const Env& env, bool memoize)
    : impl_(std::make_unique<Impl>(p, env, memoize)) {}

Interpreter::~Interpreter() = default;

BitVec Interpreter::at(std::uint32_t t, Id id) { return impl_->unroller.at(t, id); }

BitVec Interpreter::root(std::uint32_t t) { return impl_->unroller.root(t); }

BitVec interp(const Prog& p, const Env& env, std::uint32_t t, Id n) {
  Interpreter it(p, env);
  return it.at(t, n);
}

std::vector<BitVec> simulate(const Prog& p, const Env& env, std::uint32_t horizon) {
  Interpreter it(p, env);
  std::vector<BitVec> out;
  out.reserve(horizon + 1);
  for (std::uint32_t t = 0; t <= horizon; ++t) out.push_back(it.root(t));
  return out;
}

std::string format_trace(const std::vector<BitVec>& trace) {
  std::ostringstream os;
  for (std::size_t t = 0; t < trace.size(); ++t) os << "t=" << t << " out=" << trace[t].to_hex() << "\n";
  return os.str();
}

}  // namespace sketchmap
