#include "sketchmap/prog_index.hpp"

#include "sketchmap/errors.hpp"

namespace sketchmap {

ProgIndex::ProgIndex(const Prog& p) { add(p, nullptr, -1); }

void ProgIndex::add(const Prog& p, const PrimNode* prim, int parent) {
  int frame = static_cast<int>(frames_.size());
  frames_.push_back(Frame{&p, prim, parent});
  for (const auto& [id, node] : p.nodes) {
    entries_.emplace(id, Entry{frame, &node, order_.size()});
    order_.push_back(id);
  }
  for (const auto& [id, node] : p.nodes) {
    if (const auto* sub = node.get_if<PrimNode>(); sub && sub->body) add(*sub->body, sub, frame);
  }
}

const ProgIndex::Entry& ProgIndex::entry(Id id) const {
  auto it = entries_.find(id);
  if (it == entries_.end()) throw Error("id " + std::to_string(id) + " not in program");
  return it->second;
}

const ProgIndex::Entry* ProgIndex::find(Id id) const {
  auto it = entries_.find(id);
  return it == entries_.end() ? nullptr : &it->second;
}

std::optional<Id> ProgIndex::binding_of(Id var_id) const {
  const auto& e = entry(var_id);
  const auto& frame = frames_[e.frame];
  if (frame.prim == nullptr) return std::nullopt;
  const auto& name = e.node->as<VarNode>().name;
  auto it = frame.prim->binds.find(name);
  if (it == frame.prim->binds.end()) throw Error("unbound variable " + name);
  return it->second;
}

}  // namespace sketchmap
