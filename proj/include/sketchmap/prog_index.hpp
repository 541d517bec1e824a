#pragma once

#include <unordered_map>
#include <vector>

#include "sketchmap/ir.hpp"

namespace sketchmap {

/// Flattened view of a program and its nested Prim bodies.
///
/// Frame 0 is the top-level program; every Prim with a body opens a new frame
/// whose parent is the frame holding the Prim. Ids are unique across frames
/// (W2), so an id alone locates a node.
class ProgIndex {
 public:
  struct Frame {
    const Prog* prog = nullptr;
    const PrimNode* prim = nullptr;  // null for the top-level frame
    int parent = -1;
  };
  struct Entry {
    int frame = 0;
    const Node* node = nullptr;
    std::size_t dense = 0;
  };

  explicit ProgIndex(const Prog& p);

  const std::vector<Frame>& frames() const { return frames_; }
  const Entry& entry(Id id) const;
  const Entry* find(Id id) const;
  std::size_t size() const { return order_.size(); }
  /// Ids in discovery order; `entry(id).dense` is the position in this list.
  const std::vector<Id>& ids() const { return order_; }

  /// Outer id a body Var is bound to, or nullopt for top-level variables.
  std::optional<Id> binding_of(Id var_id) const;

 private:
  void add(const Prog& p, const PrimNode* prim, int parent);

  std::vector<Frame> frames_;
  std::unordered_map<Id, Entry> entries_;
  std::vector<Id> order_;
};

}  // namespace sketchmap
