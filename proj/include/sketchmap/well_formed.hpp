#pragma once

#include <cstdint>
#include <map>

#include "sketchmap/ir.hpp"

namespace sketchmap {

/// w : all_ids -> N witnessing the absence of combinational loops.
using WitnessMap = std::map<Id, std::uint32_t>;

/// Checks W1-W6 plus operator width rules and returns a monotonicity witness.
///
/// The dependency relation is: an Op/Hole node depends on its inputs, a Prim
/// on its body root, and a body Var on the outer id it is bound to. Registers
/// have no dependencies and get level 0; every other node gets its longest
/// dependency path length. A cycle is a W6 violation.
///
/// Choice-hole alternatives are treated as inputs of the hole so that every
/// completion of an accepted sketch is also accepted.
WitnessMap check_well_formed(const Prog& p);

/// Width of every node of `p` (not nested bodies). Requires a well-formed `p`.
std::map<Id, std::uint32_t> node_widths(const Prog& p);

/// Width of the value computed by `p`'s root.
std::uint32_t root_width(const Prog& p);

/// Width a hole contributes in the context of `p`.
std::uint32_t hole_width(const Prog& p, const HoleSpec& spec);

}  // namespace sketchmap
