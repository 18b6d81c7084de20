#pragma once

#include <memory>

#include "bhs/engine.hpp"

namespace bhs {

// Understaffed teams for the two lower-bound demonstrations. Both run the
// regular cautious-walk search rules, just without enough agents to finish.

// Two agents per clique of the hazard gadget (2k total, k the black hole's
// degree). Each pair explores its own clique; a pair that loses its probing
// helper can never tell the hole from a missing edge and freezes.
std::unique_ptr<Algorithm> make_bhs1_demo();

// 2f+1 agents at a common root: full trios by ascending id plus a leftover
// pair (no second helper, so no verdict) or a lone uncautious walker.
std::unique_ptr<Algorithm> make_fbhs_demo(int f);

} // namespace bhs
