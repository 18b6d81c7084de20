#pragma once

#include <cstdint>
#include <vector>

#include "bhs/engine.hpp"

namespace bhs {

// Shared phase space for a group of agents. The cautious protocol owns
// Probing, Verify and LeaderCross; the search algorithms drive the rest.
enum class GroupPhase : uint8_t {
  Idle,        // no crossing in progress
  Probing,     // first helper hammers the target edge
  Verify,      // first helper is across; it tries to come back while the
               // second helper tries to follow
  LeaderCross, // far side verified safe, the at-hand members cross
  BhDetected,  // the far side swallowed both helpers
  Plain,       // whole group retries an already-safe edge together
  LeaderToU,   // role-repair dance, leaders heading to the split node
  H2Back,      // role-repair dance, second helper returning
  LeadersBack, // role-repair dance, leaders rejoining their groups
};

struct CautiousGroup {
  int group = -1;
  int leader = -1;  // roster indices; -1 marks a missing member
  int helper1 = -1;
  int helper2 = -1;
  GroupPhase phase = GroupPhase::Idle;
  Port port = -1;         // target port at the leader's node
  bool attempted = false; // leader has made at least one LeaderCross attempt

  uint64_t fingerprint() const;
};

struct CautiousResult {
  enum class Verdict : uint8_t { None, Safe, BlackHole } verdict = Verdict::None;
  bool reunited = false; // the leader landed: process the arrival this round
  std::vector<MoveOp> moves;
};

// Start probing through the given port. The first step call in the same
// round issues the first attempt.
void cautious_begin(CautiousGroup& g, Port port);

// One round of the crossing protocol. Decisions use only what each member
// can see: co-location at the leader's node, each agent's own entry port and
// the result of its own last attempt. A group with no second helper can still
// probe but can never tell a black hole from a missing edge, so it waits
// forever; a group with no first helper cannot probe at all.
CautiousResult cautious_step(CautiousGroup& g, const std::vector<AgentCore>& cores,
                             const std::vector<LocalView>& views);

} // namespace bhs
