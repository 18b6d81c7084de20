#pragma once

#include <memory>
#include <optional>
#include <vector>

#include "bhs/engine.hpp"

namespace bhs {

// One agent's slice of a round: entries to write at its current node plus an
// optional move.
struct ExplorerDecision {
  std::vector<WhiteboardEntry> writes;
  std::optional<Port> move;
};

// Round-0 setup: claim the root as DFS origin and leave through port 0.
ExplorerDecision explorer_bootstrap(AgentCore& a, int key);

// Arrival processing after a successful move; updates state/pout and writes
// the first-visit record. Never moves.
ExplorerDecision dfs_arrival(AgentCore& a, int key, const LocalView& view);

// Skip the current outgoing port while exploring; wrapping past the root's
// last port starts a fresh traversal.
ExplorerDecision explore_deviate(AgentCore& a, int key, const LocalView& view);

// Abandon a blocked backtrack by starting a fresh traversal rooted here,
// leaving through the lowest port other than the blocked one.
ExplorerDecision backtrack_deviate(AgentCore& a, int key, const LocalView& view);

// Pairwise tie-break between two stalled explorers at one node.
ExplorerDecision test_against(AgentCore& a, int key, const ReadableParams& other,
                              const LocalView& view);

// Full per-round transition for the three-agent strategy.
ExplorerDecision movement3(AgentCore& a, int key, const LocalView& view, long long round);

// Full per-round transition for the two-agent strategy; the minimum-id agent
// waits out missing edges, the other deviates immediately.
ExplorerDecision movement2(AgentCore& a, int key, const LocalView& view, long long round,
                           bool is_min_id);

std::unique_ptr<Algorithm> make_explore3();
std::unique_ptr<Algorithm> make_explore2();

} // namespace bhs
