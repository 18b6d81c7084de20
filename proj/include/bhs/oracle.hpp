#pragma once

#include <map>
#include <set>
#include <string>
#include <vector>

#include "bhs/engine.hpp"
#include "bhs/graph.hpp"

namespace bhs {

struct DfsMove {
  Node from = -1;
  Port port = -1;
  Node to = -1;
  bool backtrack = false;
};

// Reference single-walker traversal on the static footprint, next-port rule
// (pin+1) mod degree. Runs one full sweep and stops when the walk wraps
// around the root. Independent of the agent algorithms.
std::vector<DfsMove> static_dfs_path(const Footprint& fp, Node root);

// Nodes each roster agent stood on, replayed from trace move events. Every
// agent starts with {root}.
std::map<AgentId, std::set<Node>> coverage(const std::vector<TraceEvent>& events,
                                           const std::vector<AgentId>& roster, Node root);

// True when some single agent saw every node except the black hole.
bool exploration_complete(const std::map<AgentId, std::set<Node>>& cov, const Footprint& fp);

// Empty when the outcome carries a detection whose node/port actually point
// at the black hole.
std::vector<std::string> validate_detection(const Footprint& fp, const Outcome& outcome);

struct SearchConfig {
  int f = 1;
  long long depth = 0;           // 0: 4 * |E|^2
  long long budget = 2000000;    // total rounds simulated across the tree
};

struct SearchResult {
  enum class Kind { AllDetected, Counterexample, Budget };
  Kind kind = Kind::Budget;
  long long worst_rounds = 0;    // max rounds to detection over all plays
  std::string counterexample;    // replay script reproducing a bad play
  long long expanded = 0;
};

// Walks the full adversary game tree: at every round, every subset of the
// intended edges (size <= f, footprint stays connected) is a branch. States
// are memoized by canonical hash; a revisited state on the current path is an
// infinite non-detecting play.
SearchResult exhaustive_adversary_search(const Footprint& fp, const Algorithm& proto,
                                         const std::vector<AgentId>& roster, Node root,
                                         const SearchConfig& cfg);

} // namespace bhs
