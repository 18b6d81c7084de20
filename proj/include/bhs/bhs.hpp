#pragma once

#include <functional>
#include <memory>
#include <stdexcept>
#include <string>
#include <vector>

#include "bhs/engine.hpp"

namespace bhs {

// What a search group shows its exploration plugin whenever the group is free
// to pick its next crossing.
struct PluginView {
  int group = 0;
  int groups = 0;
  int degree = 0;             // at the leader's node
  Port pin = -1;              // arrival port of the crossing that just completed
  bool arrived = false;       // a crossing completed this round; pin is fresh
  bool stalled = false;       // the current probe keeps failing and may be dropped
  const Whiteboard* board = nullptr;
  std::vector<int> co_groups; // other groups whose leaders share the node
};

struct PluginMove {
  std::vector<WhiteboardEntry> writes; // committed at the leader's node
  Port port = -1;                      // -1: stay put
};

// Per-group exploration strategy for the f-fault search. Group 0 is the
// designated leader group and should keep hammering a blocked move; the
// others may reroute freely.
class ExplorationPlugin {
 public:
  virtual ~ExplorationPlugin() = default;
  virtual std::string name() const = 0;
  virtual void reset(int group, int groups) = 0;
  virtual PluginMove step(const PluginView& view) = 0;
  virtual uint64_t fingerprint() const = 0;
  virtual std::unique_ptr<ExplorationPlugin> clone() const = 0;
};

using PluginFactory = std::function<std::unique_ptr<ExplorationPlugin>()>;

// Reference plugin: the two-agent traversal rules driving one virtual
// explorer per group.
std::unique_ptr<ExplorationPlugin> make_dfs_plugin();

std::unique_ptr<Algorithm> make_bhs9();
std::unique_ptr<Algorithm> make_bhs6();
std::unique_ptr<Algorithm> make_bhsf(PluginFactory factory = {});

// Registry shared by tests and the command line tool.
std::unique_ptr<Algorithm> make_algorithm(const std::string& name);

// Worst-case round bound for the f-fault search, clamped against overflow.
long long fbhs_round_bound(const Footprint& fp, int f);

struct DetectionReport {
  Node node = -1;     // safe endpoint the evidence points from
  Port port = -1;     // port at that node leading into the black hole
  AgentId survivor = 0;
};

// Unpacks where the black hole was pinned down; throws std::runtime_error
// when the outcome carries no detection.
DetectionReport detection_report(const Outcome& outcome);

// Convenience runs. A non-positive cfg.max_rounds picks the documented
// default cap for the algorithm.
Outcome run_1bhs_9(const Footprint& fp, std::unique_ptr<Adversary> adv,
                   const std::vector<AgentId>& roster, Node root, RunConfig cfg = {},
                   TraceSink* sink = nullptr);
Outcome run_1bhs_6(const Footprint& fp, std::unique_ptr<Adversary> adv,
                   const std::vector<AgentId>& roster, Node root, RunConfig cfg = {},
                   TraceSink* sink = nullptr);
Outcome run_fbhs(const Footprint& fp, std::unique_ptr<Adversary> adv, int f,
                 const std::vector<AgentId>& roster, Node root, RunConfig cfg = {},
                 TraceSink* sink = nullptr);

} // namespace bhs
