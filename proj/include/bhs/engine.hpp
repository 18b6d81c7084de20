#pragma once

#include <cstdint>
#include <memory>
#include <optional>
#include <stdexcept>
#include <string>
#include <tuple>
#include <unordered_set>
#include <utility>
#include <vector>

#include "bhs/graph.hpp"

namespace bhs {

using AgentId = int;

enum class AgentState : uint8_t { Explore, Backtrack };
enum class Role : uint8_t { Leader, Helper1, Helper2, Solo };

const char* to_string(AgentState s);
const char* to_string(Role r);

// Per-agent record. The engine owns position, alive, pin and last_attempt;
// algorithms own the rest.
struct AgentCore {
  AgentId id = 0;
  Node position = 0;
  bool alive = true;
  bool success = true;
  int label = 0;
  AgentState state = AgentState::Explore;
  Port pin = -1;
  Port pout = -1;
  int r = 0;
  Role role = Role::Solo;
  int group = -1;
  bool last_attempt = true; // result of the most recent move attempt
  bool terminated = false;  // set for the detecting survivor
};

struct WhiteboardEntry {
  int key = -1;
  Port parent = -1;
  int label = 0;
};

struct Whiteboard {
  std::vector<WhiteboardEntry> entries; // sorted by key
  const WhiteboardEntry* find(int key) const;
};

// What a co-located agent exposes during Look.
struct ReadableParams {
  AgentId id = 0;
  bool success = true;
  AgentState state = AgentState::Explore;
  Port pout = -1;
  Role role = Role::Solo;
  int group = -1;
};

// Round-start snapshot handed to the algorithm, one per roster slot. Node
// identity is deliberately absent: agents are anonymous walkers.
struct LocalView {
  bool alive = false;
  int degree = 0;
  Port pin = -1;
  bool last_attempt = true;
  const Whiteboard* board = nullptr;            // valid during the step call only
  std::vector<ReadableParams> others;           // co-located, ascending id
};

struct WriteOp {
  int agent = -1; // roster index
  WhiteboardEntry entry;
};
struct MoveOp {
  int agent = -1;
  Port port = -1;
};
struct DetectClaim {
  int agent = -1;
  Port port = -1;
};

struct Decision {
  std::vector<WriteOp> writes;
  std::vector<MoveOp> moves;
  std::optional<DetectClaim> detection;
};

struct World {
  const Footprint* fp = nullptr;
  std::vector<AgentCore> cores; // ascending AgentId
  std::vector<Whiteboard> boards;
  long long round = 0;
};

class Algorithm {
 public:
  virtual ~Algorithm() = default;
  virtual std::string name() const = 0;
  virtual int whiteboard_capacity() const = 0;
  virtual bool requires_black_hole() const = 0;
  virtual bool halts_on_coverage() const { return !requires_black_hole(); }
  // Sets up roles, groups and initial explorer fields; throws ConfigError on a
  // bad roster.
  virtual void reset(const Footprint& fp, std::vector<AgentCore>& cores, Node root) = 0;
  virtual Decision step(const Footprint& fp, std::vector<AgentCore>& cores,
                        const std::vector<LocalView>& views, long long round) = 0;
  // Complete hash of any state kept outside the cores; feeds recurrence checks.
  virtual uint64_t aux_fingerprint() const { return 0; }
  virtual std::unique_ptr<Algorithm> clone() const = 0;
};

struct IntendedMove {
  AgentId id = 0;
  int agent = -1; // roster index
  Node from = -1;
  Port port = -1;
  EdgeId edge = -1;
  Node to = -1;
};

class Adversary {
 public:
  virtual ~Adversary() = default;
  virtual std::string name() const = 0;
  virtual void reset(const Footprint& fp, int f, uint64_t seed) = 0;
  // Sees this round's computed moves before they resolve.
  virtual std::vector<EdgeId> decide(const World& world,
                                     const std::vector<IntendedMove>& intents) = 0;
  // Called after moves resolve; hook for informedness bookkeeping.
  virtual void observe(const World& world, const std::vector<IntendedMove>& intents,
                       const std::vector<EdgeId>& removed) {
    (void)world;
    (void)intents;
    (void)removed;
  }
  virtual uint64_t fingerprint() const { return 0; }
  virtual std::unique_ptr<Adversary> clone() const = 0;
};

struct Outcome {
  enum class Kind { Detected, Explored, Timeout, Stuck, AllDead };
  Kind kind = Kind::Timeout;
  long long rounds = 0;
  std::vector<AgentId> deaths;
  Node detected_node = -1;
  Port detected_port = -1;
  AgentId survivor = -1;
};

const char* to_string(Outcome::Kind k);

struct TraceEvent {
  enum class Kind { RemovalSet, Write, MoveOk, MoveFail, Death, Detection, Termination };
  Kind kind;
  long long round = 0;
  AgentId agent = -1;
  Node node = -1; // origin node (or evidence node)
  Node to = -1;
  Port port = -1;
  Port pin = -1;
  int key = -1;
  Port parent = -1;
  int label = 0;
  int group = -1;
  int role = -1; // role at death; not serialized
  std::vector<std::pair<Node, Node>> removed; // removal-set only
};

struct TraceHeader {
  std::string footprint_hash;
  std::string algorithm;
  std::string adversary;
  uint64_t seed = 0;
  std::vector<AgentId> agents;
};

class TraceSink {
 public:
  virtual ~TraceSink() = default;
  virtual void on_header(const TraceHeader&) {}
  virtual void on_event(const TraceEvent&) {}
  virtual void on_outcome(const Outcome&) {}
};

class NullSink : public TraceSink {};

class MemorySink : public TraceSink {
 public:
  TraceHeader header;
  std::vector<TraceEvent> events;
  std::optional<Outcome> outcome;
  void on_header(const TraceHeader& h) override { header = h; }
  void on_event(const TraceEvent& e) override { events.push_back(e); }
  void on_outcome(const Outcome& o) override { outcome = o; }
};

// Validates the trace stream against the engine contracts; used by fuzzing.
class InvariantChecker : public TraceSink {
 public:
  InvariantChecker(const Footprint& fp, int f, int capacity);
  void on_event(const TraceEvent& e) override;
  void on_outcome(const Outcome& o) override;
  const std::vector<std::string>& violations() const { return violations_; }
  long long rounds_seen() const { return last_round_ + 1; }

 private:
  void fail(const std::string& what);
  const Footprint& fp_;
  int f_;
  int capacity_;
  long long last_round_ = -1;
  int phase_ = 0; // removal-set, writes, moves, deaths, detection, termination
  AgentId last_agent_ = -1;
  std::vector<EdgeId> current_removed_;
  std::vector<Whiteboard> boards_;
  std::vector<std::string> violations_;
  bool terminated_ = false;
};

struct ConfigError : std::runtime_error {
  using std::runtime_error::runtime_error;
};
// Contract violations inside a run (capacity overflow, invalid adversary set).
struct EngineBug : std::logic_error {
  using std::logic_error::logic_error;
};

struct RunConfig {
  int f = 1;
  uint64_t seed = 0;
  long long max_rounds = 0;
  long long stuck_window = -1; // -1: 4 * capacity * |E|^2 + 16
  bool detect_recurrence = true;
};

// One simulation; copyable so the exhaustive searcher can branch mid-run.
class Engine {
 public:
  Engine(const Footprint& fp, std::unique_ptr<Algorithm> algo, std::vector<AgentId> roster,
         Node root, const RunConfig& cfg);
  Engine(const Engine& other);
  Engine& operator=(const Engine&) = delete;

  const World& world() const { return world_; }
  Algorithm& algorithm() { return *algo_; }
  const std::vector<AgentId>& roster() const { return roster_; }
  long long round() const { return world_.round; }
  bool terminal() const { return outcome_.has_value(); }
  const Outcome& outcome() const { return *outcome_; }
  long long stuck_window() const { return window_; }

  // Look + Compute; returns the resolved move intents for the adversary.
  const std::vector<IntendedMove>& begin_round();
  // Removal commit, writes, moves, deaths, verdicts.
  void finish_round(const std::vector<EdgeId>& removed, TraceSink& sink);

  void force_timeout();
  void force_stuck();
  // Canonical full-state hash (round excluded); mix in the adversary state.
  std::pair<uint64_t, uint64_t> state_hash(uint64_t adversary_fp) const;

 private:
  void settle_verdicts(TraceSink& sink);
  const Footprint* fp_;
  std::unique_ptr<Algorithm> algo_;
  std::vector<AgentId> roster_;
  RunConfig cfg_;
  long long window_ = 0;
  World world_;
  std::vector<uint64_t> visited_; // per-agent node bitmask (coverage halt)
  uint64_t full_mask_ = 0;
  std::optional<Outcome> outcome_;
  std::vector<AgentId> deaths_;
  // compute results of the in-flight round
  bool in_round_ = false;
  Decision decision_;
  std::vector<IntendedMove> intents_;
  bool wrote_this_round_ = false;
  // stuck window tracking
  long long quiet_ = 0;
  std::vector<std::tuple<Node, int, AgentState, Port>> prev_sig_;
};

Outcome run_simulation(const Footprint& fp, std::unique_ptr<Algorithm> algo,
                       std::unique_ptr<Adversary> adv, std::vector<AgentId> roster,
                       Node root, const RunConfig& cfg, TraceSink& sink);

} // namespace bhs
