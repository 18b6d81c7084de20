#include "bhs/engine.hpp"

#include <algorithm>
#include <cassert>

namespace bhs {

const char* to_string(AgentState s) {
  return s == AgentState::Explore ? "explore" : "backtrack";
}

const char* to_string(Role r) {
  switch (r) {
    case Role::Leader: return "leader";
    case Role::Helper1: return "helper1";
    case Role::Helper2: return "helper2";
    default: return "solo";
  }
}

const char* to_string(Outcome::Kind k) {
  switch (k) {
    case Outcome::Kind::Detected: return "detected";
    case Outcome::Kind::Explored: return "explored";
    case Outcome::Kind::Timeout: return "timeout";
    case Outcome::Kind::Stuck: return "stuck";
    default: return "all-dead";
  }
}

const WhiteboardEntry* Whiteboard::find(int key) const {
  for (const auto& e : entries)
    if (e.key == key) return &e;
  return nullptr;
}

Engine::Engine(const Footprint& fp, std::unique_ptr<Algorithm> algo,
               std::vector<AgentId> roster, Node root, const RunConfig& cfg)
    : fp_(&fp), algo_(std::move(algo)), roster_(std::move(roster)), cfg_(cfg) {
  if (root < 0 || root >= fp.n) throw ConfigError("root node out of range");
  if (root == fp.black_hole) throw ConfigError("root node is the black hole");
  if (roster_.empty()) throw ConfigError("empty roster");
  std::sort(roster_.begin(), roster_.end());
  if (std::adjacent_find(roster_.begin(), roster_.end()) != roster_.end())
    throw ConfigError("duplicate agent ids");
  if (fp.n > 60) throw ConfigError("footprint too large for this engine");
  if (algo_->requires_black_hole() && fp.black_hole < 0)
    throw ConfigError("algorithm needs a black hole in the footprint");
  if (!algo_->requires_black_hole() && fp.black_hole >= 0)
    throw ConfigError("exploration algorithm run on a footprint with a black hole");

  world_.fp = fp_;
  world_.boards.resize(fp.n);
  for (AgentId id : roster_) {
    AgentCore c;
    c.id = id;
    c.position = root;
    world_.cores.push_back(c);
  }
  algo_->reset(fp, world_.cores, root);

  window_ = cfg_.stuck_window >= 0
                ? cfg_.stuck_window
                : 4LL * algo_->whiteboard_capacity() * fp.m() * fp.m() + 16;
  visited_.assign(world_.cores.size(), 1ULL << root);
  full_mask_ = fp.n == 60 ? ~0ULL >> 4 : (1ULL << fp.n) - 1;
  prev_sig_.resize(world_.cores.size());
  for (size_t i = 0; i < world_.cores.size(); ++i) {
    const auto& c = world_.cores[i];
    prev_sig_[i] = {c.position, c.label, c.state, c.pout};
  }
}

Engine::Engine(const Engine& o)
    : fp_(o.fp_), algo_(o.algo_->clone()), roster_(o.roster_), cfg_(o.cfg_),
      window_(o.window_), world_(o.world_), visited_(o.visited_),
      full_mask_(o.full_mask_), outcome_(o.outcome_), deaths_(o.deaths_),
      in_round_(false), wrote_this_round_(false), quiet_(o.quiet_),
      prev_sig_(o.prev_sig_) {
  assert(!o.in_round_); // branch between rounds, not inside one
}

const std::vector<IntendedMove>& Engine::begin_round() {
  assert(!terminal() && !in_round_);
  in_round_ = true;

  std::vector<LocalView> views(world_.cores.size());
  for (size_t i = 0; i < world_.cores.size(); ++i) {
    const AgentCore& c = world_.cores[i];
    if (!c.alive) continue;
    LocalView& v = views[i];
    v.alive = true;
    v.degree = fp_->degree(c.position);
    v.pin = c.pin;
    v.last_attempt = c.last_attempt;
    v.board = &world_.boards[c.position];
    for (const AgentCore& o : world_.cores) {
      if (!o.alive || o.id == c.id || o.position != c.position) continue;
      v.others.push_back({o.id, o.success, o.state, o.pout, o.role, o.group});
    }
  }

  decision_ = algo_->step(*fp_, world_.cores, views, world_.round);

  intents_.clear();
  for (const MoveOp& mv : decision_.moves) {
    const AgentCore& c = world_.cores.at(mv.agent);
    if (!c.alive) throw EngineBug("move issued for a dead agent");
    if (mv.port < 0 || mv.port >= fp_->degree(c.position))
      throw EngineBug("move through a port that does not exist");
    const HalfEdge& h = fp_->out(c.position, mv.port);
    intents_.push_back({c.id, mv.agent, c.position, mv.port, h.edge, h.to});
  }
  std::sort(intents_.begin(), intents_.end(),
            [](const IntendedMove& a, const IntendedMove& b) { return a.id < b.id; });
  return intents_;
}

void Engine::finish_round(const std::vector<EdgeId>& removed, TraceSink& sink) {
  assert(in_round_);
  in_round_ = false;
  wrote_this_round_ = false;

  // Adversary contract: at most f removals, footprint stays connected.
  std::vector<char> gone(fp_->m(), 0);
  {
    if (static_cast<int>(removed.size()) > cfg_.f)
      throw EngineBug("adversary removed more than f edges");
    for (EdgeId e : removed) {
      if (e < 0 || e >= fp_->m() || gone[e]) throw EngineBug("bad removal set");
      gone[e] = 1;
    }
    if (!removed.empty() && !fp_->connected_without(removed))
      throw EngineBug("removal set disconnects the footprint");
  }

  TraceEvent ev;
  ev.kind = TraceEvent::Kind::RemovalSet;
  ev.round = world_.round;
  std::vector<EdgeId> sorted_removed = removed;
  std::sort(sorted_removed.begin(), sorted_removed.end());
  for (EdgeId e : sorted_removed)
    ev.removed.emplace_back(fp_->edges[e].u, fp_->edges[e].v);
  sink.on_event(ev);

  // Writes commit at the origin, before any move resolves.
  std::stable_sort(decision_.writes.begin(), decision_.writes.end(),
                   [](const WriteOp& a, const WriteOp& b) { return a.agent < b.agent; });
  for (const WriteOp& w : decision_.writes) {
    AgentCore& c = world_.cores.at(w.agent);
    if (!c.alive) throw EngineBug("write issued for a dead agent");
    Whiteboard& board = world_.boards[c.position];
    bool found = false;
    for (auto& e : board.entries)
      if (e.key == w.entry.key) {
        e = w.entry;
        found = true;
        break;
      }
    if (!found) {
      if (static_cast<int>(board.entries.size()) >= algo_->whiteboard_capacity())
        throw EngineBug("whiteboard capacity exceeded");
      board.entries.push_back(w.entry);
      std::sort(board.entries.begin(), board.entries.end(),
                [](const WhiteboardEntry& a, const WhiteboardEntry& b) {
                  return a.key < b.key;
                });
    }
    wrote_this_round_ = true;
    TraceEvent we;
    we.kind = TraceEvent::Kind::Write;
    we.round = world_.round;
    we.agent = c.id;
    we.node = c.position;
    we.key = w.entry.key;
    we.parent = w.entry.parent;
    we.label = w.entry.label;
    sink.on_event(we);
  }

  for (const IntendedMove& mv : intents_) {
    AgentCore& c = world_.cores.at(mv.agent);
    TraceEvent me;
    me.round = world_.round;
    me.agent = c.id;
    me.node = mv.from;
    me.port = mv.port;
    if (gone[mv.edge]) {
      c.last_attempt = false;
      me.kind = TraceEvent::Kind::MoveFail;
    } else {
      c.last_attempt = true;
      c.position = mv.to;
      c.pin = fp_->out(mv.from, mv.port).rev;
      visited_[mv.agent] |= 1ULL << mv.to;
      me.kind = TraceEvent::Kind::MoveOk;
      me.to = mv.to;
      me.pin = c.pin;
    }
    sink.on_event(me);
  }

  for (AgentCore& c : world_.cores) {
    if (c.alive && c.position == fp_->black_hole) {
      c.alive = false;
      deaths_.push_back(c.id);
      TraceEvent de;
      de.kind = TraceEvent::Kind::Death;
      de.round = world_.round;
      de.agent = c.id;
      de.node = c.position;
      de.group = c.group;
      de.role = (int)c.role;
      sink.on_event(de);
    }
  }

  settle_verdicts(sink);
  ++world_.round;
  if (outcome_) {
    outcome_->rounds = world_.round;
    outcome_->deaths = deaths_;
    sink.on_outcome(*outcome_);
  }
}

void Engine::settle_verdicts(TraceSink& sink) {
  if (decision_.detection) {
    const AgentCore& c = world_.cores.at(decision_.detection->agent);
    if (!c.alive) throw EngineBug("detection claimed by a dead agent");
    TraceEvent de;
    de.kind = TraceEvent::Kind::Detection;
    de.round = world_.round;
    de.agent = c.id;
    de.node = c.position;
    de.port = decision_.detection->port;
    de.group = c.group;
    sink.on_event(de);
    TraceEvent te;
    te.kind = TraceEvent::Kind::Termination;
    te.round = world_.round;
    te.agent = c.id;
    sink.on_event(te);
    world_.cores[decision_.detection->agent].terminated = true;
    Outcome out;
    out.kind = Outcome::Kind::Detected;
    out.detected_node = c.position;
    out.detected_port = decision_.detection->port;
    out.survivor = c.id;
    outcome_ = out;
    return;
  }

  if (algo_->halts_on_coverage()) {
    for (size_t i = 0; i < world_.cores.size(); ++i) {
      if (world_.cores[i].alive && visited_[i] == full_mask_) {
        Outcome out;
        out.kind = Outcome::Kind::Explored;
        out.survivor = world_.cores[i].id;
        outcome_ = out;
        return;
      }
    }
  }

  bool any_alive = false;
  for (const AgentCore& c : world_.cores) any_alive |= c.alive;
  if (!any_alive) {
    Outcome out;
    out.kind = Outcome::Kind::AllDead;
    outcome_ = out;
    return;
  }

  bool changed = wrote_this_round_;
  for (size_t i = 0; i < world_.cores.size(); ++i) {
    const auto& c = world_.cores[i];
    std::tuple<Node, int, AgentState, Port> sig{c.position, c.label, c.state, c.pout};
    if (sig != prev_sig_[i]) {
      changed = true;
      prev_sig_[i] = sig;
    }
  }
  quiet_ = changed ? 0 : quiet_ + 1;
  if (quiet_ >= window_) {
    Outcome out;
    out.kind = Outcome::Kind::Stuck;
    outcome_ = out;
  }
}

void Engine::force_timeout() {
  assert(!terminal());
  Outcome out;
  out.kind = Outcome::Kind::Timeout;
  out.rounds = world_.round;
  out.deaths = deaths_;
  outcome_ = out;
}

void Engine::force_stuck() {
  assert(!terminal());
  Outcome out;
  out.kind = Outcome::Kind::Stuck;
  out.rounds = world_.round;
  out.deaths = deaths_;
  outcome_ = out;
}

namespace {
struct Mix {
  uint64_t h;
  void operator()(uint64_t x) {
    for (int i = 0; i < 8; ++i) {
      h ^= x & 0xff;
      h *= 1099511628211ULL;
      x >>= 8;
    }
  }
};
} // namespace

std::pair<uint64_t, uint64_t> Engine::state_hash(uint64_t adversary_fp) const {
  std::pair<uint64_t, uint64_t> out;
  uint64_t bases[2] = {14695981039346656037ULL, 0x9e3779b97f4a7c15ULL};
  for (int k = 0; k < 2; ++k) {
    Mix mix{bases[k]};
    for (const AgentCore& c : world_.cores) {
      mix(static_cast<uint64_t>(c.id));
      mix(static_cast<uint64_t>(c.position));
      mix((c.alive ? 1 : 0) | (c.success ? 2 : 0) | (c.last_attempt ? 4 : 0) |
          (c.terminated ? 8 : 0) | (c.state == AgentState::Backtrack ? 16 : 0) |
          (static_cast<uint64_t>(c.r) << 5) | (static_cast<uint64_t>(c.role) << 8));
      mix(static_cast<uint64_t>(c.label));
      mix(static_cast<uint64_t>(c.pin + 1));
      mix(static_cast<uint64_t>(c.pout + 1));
      mix(static_cast<uint64_t>(c.group + 1));
    }
    for (const Whiteboard& b : world_.boards) {
      mix(b.entries.size());
      for (const auto& e : b.entries) {
        mix(static_cast<uint64_t>(e.key));
        mix(static_cast<uint64_t>(e.parent + 1));
        mix(static_cast<uint64_t>(e.label));
      }
    }
    for (uint64_t v : visited_) mix(v);
    mix(algo_->aux_fingerprint());
    mix(adversary_fp);
    (k == 0 ? out.first : out.second) = mix.h;
  }
  return out;
}

Outcome run_simulation(const Footprint& fp, std::unique_ptr<Algorithm> algo,
                       std::unique_ptr<Adversary> adv, std::vector<AgentId> roster,
                       Node root, const RunConfig& cfg, TraceSink& sink) {
  if (cfg.max_rounds < 0) throw ConfigError("negative round cap");
  adv->reset(fp, cfg.f, cfg.seed);
  Engine eng(fp, std::move(algo), std::move(roster), root, cfg);

  TraceHeader hdr;
  hdr.footprint_hash = fp.hash();
  hdr.algorithm = eng.algorithm().name();
  hdr.adversary = adv->name();
  hdr.seed = cfg.seed;
  hdr.agents = eng.roster();
  sink.on_header(hdr);

  struct PairHash {
    size_t operator()(const std::pair<uint64_t, uint64_t>& p) const {
      return p.first ^ (p.second * 0x9e3779b97f4a7c15ULL);
    }
  };
  std::unordered_set<std::pair<uint64_t, uint64_t>, PairHash> seen;
  if (cfg.detect_recurrence) seen.insert(eng.state_hash(adv->fingerprint()));

  while (!eng.terminal()) {
    if (eng.round() >= cfg.max_rounds) {
      eng.force_timeout();
      sink.on_outcome(eng.outcome());
      break;
    }
    const auto& intents = eng.begin_round();
    auto removed = adv->decide(eng.world(), intents);
    eng.finish_round(removed, sink);
    if (!eng.terminal()) {
      adv->observe(eng.world(), intents, removed);
      if (cfg.detect_recurrence &&
          !seen.insert(eng.state_hash(adv->fingerprint())).second) {
        eng.force_stuck();
        sink.on_outcome(eng.outcome());
      }
    }
  }
  return eng.outcome();
}

InvariantChecker::InvariantChecker(const Footprint& fp, int f, int capacity)
    : fp_(fp), f_(f), capacity_(capacity) {
  boards_.resize(fp.n);
}

void InvariantChecker::fail(const std::string& what) {
  if (violations_.size() < 100)
    violations_.push_back("round " + std::to_string(last_round_) + ": " + what);
}

void InvariantChecker::on_event(const TraceEvent& e) {
  if (terminated_) fail("event after termination");
  int rank = 0;
  switch (e.kind) {
    case TraceEvent::Kind::RemovalSet: rank = 1; break;
    case TraceEvent::Kind::Write: rank = 2; break;
    case TraceEvent::Kind::MoveOk:
    case TraceEvent::Kind::MoveFail: rank = 3; break;
    case TraceEvent::Kind::Death: rank = 4; break;
    case TraceEvent::Kind::Detection: rank = 5; break;
    case TraceEvent::Kind::Termination: rank = 6; break;
  }
  if (e.kind == TraceEvent::Kind::RemovalSet) {
    if (e.round != last_round_ + 1) fail("removal-set round not contiguous");
    last_round_ = e.round;
    phase_ = 1;
    last_agent_ = -1;
    current_removed_.clear();
    for (auto [u, v] : e.removed) {
      bool found = false;
      for (EdgeId i = 0; i < fp_.m(); ++i)
        if (fp_.edges[i].u == u && fp_.edges[i].v == v) {
          current_removed_.push_back(i);
          found = true;
        }
      if (!found) fail("removal of a non-edge");
    }
    if (static_cast<int>(current_removed_.size()) > f_) fail("more than f removals");
    if (!current_removed_.empty() && !fp_.connected_without(current_removed_))
      fail("removal set disconnects footprint");
    return;
  }
  if (e.round != last_round_) fail("event outside the current round");
  if (rank < phase_) fail("event order violated");
  if (rank == phase_ && rank != 2 && rank <= 4 && e.agent <= last_agent_)
    fail("agent order violated");
  if (rank == 2 && phase_ == 2 && e.agent < last_agent_) fail("write order violated");
  phase_ = rank;
  last_agent_ = e.agent;

  switch (e.kind) {
    case TraceEvent::Kind::Write: {
      Whiteboard& b = boards_[e.node];
      bool found = false;
      for (auto& en : b.entries)
        if (en.key == e.key) {
          en.parent = e.parent;
          en.label = e.label;
          found = true;
        }
      if (!found) {
        b.entries.push_back({e.key, e.parent, e.label});
        if (static_cast<int>(b.entries.size()) > capacity_)
          fail("whiteboard capacity exceeded");
      }
      break;
    }
    case TraceEvent::Kind::MoveOk: {
      const HalfEdge& h = fp_.out(e.node, e.port);
      bool was_removed = false;
      for (EdgeId r : current_removed_) was_removed |= r == h.edge;
      if (was_removed) fail("successful move through a removed edge");
      if (h.to != e.to || h.rev != e.pin) fail("move endpoint mismatch");
      break;
    }
    case TraceEvent::Kind::MoveFail: {
      const HalfEdge& h = fp_.out(e.node, e.port);
      bool was_removed = false;
      for (EdgeId r : current_removed_) was_removed |= r == h.edge;
      if (!was_removed) fail("failed move through a present edge");
      break;
    }
    case TraceEvent::Kind::Death:
      if (e.node != fp_.black_hole) fail("death away from the black hole");
      break;
    case TraceEvent::Kind::Detection:
      if (fp_.black_hole < 0 || fp_.out(e.node, e.port).to != fp_.black_hole)
        fail("detection evidence not incident to the black hole");
      break;
    case TraceEvent::Kind::Termination: terminated_ = true; break;
    default: break;
  }
}

void InvariantChecker::on_outcome(const Outcome& o) {
  if (o.kind == Outcome::Kind::Detected && !terminated_)
    fail("detected outcome without termination event");
}

} // namespace bhs
