#include "bhs/explore.hpp"

#include <algorithm>

namespace bhs {

ExplorerDecision explorer_bootstrap(AgentCore& a, int key) {
  ExplorerDecision d;
  a.label = 1;
  a.state = AgentState::Explore;
  a.pout = 0;
  a.r = 1;
  a.success = true;
  d.writes.push_back({key, -1, 1});
  d.move = 0;
  return d;
}

ExplorerDecision dfs_arrival(AgentCore& a, int key, const LocalView& view) {
  ExplorerDecision d;
  const int deg = view.degree;
  const WhiteboardEntry* e = view.board->find(key);
  if (a.state == AgentState::Explore) {
    if (!e || e->label != a.label) {
      d.writes.push_back({key, a.pin, a.label});
      a.pout = (a.pin + 1) % deg;
      if (a.pout == a.pin) a.state = AgentState::Backtrack;
    } else {
      a.state = AgentState::Backtrack;
      a.pout = a.pin;
    }
    return d;
  }
  // returning along a tree edge
  if (!e) throw EngineBug("backtracked into a node with no visit record");
  a.pout = (a.pin + 1) % deg;
  if (e->parent == -1) {
    if (a.pout == 0) {
      a.label += 1;
      a.state = AgentState::Explore;
      d.writes.push_back({key, -1, a.label});
    } else {
      a.state = AgentState::Explore;
    }
  } else {
    a.state = (a.pout == e->parent) ? AgentState::Backtrack : AgentState::Explore;
  }
  return d;
}

ExplorerDecision explore_deviate(AgentCore& a, int key, const LocalView& view) {
  ExplorerDecision d;
  a.pout = (a.pout + 1) % view.degree;
  const WhiteboardEntry* e = view.board->find(key);
  if (!e) throw EngineBug("stalled explorer has no visit record at its node");
  if (e->parent == -1) {
    if (a.pout == 0) {
      a.label += 1;
      d.writes.push_back({key, -1, a.label});
    }
  } else if (a.pout == e->parent) {
    a.state = AgentState::Backtrack;
  }
  d.move = a.pout;
  return d;
}

ExplorerDecision backtrack_deviate(AgentCore& a, int key, const LocalView& view) {
  ExplorerDecision d;
  a.label += 1;
  a.state = AgentState::Explore;
  d.writes.push_back({key, -1, a.label});
  // lowest port other than the blocked one; a degree-1 node keeps retrying,
  // though a missing edge there would be a bridge and cannot be removed
  if (view.degree > 1) a.pout = (a.pout == 0) ? 1 : 0;
  d.move = a.pout;
  return d;
}

ExplorerDecision test_against(AgentCore& a, int key, const ReadableParams& other,
                              const LocalView& view) {
  ExplorerDecision d;
  if (a.pout != other.pout || a.id < other.id) {
    d.move = a.pout;
    return d;
  }
  return a.state == AgentState::Explore ? explore_deviate(a, key, view)
                                        : backtrack_deviate(a, key, view);
}

namespace {

// Among the stalled agents at this node, the largest id yields to the
// smallest and deviates; everyone else measures against the largest and
// retries. Reduces to the plain pairwise rule when only two are stalled.
const ReadableParams* stalled_partner(const AgentCore& a, const LocalView& view) {
  const ReadableParams* lo = nullptr;
  const ReadableParams* hi = nullptr;
  for (const auto& o : view.others) {
    if (o.success) continue;
    if (!lo || o.id < lo->id) lo = &o;
    if (!hi || o.id > hi->id) hi = &o;
  }
  if (!hi) return nullptr;
  return (a.id > hi->id) ? lo : hi;
}

} // namespace

ExplorerDecision movement3(AgentCore& a, int key, const LocalView& view, long long round) {
  if (round == 0) return explorer_bootstrap(a, key);
  ExplorerDecision d;
  if (a.r == 1) {
    a.r = 0;
    a.success = view.last_attempt;
    if (a.success) return dfs_arrival(a, key, view);
    return d;
  }
  a.r = 1;
  if (a.success) {
    d.move = a.pout;
    return d;
  }
  const ReadableParams* partner = stalled_partner(a, view);
  if (!partner) {
    d.move = a.pout;
    return d;
  }
  return test_against(a, key, *partner, view);
}

ExplorerDecision movement2(AgentCore& a, int key, const LocalView& view, long long round,
                           bool is_min_id) {
  if (round == 0) return explorer_bootstrap(a, key);
  ExplorerDecision d;
  if (a.r == 1) {
    a.r = 0;
    a.success = view.last_attempt;
    if (a.success) return dfs_arrival(a, key, view);
    return d;
  }
  a.r = 1;
  if (a.success || is_min_id) {
    d.move = a.pout;
    return d;
  }
  return a.state == AgentState::Explore ? explore_deviate(a, key, view)
                                        : backtrack_deviate(a, key, view);
}

namespace {

class ExploreAlgorithm : public Algorithm {
 public:
  explicit ExploreAlgorithm(int count) : count_(count) {}

  std::string name() const override { return count_ == 3 ? "explore3" : "explore2"; }
  int whiteboard_capacity() const override { return count_; }
  bool requires_black_hole() const override { return false; }

  void reset(const Footprint&, std::vector<AgentCore>& cores, Node) override {
    if ((int)cores.size() != count_)
      throw ConfigError(name() + " needs exactly " + std::to_string(count_) + " agents");
    for (auto& c : cores) {
      c.role = Role::Solo;
      c.group = -1;
      c.success = true;
      c.label = -1;
      c.state = AgentState::Explore;
      c.pout = -1;
      c.r = 0;
    }
  }

  Decision step(const Footprint&, std::vector<AgentCore>& cores,
                const std::vector<LocalView>& views, long long round) override {
    Decision out;
    for (size_t i = 0; i < cores.size(); ++i) {
      if (!views[i].alive) continue;
      ExplorerDecision d = count_ == 3
                               ? movement3(cores[i], (int)i, views[i], round)
                               : movement2(cores[i], (int)i, views[i], round, i == 0);
      for (const auto& w : d.writes) out.writes.push_back({(int)i, w});
      if (d.move) out.moves.push_back({(int)i, *d.move});
    }
    return out;
  }

  std::unique_ptr<Algorithm> clone() const override {
    return std::make_unique<ExploreAlgorithm>(*this);
  }

 private:
  int count_;
};

} // namespace

std::unique_ptr<Algorithm> make_explore3() { return std::make_unique<ExploreAlgorithm>(3); }
std::unique_ptr<Algorithm> make_explore2() { return std::make_unique<ExploreAlgorithm>(2); }

} // namespace bhs
