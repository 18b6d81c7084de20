#include "bhs/oracle.hpp"

#include <algorithm>
#include <optional>
#include <sstream>
#include <unordered_map>
#include <unordered_set>

#include <json.hpp>

namespace bhs {

std::vector<DfsMove> static_dfs_path(const Footprint& fp, Node root) {
  if (root < 0 || root >= fp.n) throw ConfigError("root out of range");
  std::vector<DfsMove> out;
  if (fp.degree(root) == 0) return out;

  struct Entry {
    Port parent = -1;
    int label = 0;
  };
  std::vector<Entry> wb(fp.n);
  const int label = 1;
  wb[root] = {-1, label};

  Node at = root;
  bool backtrack = false;
  Port pout = 0;
  const long long cap = 4LL * fp.m() + 8;
  for (;;) {
    if ((long long)out.size() > cap) throw EngineBug("reference dfs exceeded its bound");
    HalfEdge h = fp.out(at, pout);
    out.push_back({at, pout, h.to, backtrack});
    Port pin = h.rev;
    at = h.to;
    int deg = fp.degree(at);
    if (!backtrack) {
      if (wb[at].label != label) {
        wb[at] = {pin, label};
        pout = (pin + 1) % deg;
        backtrack = (pout == pin);
      } else {
        // seen before: bounce straight back
        backtrack = true;
        pout = pin;
      }
    } else {
      pout = (pin + 1) % deg;
      if (wb[at].parent == -1) {
        if (pout == 0) return out; // wrapped around the root: sweep complete
        backtrack = false;
      } else {
        backtrack = (pout == wb[at].parent);
      }
    }
  }
}

std::map<AgentId, std::set<Node>> coverage(const std::vector<TraceEvent>& events,
                                           const std::vector<AgentId>& roster, Node root) {
  std::map<AgentId, std::set<Node>> cov;
  std::map<AgentId, Node> at;
  for (AgentId id : roster) {
    cov[id] = {root};
    at[id] = root;
  }
  for (const auto& e : events) {
    if (e.kind != TraceEvent::Kind::MoveOk) continue;
    auto it = at.find(e.agent);
    if (it == at.end()) throw ConfigError("trace names an agent outside the roster");
    if (e.node != it->second) throw ConfigError("trace move does not chain from the last position");
    it->second = e.to;
    cov[e.agent].insert(e.to);
  }
  return cov;
}

bool exploration_complete(const std::map<AgentId, std::set<Node>>& cov, const Footprint& fp) {
  for (const auto& [id, seen] : cov) {
    (void)id;
    bool all = true;
    for (Node v = 0; v < fp.n; ++v) {
      if (v == fp.black_hole) continue;
      if (!seen.count(v)) {
        all = false;
        break;
      }
    }
    if (all) return true;
  }
  return false;
}

std::vector<std::string> validate_detection(const Footprint& fp, const Outcome& outcome) {
  std::vector<std::string> bad;
  if (outcome.kind != Outcome::Kind::Detected) {
    bad.push_back("outcome is not a detection");
    return bad;
  }
  if (fp.black_hole < 0) bad.push_back("footprint has no black hole");
  if (outcome.detected_node < 0 || outcome.detected_node >= fp.n) {
    bad.push_back("evidence node out of range");
    return bad;
  }
  if (outcome.detected_port < 0 || outcome.detected_port >= fp.degree(outcome.detected_node)) {
    bad.push_back("evidence port out of range");
    return bad;
  }
  if (fp.black_hole >= 0 && fp.out(outcome.detected_node, outcome.detected_port).to != fp.black_hole)
    bad.push_back("evidence edge does not end at the black hole");
  if (outcome.survivor < 0) bad.push_back("no surviving claimant");
  return bad;
}

namespace {

struct KeyHash {
  size_t operator()(const std::pair<uint64_t, uint64_t>& k) const {
    return k.first ^ (k.second * 0x9e3779b97f4a7c15ULL);
  }
};

struct BudgetOut {};

enum class Sub { Detected, Cex, DepthOut };

struct Searcher {
  const Footprint& fp;
  const SearchConfig& cfg;
  long long depth;
  std::unordered_map<std::pair<uint64_t, uint64_t>, long long, KeyHash> solved;
  std::unordered_set<std::pair<uint64_t, uint64_t>, KeyHash> on_stack;
  std::vector<std::pair<uint64_t, uint64_t>> stack_keys;
  std::vector<std::vector<EdgeId>> path;
  std::optional<std::string> script;
  long long expanded = 0;

  void emit_script(size_t cycle_from) {
    // replay lines for the prefix, then the cycle segment repeated until the
    // play covers the whole depth
    std::vector<std::vector<EdgeId>> rounds = path;
    if (cycle_from < path.size()) {
      while ((long long)rounds.size() < depth) {
        for (size_t i = cycle_from; i < path.size() && (long long)rounds.size() < depth; ++i)
          rounds.push_back(path[i]);
      }
    }
    std::ostringstream os;
    for (size_t r = 0; r < rounds.size(); ++r) {
      if (rounds[r].empty()) continue;
      nlohmann::json line;
      line["round"] = (long long)r;
      auto arr = nlohmann::json::array();
      for (EdgeId e : rounds[r]) {
        const Edge& ed = fp.edges[e];
        arr.push_back({ed.u, ed.v});
      }
      line["removed"] = arr;
      os << line.dump() << "\n";
    }
    script = os.str();
  }

  // subsets of the distinct intended edges, size ascending then lexicographic
  std::vector<std::vector<EdgeId>> branches(const std::vector<IntendedMove>& intents) {
    std::vector<EdgeId> pool;
    for (const auto& mv : intents) pool.push_back(mv.edge);
    std::sort(pool.begin(), pool.end());
    pool.erase(std::unique(pool.begin(), pool.end()), pool.end());
    std::vector<std::vector<EdgeId>> out{{}};
    std::vector<std::vector<EdgeId>> cur{{}};
    for (int size = 1; size <= cfg.f && size <= (int)pool.size(); ++size) {
      std::vector<std::vector<EdgeId>> next;
      for (const auto& base : cur) {
        size_t start = base.empty() ? 0 : (std::find(pool.begin(), pool.end(), base.back()) - pool.begin() + 1);
        for (size_t i = start; i < pool.size(); ++i) {
          auto cand = base;
          cand.push_back(pool[i]);
          if (fp.connected_without(cand)) next.push_back(cand);
        }
      }
      for (const auto& s : next) out.push_back(s);
      cur = std::move(next);
    }
    return out;
  }

  Sub visit(Engine& e, long long depth_left, long long& rounds_out) {
    if (e.terminal()) {
      if (e.outcome().kind == Outcome::Kind::Detected) {
        rounds_out = 0;
        return Sub::Detected;
      }
      emit_script(path.size());
      return Sub::Cex;
    }
    if (depth_left <= 0) {
      emit_script(path.size());
      return Sub::DepthOut;
    }
    auto key = e.state_hash(0);
    if (auto it = solved.find(key); it != solved.end()) {
      rounds_out = it->second;
      return Sub::Detected;
    }
    if (on_stack.count(key)) {
      size_t i = 0;
      while (stack_keys[i] != key) ++i;
      emit_script(i);
      return Sub::Cex;
    }
    on_stack.insert(key);
    stack_keys.push_back(key);

    Sub result = Sub::Detected;
    long long worst = 0;
    {
      // begin_round is deterministic, so probing the intents on a clone and
      // branching from the original is safe
      Engine probe(e);
      const auto& intents = probe.begin_round();
      auto sets = branches(intents);
      for (const auto& removed : sets) {
        if (++expanded > cfg.budget) throw BudgetOut{};
        Engine child(e);
        child.begin_round();
        NullSink sink;
        child.finish_round(removed, sink);
        path.push_back(removed);
        long long sub_rounds = 0;
        Sub s = visit(child, depth_left - 1, sub_rounds);
        path.pop_back();
        if (s == Sub::Cex) {
          result = Sub::Cex;
          break;
        }
        if (s == Sub::DepthOut) result = Sub::DepthOut;
        if (s == Sub::Detected) worst = std::max(worst, 1 + sub_rounds);
      }
    }
    on_stack.erase(key);
    stack_keys.pop_back();
    if (result == Sub::Detected) {
      solved[key] = worst;
      rounds_out = worst;
    }
    return result;
  }
};

} // namespace

SearchResult exhaustive_adversary_search(const Footprint& fp, const Algorithm& proto,
                                         const std::vector<AgentId>& roster, Node root,
                                         const SearchConfig& cfg) {
  SearchResult res;
  long long depth = cfg.depth > 0 ? cfg.depth : 4LL * fp.m() * fp.m();
  RunConfig rc;
  rc.f = cfg.f;
  rc.max_rounds = depth;
  rc.stuck_window = depth + 16; // the searcher's cycle check subsumes it
  rc.detect_recurrence = false;
  Engine engine(fp, proto.clone(), roster, root, rc);
  Searcher s{fp, cfg, depth, {}, {}, {}, {}, std::nullopt, 0};
  try {
    long long rounds = 0;
    Sub out = s.visit(engine, depth, rounds);
    res.expanded = s.expanded;
    switch (out) {
      case Sub::Detected:
        res.kind = SearchResult::Kind::AllDetected;
        res.worst_rounds = rounds;
        break;
      case Sub::Cex:
      case Sub::DepthOut:
        res.kind = SearchResult::Kind::Counterexample;
        res.counterexample = s.script.value_or("");
        break;
    }
  } catch (const BudgetOut&) {
    res.kind = SearchResult::Kind::Budget;
    res.expanded = s.expanded;
  }
  return res;
}

} // namespace bhs
