#include "bhs/adversary.hpp"

#include <algorithm>
#include <map>
#include <set>
#include <sstream>

#include <json.hpp>

#include "bhs/rng.hpp"

namespace bhs {

std::vector<std::string> validate_decision(const Footprint& fp, int f,
                                           const std::vector<EdgeId>& removed) {
  std::vector<std::string> bad;
  if (static_cast<int>(removed.size()) > f) bad.push_back("too-many-removals");
  std::vector<char> seen(fp.m(), 0);
  for (EdgeId e : removed) {
    if (e < 0 || e >= fp.m()) {
      bad.push_back("unknown-edge");
      return bad;
    }
    if (seen[e]) bad.push_back("duplicate-edge");
    seen[e] = 1;
  }
  if (!removed.empty() && !fp.connected_without(removed)) bad.push_back("disconnects");
  return bad;
}

namespace {

class EmptyAdversary : public Adversary {
 public:
  std::string name() const override { return "empty"; }
  void reset(const Footprint&, int, uint64_t) override {}
  std::vector<EdgeId> decide(const World&, const std::vector<IntendedMove>&) override {
    return {};
  }
  std::unique_ptr<Adversary> clone() const override {
    return std::make_unique<EmptyAdversary>(*this);
  }
};

// Same behavior as empty, but named for the gadget demo: the only edges worth
// removing there are bridges, which connectivity forbids, so it removes nothing
// and lets the storage limits strand the searchers.
class BridgeProtectAdversary : public EmptyAdversary {
 public:
  std::string name() const override { return "bridge-protect-bhs1"; }
  std::unique_ptr<Adversary> clone() const override {
    return std::make_unique<BridgeProtectAdversary>(*this);
  }
};

class ReplayAdversary : public Adversary {
 public:
  explicit ReplayAdversary(const std::string& script_text) {
    std::istringstream in(script_text);
    std::string line;
    int lineno = 0;
    while (std::getline(in, line)) {
      ++lineno;
      if (line.find_first_not_of(" \t\r\n") == std::string::npos) continue;
      nlohmann::json j = nlohmann::json::parse(line, nullptr, false);
      if (j.is_discarded() || !j.contains("round") || !j.contains("removed"))
        throw ConfigError("replay script line " + std::to_string(lineno) + " is malformed");
      long long round = j["round"].get<long long>();
      auto& rows = script_[round];
      for (const auto& pair : j["removed"]) {
        if (!pair.is_array() || pair.size() != 2)
          throw ConfigError("replay script line " + std::to_string(lineno) +
                            " has a bad edge pair");
        rows.emplace_back(pair[0].get<int>(), pair[1].get<int>());
      }
    }
  }

  std::string name() const override { return "replay"; }

  void reset(const Footprint& fp, int f, uint64_t) override {
    fp_ = &fp;
    end_round_ = 0;
    resolved_.clear();
    for (const auto& [round, pairs] : script_) {
      if (round < 0) throw ConfigError("replay script has a negative round");
      std::vector<EdgeId> ids;
      for (auto [u, v] : pairs) {
        if (u > v) std::swap(u, v);
        EdgeId found = -1;
        for (EdgeId e = 0; e < fp.m(); ++e)
          if (fp.edges[e].u == u && fp.edges[e].v == v) found = e;
        if (found < 0)
          throw ConfigError("replay script removes a non-edge at round " +
                            std::to_string(round));
        ids.push_back(found);
      }
      std::sort(ids.begin(), ids.end());
      ids.erase(std::unique(ids.begin(), ids.end()), ids.end());
      auto bad = validate_decision(fp, f, ids);
      if (!bad.empty())
        throw ConfigError("replay script invalid at round " + std::to_string(round) +
                          ": " + bad.front());
      resolved_[round] = std::move(ids);
      end_round_ = std::max(end_round_, round + 1);
    }
  }

  std::vector<EdgeId> decide(const World& world,
                             const std::vector<IntendedMove>&) override {
    pos_ = std::min(world.round, end_round_);
    auto it = resolved_.find(world.round);
    return it == resolved_.end() ? std::vector<EdgeId>{} : it->second;
  }

  uint64_t fingerprint() const override {
    return pos_ < end_round_ ? static_cast<uint64_t>(pos_) + 1 : 0;
  }

  std::unique_ptr<Adversary> clone() const override {
    return std::make_unique<ReplayAdversary>(*this);
  }

 private:
  const Footprint* fp_ = nullptr;
  std::map<long long, std::vector<std::pair<int, int>>> script_;
  std::map<long long, std::vector<EdgeId>> resolved_;
  long long end_round_ = 0;
  long long pos_ = 0;
};

class RandomAdversary : public Adversary {
 public:
  std::string name() const override { return "random"; }

  void reset(const Footprint& fp, int f, uint64_t seed) override {
    fp_ = &fp;
    f_ = f;
    rng_ = Rng(seed);
  }

  std::vector<EdgeId> decide(const World&, const std::vector<IntendedMove>&) override {
    int want = static_cast<int>(rng_.below(f_ + 1));
    if (want == 0) return {};
    std::vector<EdgeId> order(fp_->m());
    for (EdgeId e = 0; e < fp_->m(); ++e) order[e] = e;
    rng_.shuffle(order);
    std::vector<EdgeId> chosen;
    for (EdgeId e : order) {
      if (static_cast<int>(chosen.size()) == want) break;
      chosen.push_back(e);
      if (!fp_->connected_without(chosen)) chosen.pop_back();
    }
    return chosen;
  }

  uint64_t fingerprint() const override { return rng_.draws; }

  std::unique_ptr<Adversary> clone() const override {
    return std::make_unique<RandomAdversary>(*this);
  }

 private:
  const Footprint* fp_ = nullptr;
  int f_ = 1;
  Rng rng_;
};

class BlockMinIdAdversary : public Adversary {
 public:
  std::string name() const override { return "block-min-id"; }
  void reset(const Footprint& fp, int, uint64_t) override { fp_ = &fp; }

  std::vector<EdgeId> decide(const World&,
                             const std::vector<IntendedMove>& intents) override {
    if (intents.empty()) return {};
    const IntendedMove* best = &intents.front();
    for (const auto& mv : intents)
      if (mv.id < best->id) best = &mv;
    if (!fp_->connected_without({best->edge})) return {};
    return {best->edge};
  }

  std::unique_ptr<Adversary> clone() const override {
    return std::make_unique<BlockMinIdAdversary>(*this);
  }

 private:
  const Footprint* fp_ = nullptr;
};

// The clique adversary. Spokes are the edges incident to the black hole. An
// agent is informed about a spoke once it stood at the spoke's safe endpoint
// in a round when another agent successfully departed through it.
class RulesAdversary : public Adversary {
 public:
  std::string name() const override { return "rules-R1-R5"; }

  void reset(const Footprint& fp, int f, uint64_t) override {
    fp_ = &fp;
    f_ = f;
    informed_.clear();
  }

  std::vector<EdgeId> decide(const World& world,
                             const std::vector<IntendedMove>& intents) override {
    int alive = 0;
    for (const auto& c : world.cores) alive += c.alive ? 1 : 0;

    std::vector<EdgeId> removed;
    auto add_capped = [&](EdgeId e) {
      if (static_cast<int>(removed.size()) >= f_) return;
      if (std::find(removed.begin(), removed.end(), e) != removed.end()) return;
      removed.push_back(e);
      if (!fp_->connected_without(removed)) removed.pop_back();
    };

    if (alive <= f_) { // R5: block every intended move
      std::vector<EdgeId> all;
      for (const auto& mv : intents) all.push_back(mv.edge);
      std::sort(all.begin(), all.end());
      all.erase(std::unique(all.begin(), all.end()), all.end());
      for (EdgeId e : all) add_capped(e);
      return removed;
    }

    std::map<EdgeId, int> spoke_targets; // spoke -> number of intending agents
    std::map<EdgeId, bool> spoke_informed;
    for (const auto& mv : intents) {
      if (mv.to != fp_->black_hole) continue; // R4 keeps clique edges, R1 the rest
      ++spoke_targets[mv.edge];
      if (informed_.count({mv.id, mv.edge})) spoke_informed[mv.edge] = true;
    }
    for (const auto& [e, cnt] : spoke_targets) // R3 before R2, ascending edge id
      if (cnt >= 2) add_capped(e);
    for (const auto& [e, inf] : spoke_informed)
      if (inf && spoke_targets[e] < 2) add_capped(e);
    return removed;
  }

  void observe(const World& world, const std::vector<IntendedMove>& intents,
               const std::vector<EdgeId>& removed) override {
    // Round-start positions: successful movers were at intent.from.
    std::vector<Node> start_pos;
    for (const auto& c : world.cores) start_pos.push_back(c.position);
    auto idx_of = [&](AgentId id) {
      for (size_t i = 0; i < world.cores.size(); ++i)
        if (world.cores[i].id == id) return i;
      return world.cores.size();
    };
    for (const auto& mv : intents)
      if (std::find(removed.begin(), removed.end(), mv.edge) == removed.end())
        start_pos[idx_of(mv.id)] = mv.from;
    for (const auto& mv : intents) {
      if (mv.to != fp_->black_hole) continue;
      if (std::find(removed.begin(), removed.end(), mv.edge) != removed.end()) continue;
      for (size_t i = 0; i < world.cores.size(); ++i)
        if (start_pos[i] == mv.from) informed_.insert({world.cores[i].id, mv.edge});
    }
  }

  uint64_t fingerprint() const override {
    uint64_t h = 1469598103934665603ULL;
    for (const auto& [id, edge] : informed_) {
      h = fnv1a64(&id, sizeof(id), h);
      h = fnv1a64(&edge, sizeof(edge), h);
    }
    return h;
  }

  std::unique_ptr<Adversary> clone() const override {
    return std::make_unique<RulesAdversary>(*this);
  }

 private:
  const Footprint* fp_ = nullptr;
  int f_ = 1;
  std::set<std::pair<AgentId, EdgeId>> informed_; // (agent, spoke) pairs witnessed
};

} // namespace

std::unique_ptr<Adversary> make_empty_adversary() {
  return std::make_unique<EmptyAdversary>();
}
std::unique_ptr<Adversary> make_replay_adversary(const std::string& script_text) {
  return std::make_unique<ReplayAdversary>(script_text);
}
std::unique_ptr<Adversary> make_random_adversary() {
  return std::make_unique<RandomAdversary>();
}
std::unique_ptr<Adversary> make_block_min_id_adversary() {
  return std::make_unique<BlockMinIdAdversary>();
}
std::unique_ptr<Adversary> make_bridge_protect_adversary() {
  return std::make_unique<BridgeProtectAdversary>();
}
std::unique_ptr<Adversary> make_rules_adversary() {
  return std::make_unique<RulesAdversary>();
}

std::unique_ptr<Adversary> make_adversary(const std::string& name,
                                          const std::string& script_text) {
  if (name == "empty") return make_empty_adversary();
  if (name == "replay") return make_replay_adversary(script_text);
  if (name == "random") return make_random_adversary();
  if (name == "block-min-id") return make_block_min_id_adversary();
  if (name == "bridge-protect-bhs1") return make_bridge_protect_adversary();
  if (name == "rules-R1-R5") return make_rules_adversary();
  throw ConfigError("unknown adversary: " + name);
}

} // namespace bhs
