#include "bhs/demo.hpp"

#include <algorithm>
#include <optional>

#include "bhs/bhs.hpp"
#include "bhs/cautious.hpp"

namespace bhs {

namespace {

struct Mix {
  uint64_t h = 14695981039346656037ULL;
  void operator()(uint64_t x) {
    h ^= x + 0x9e3779b97f4a7c15ULL;
    h *= 1099511628211ULL;
  }
};

struct DemoGroup {
  CautiousGroup walk;
  bool want = false;    // next crossing chosen but not yet started
  bool pending = false; // leader landed; process the arrival this round
  bool stalled = false; // every attempt last round bounced off a missing edge
  Port next = -1;
  std::vector<int> movers;

  void mix_into(Mix& mix) const {
    mix(walk.fingerprint());
    mix((want ? 1u : 0u) | (pending ? 2u : 0u) | (stalled ? 4u : 0u));
    mix(static_cast<uint64_t>(next + 1));
    mix(movers.size());
    for (int m : movers) mix(static_cast<uint64_t>(m));
  }
};

// Independent groups, each advancing a plugin-fed cautious walk. No claims,
// no helper trades, no dances: with these rosters there is never a spare
// member to trade, which is the point of the demonstration.
class UndermannedSearch : public Algorithm {
 public:
  enum class Mode { GadgetPairs, ShortTeam };

  UndermannedSearch(Mode mode, int f) : mode_(mode), f_(f) {}

  std::string name() const override {
    return mode_ == Mode::GadgetPairs ? "bhs1-demo" : "fbhs-demo";
  }
  int whiteboard_capacity() const override {
    return std::max(1, static_cast<int>(gs_.size()));
  }
  bool requires_black_hole() const override { return true; }

  void reset(const Footprint& fp, std::vector<AgentCore>& cores, Node root) override {
    (void)root;
    const int n = static_cast<int>(cores.size());
    gs_.clear();
    plugins_.clear();

    auto add_group = [&](int leader, int h1, int h2) {
      DemoGroup g;
      int gi = static_cast<int>(gs_.size());
      g.walk.group = gi;
      g.walk.leader = leader;
      g.walk.helper1 = h1;
      g.walk.helper2 = h2;
      cores[leader].role = Role::Leader;
      cores[leader].group = gi;
      if (h1 >= 0) {
        cores[h1].role = Role::Helper1;
        cores[h1].group = gi;
      }
      if (h2 >= 0) {
        cores[h2].role = Role::Helper2;
        cores[h2].group = gi;
      }
      gs_.push_back(std::move(g));
    };

    if (mode_ == Mode::GadgetPairs) {
      Node bh = fp.black_hole;
      if (bh != 0) throw ConfigError("pair demo runs on the hazard gadget");
      int k = fp.degree(bh);
      int m2 = k > 0 ? (fp.n - 1) / k : 0;
      if (k < 2 || m2 < 2 || k * m2 + 1 != fp.n ||
          fp.m() != k * (m2 * (m2 - 1) / 2 + 1))
        throw ConfigError("footprint is not the hazard gadget");
      for (int c = 0; c < k; ++c) {
        Node base = 1 + c * m2;
        if (fp.out(bh, c).to != base)
          throw ConfigError("footprint is not the hazard gadget");
        for (int i = 0; i < m2; ++i)
          for (int j = i + 1; j < m2; ++j) {
            bool linked = false;
            for (int p = 0; p < fp.degree(base + i) && !linked; ++p)
              if (fp.out(base + i, p).to == base + j) linked = true;
            if (!linked) throw ConfigError("footprint is not the hazard gadget");
          }
      }
      if (n != 2 * k) throw ConfigError("pair demo needs two agents per clique");
      for (int c = 0; c < k; ++c) {
        add_group(2 * c, 2 * c + 1, -1);
        // The cliques only meet at the hole, so a rooted team could never
        // spread out; the adversarial start drops each pair at its bridge.
        Node base = 1 + c * m2;
        cores[2 * c].position = base;
        cores[2 * c + 1].position = base;
      }
    } else {
      if (n != 2 * f_ + 1) throw ConfigError("short-team demo needs 2f+1 agents");
      int trios = n / 3;
      int i = 0;
      for (; i < 3 * trios; i += 3) add_group(i, i + 1, i + 2);
      if (n - i == 2) add_group(i, i + 1, -1);
      if (n - i == 1) add_group(i, -1, -1);
    }

    for (int gi = 0; gi < static_cast<int>(gs_.size()); ++gi) {
      plugins_.push_back(make_dfs_plugin());
      plugins_.back()->reset(gi, static_cast<int>(gs_.size()));
    }
  }

  Decision step(const Footprint& fp, std::vector<AgentCore>& cores,
                const std::vector<LocalView>& views, long long round) override;

  uint64_t aux_fingerprint() const override {
    Mix mix;
    mix(mode_ == Mode::GadgetPairs ? 1u : 2u);
    mix(static_cast<uint64_t>(f_));
    for (const auto& g : gs_) g.mix_into(mix);
    for (const auto& p : plugins_) mix(p->fingerprint());
    return mix.h;
  }

  std::unique_ptr<Algorithm> clone() const override {
    auto c = std::make_unique<UndermannedSearch>(mode_, f_);
    c->gs_ = gs_;
    for (const auto& p : plugins_) c->plugins_.push_back(p->clone());
    return c;
  }

 private:
  Mode mode_;
  int f_;
  std::vector<DemoGroup> gs_;
  std::vector<std::unique_ptr<ExplorationPlugin>> plugins_;
};

bool walk_active(const CautiousGroup& w) {
  return w.phase == GroupPhase::Probing || w.phase == GroupPhase::Verify ||
         w.phase == GroupPhase::LeaderCross;
}

Decision UndermannedSearch::step(const Footprint& fp, std::vector<AgentCore>& cores,
                                 const std::vector<LocalView>& views, long long round) {
  (void)fp;
  (void)round;
  Decision out;
  const int G = static_cast<int>(gs_.size());
  std::vector<char> stepped(G, 0);
  std::optional<DetectClaim> claim;

  for (auto& g : gs_) {
    for (int m : {g.walk.leader, g.walk.helper1, g.walk.helper2})
      if (m >= 0 && cores[m].alive) cores[m].success = views[m].last_attempt;
    g.stalled = !g.movers.empty();
    for (int m : g.movers)
      if (!cores[m].alive || views[m].last_attempt) g.stalled = false;
  }

  auto solo = [&](int gi) { return gs_[gi].walk.helper1 < 0; };

  auto consult = [&](int gi, bool arrived, bool stalled_flag) {
    DemoGroup& g = gs_[gi];
    PluginView pv;
    pv.group = gi;
    pv.groups = G;
    pv.degree = views[g.walk.leader].degree;
    pv.board = views[g.walk.leader].board;
    pv.pin = arrived ? cores[g.walk.leader].pin : Port{-1};
    pv.arrived = arrived;
    pv.stalled = stalled_flag;
    for (int h = 0; h < G; ++h)
      if (h != gi && cores[gs_[h].walk.leader].alive &&
          cores[gs_[h].walk.leader].position == cores[g.walk.leader].position)
        pv.co_groups.push_back(h);
    PluginMove mv = plugins_[gi]->step(pv);
    for (const auto& e : mv.writes) out.writes.push_back({g.walk.leader, e});
    g.next = mv.port;
    g.want = mv.port >= 0;
  };

  auto step_walk = [&](int gi) {
    DemoGroup& g = gs_[gi];
    stepped[gi] = 1;
    CautiousResult r = cautious_step(g.walk, cores, views);
    for (const auto& mv : r.moves) out.moves.push_back(mv);
    if (r.reunited) g.pending = true;
    if (r.verdict == CautiousResult::Verdict::BlackHole && !claim)
      claim = DetectClaim{g.walk.leader, g.walk.port};
  };

  // a blocked probe is the traversal's to keep or abandon; verify and leader
  // crossings ride out their stalls
  for (int gi = 0; gi < G; ++gi) {
    DemoGroup& g = gs_[gi];
    if (solo(gi) || !cores[g.walk.leader].alive) continue;
    if (g.walk.phase != GroupPhase::Probing || !g.stalled) continue;
    Port before = g.walk.port;
    consult(gi, false, true);
    if (g.want && g.next == before) {
      g.want = false; // same port: keep the walk and retry
      continue;
    }
    g.walk.phase = GroupPhase::Idle;
    g.walk.port = -1;
    g.walk.attempted = false;
  }

  for (int gi = 0; gi < G; ++gi)
    if (!solo(gi) && !stepped[gi] && walk_active(gs_[gi].walk)) step_walk(gi);

  for (int gi = 0; gi < G; ++gi) {
    DemoGroup& g = gs_[gi];
    if (!cores[g.walk.leader].alive) continue;
    if (solo(gi)) {
      // the lone walker crosses without an escort and never learns anything
      // from a silent disappearance
      if (!g.movers.empty() && views[g.walk.leader].last_attempt)
        consult(gi, true, false);
      else if (!g.movers.empty() && !views[g.walk.leader].last_attempt)
        consult(gi, false, true);
      else if (!g.want)
        consult(gi, false, false);
      if (g.want) out.moves.push_back({g.walk.leader, g.next});
      continue;
    }
    if (g.pending) {
      g.pending = false;
      consult(gi, true, false);
    } else if (g.walk.phase == GroupPhase::Idle && !g.want && !stepped[gi]) {
      consult(gi, false, false); // parked or not yet started: poll the rules
    }
    if (g.want && g.walk.phase == GroupPhase::Idle) {
      g.want = false;
      cautious_begin(g.walk, g.next);
      step_walk(gi);
    }
  }

  out.detection = claim;

  for (auto& g : gs_) g.movers.clear();
  for (const auto& mv : out.moves) {
    int gi = cores[mv.agent].group;
    if (gi >= 0 && gi < G) gs_[gi].movers.push_back(mv.agent);
  }

  return out;
}

} // namespace

std::unique_ptr<Algorithm> make_bhs1_demo() {
  return std::make_unique<UndermannedSearch>(UndermannedSearch::Mode::GadgetPairs, 1);
}

std::unique_ptr<Algorithm> make_fbhs_demo(int f) {
  if (f < 1) throw ConfigError("fault budget must be at least 1");
  return std::make_unique<UndermannedSearch>(UndermannedSearch::Mode::ShortTeam, f);
}

} // namespace bhs
