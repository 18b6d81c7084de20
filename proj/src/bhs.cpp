#include "bhs/bhs.hpp"

#include <algorithm>
#include <array>
#include <optional>

#include "bhs/cautious.hpp"
#include "bhs/explore.hpp"

// Black-hole search with agent groups. Each group of three acts as one
// virtual explorer running the whiteboard DFS; first visits go through the
// cautious crossing protocol so only helpers are ever exposed. Variants
// differ in how groups get around edges the adversary keeps missing:
//
//   bhs1-9  three groups, any contested crossing is resolved by rerouting
//           the highest-index group, trading a stranded helper for a fresh
//           one when the blocked group is split mid-crossing
//   bhs1-6  two groups; the second group always yields, and when the first
//           is blocked while the second is stranded on the far side of the
//           same edge the bodies trade search identities outright
//   bhsf    2f groups, rerouting decisions delegated to a plugin
//
// Group membership is by roster index; the virtual explorer's registers
// live in the leader's core and move with the leadership.

namespace bhs {

namespace {

struct Mix {
  uint64_t h = 14695981039346656037ULL;
  void operator()(uint64_t x) {
    for (int i = 0; i < 8; ++i) {
      h ^= x & 0xff;
      h *= 1099511628211ULL;
      x >>= 8;
    }
  }
};

bool walk_active(const CautiousGroup& w) {
  return w.phase == GroupPhase::Probing || w.phase == GroupPhase::Verify ||
         w.phase == GroupPhase::LeaderCross;
}

bool walk_split(const CautiousGroup& w) {
  return w.phase == GroupPhase::Verify || w.phase == GroupPhase::LeaderCross;
}

bool dancing(const CautiousGroup& w) {
  return w.phase == GroupPhase::LeaderToU || w.phase == GroupPhase::H2Back ||
         w.phase == GroupPhase::LeadersBack;
}

struct GroupUnit {
  CautiousGroup walk;
  bool want = false;       // next crossing chosen but not yet started
  bool pending = false;    // leader landed; process the arrival this round
  bool adopted = false;    // arrival taken over from another group
  Port adopted_pin = -1;
  Port flex_port = -1;     // plugin-chosen crossing (bhsf only)
  Port dance_back = -1;    // return leg of the role-repair dance
  Node claim_node[2] = {-1, -1}; // both endpoints stay reserved while dancing
  Port claim_port[2] = {-1, -1};
  bool stalled = false;    // every attempt last round failed
  std::vector<int> movers; // roster indices that attempted a move last round

  void mix_into(Mix& mix) const {
    mix(walk.fingerprint());
    mix(static_cast<uint64_t>((want ? 1 : 0) | (pending ? 2 : 0) | (adopted ? 4 : 0) |
                              (stalled ? 8 : 0)));
    mix(static_cast<uint64_t>(adopted_pin + 1));
    mix(static_cast<uint64_t>(flex_port + 1));
    mix(static_cast<uint64_t>(dance_back + 1));
    for (int k = 0; k < 2; ++k) {
      mix(static_cast<uint64_t>(claim_node[k] + 1));
      mix(static_cast<uint64_t>(claim_port[k] + 1));
    }
    mix(movers.size());
    for (int m : movers) mix(static_cast<uint64_t>(m));
  }
};

class DfsPlugin : public ExplorationPlugin {
 public:
  std::string name() const override { return "dfs"; }

  void reset(int group, int groups) override {
    (void)groups;
    group_ = group;
    virt_ = AgentCore{};
    booted_ = false;
  }

  PluginMove step(const PluginView& v) override {
    PluginMove out;
    if (!booted_) {
      booted_ = true;
      ExplorerDecision d = explorer_bootstrap(virt_, group_);
      out.writes = std::move(d.writes);
      out.port = d.move.value_or(-1);
      return out;
    }
    LocalView lv;
    lv.alive = true;
    lv.degree = v.degree;
    lv.board = v.board;
    if (v.arrived) {
      virt_.pin = v.pin;
      ExplorerDecision d = dfs_arrival(virt_, group_, lv);
      out.writes = std::move(d.writes);
      out.port = virt_.pout;
      return out;
    }
    if (v.stalled && v.group != 0) {
      // the lowest group insists so that someone always finishes the edge
      ExplorerDecision d = virt_.state == AgentState::Backtrack
                               ? backtrack_deviate(virt_, group_, lv)
                               : explore_deviate(virt_, group_, lv);
      out.writes = std::move(d.writes);
      out.port = d.move.value_or(virt_.pout);
      return out;
    }
    out.port = virt_.pout;
    return out;
  }

  uint64_t fingerprint() const override {
    Mix mix;
    mix(static_cast<uint64_t>(virt_.label));
    mix(virt_.state == AgentState::Backtrack ? 1u : 0u);
    mix(static_cast<uint64_t>(virt_.pout + 1));
    mix(static_cast<uint64_t>(virt_.pin + 1));
    mix(booted_ ? 1u : 0u);
    mix(static_cast<uint64_t>(group_));
    return mix.h;
  }

  std::unique_ptr<ExplorationPlugin> clone() const override {
    return std::make_unique<DfsPlugin>(*this);
  }

 private:
  AgentCore virt_;
  int group_ = 0;
  bool booted_ = false;
};

class GroupSearch : public Algorithm {
 public:
  enum class Variant { Nine, Six, Flex };

  GroupSearch(Variant variant, PluginFactory factory)
      : variant_(variant), factory_(std::move(factory)) {}

  std::string name() const override {
    switch (variant_) {
      case Variant::Nine: return "bhs1-9";
      case Variant::Six: return "bhs1-6";
      default: return "bhsf";
    }
  }

  int whiteboard_capacity() const override { return std::max(1, group_count_); }
  bool requires_black_hole() const override { return true; }

  void reset(const Footprint& fp, std::vector<AgentCore>& cores, Node root) override {
    (void)fp;
    (void)root;
    const int n = static_cast<int>(cores.size());
    if (variant_ == Variant::Nine && n != 9)
      throw ConfigError("bhs1-9 needs exactly 9 agents");
    if (variant_ == Variant::Six && n != 6)
      throw ConfigError("bhs1-6 needs exactly 6 agents");
    if (variant_ == Variant::Flex && (n < 6 || n % 6 != 0))
      throw ConfigError("bhsf needs 6f agents");
    group_count_ = n / 3;
    gs_.assign(group_count_, GroupUnit{});
    plugins_.clear();

    auto place = [&](int gi, int leader, int h1, int h2) {
      auto& w = gs_[gi].walk;
      w.group = gi;
      w.leader = leader;
      w.helper1 = h1;
      w.helper2 = h2;
      cores[leader].role = Role::Leader;
      cores[h1].role = Role::Helper1;
      cores[h2].role = Role::Helper2;
      cores[leader].group = cores[h1].group = cores[h2].group = gi;
    };
    // cores arrive sorted by id
    if (variant_ == Variant::Nine) {
      for (int i = 0; i < 3; ++i) place(i, i, 3 + i, 6 + i);
    } else if (variant_ == Variant::Six) {
      place(0, 0, 2, 3);
      place(1, 1, 4, 5);
    } else {
      for (int gi = 0; gi < group_count_; ++gi)
        place(gi, 3 * gi, 3 * gi + 1, 3 * gi + 2);
      PluginFactory make = factory_ ? factory_ : [] { return make_dfs_plugin(); };
      for (int gi = 0; gi < group_count_; ++gi) {
        plugins_.push_back(make());
        plugins_.back()->reset(gi, group_count_);
      }
    }
  }

  Decision step(const Footprint& fp, std::vector<AgentCore>& cores,
                const std::vector<LocalView>& views, long long round) override;

  uint64_t aux_fingerprint() const override {
    Mix mix;
    mix(static_cast<uint64_t>(variant_));
    mix(static_cast<uint64_t>(group_count_));
    for (const auto& g : gs_) g.mix_into(mix);
    for (const auto& p : plugins_) mix(p->fingerprint());
    return mix.h;
  }

  std::unique_ptr<Algorithm> clone() const override {
    auto c = std::make_unique<GroupSearch>(variant_, factory_);
    c->group_count_ = group_count_;
    c->gs_ = gs_;
    for (const auto& p : plugins_) c->plugins_.push_back(p->clone());
    return c;
  }

 private:
  Variant variant_;
  PluginFactory factory_;
  int group_count_ = 0;
  std::vector<GroupUnit> gs_;
  std::vector<std::unique_ptr<ExplorationPlugin>> plugins_;
};

Decision GroupSearch::step(const Footprint& fp, std::vector<AgentCore>& cores,
                           const std::vector<LocalView>& views, long long round) {
  Decision out;
  const int G = group_count_;
  std::vector<char> stepped(G, 0); // walk advanced this round
  std::vector<char> touched(G, 0); // membership changed; skip further rules
  std::optional<DetectClaim> detection;
  int detection_gi = G;

  auto members = [&](const GroupUnit& g) {
    return std::array<int, 3>{g.walk.leader, g.walk.helper1, g.walk.helper2};
  };

  // each member publishes how its own last attempt went
  for (auto& g : gs_)
    for (int m : members(g))
      if (m >= 0 && cores[m].alive) cores[m].success = views[m].last_attempt;

  // a group is stalled when it attempted moves last round and every one of
  // them bounced off a missing edge (a death is not a stall)
  for (auto& g : gs_) {
    g.stalled = !g.movers.empty();
    for (int m : g.movers)
      if (!cores[m].alive || views[m].last_attempt) g.stalled = false;
  }

  auto leader_node = [&](int gi) { return cores[gs_[gi].walk.leader].position; };

  auto next_port = [&](int gi) {
    return variant_ == Variant::Flex ? gs_[gi].flex_port : cores[gs_[gi].walk.leader].pout;
  };

  auto intact = [&](int gi) {
    const auto& w = gs_[gi].walk;
    if (w.leader < 0 || !cores[w.leader].alive) return false;
    Node at = cores[w.leader].position;
    for (int m : {w.helper1, w.helper2})
      if (m < 0 || !cores[m].alive || cores[m].position != at) return false;
    return true;
  };

  // a group with a chosen crossing it has not managed to begin
  auto wants_key = [&](int gi, Node u, Port p) {
    const GroupUnit& g = gs_[gi];
    return g.want && !g.pending && g.walk.phase == GroupPhase::Idle &&
           cores[g.walk.leader].alive && leader_node(gi) == u && next_port(gi) == p;
  };

  // crossings in progress reserve their starting port so no two groups walk
  // into the same unknown edge; dances reserve both endpoints
  auto claimed_by_other = [&](int gi, Node u, Port p) {
    for (int h = 0; h < G; ++h) {
      if (h == gi) continue;
      const GroupUnit& o = gs_[h];
      if (!cores[o.walk.leader].alive) continue;
      if (walk_active(o.walk) && leader_node(h) == u && o.walk.port == p) return true;
      if (dancing(o.walk))
        for (int k = 0; k < 2; ++k)
          if (o.claim_node[k] == u && o.claim_port[k] == p) return true;
    }
    return false;
  };

  // drop the blocked move and pick the next one by the traversal rules
  auto apply_deviate = [&](int gi) {
    GroupUnit& g = gs_[gi];
    AgentCore& lead = cores[g.walk.leader];
    ExplorerDecision d = lead.state == AgentState::Backtrack
                             ? backtrack_deviate(lead, gi, views[g.walk.leader])
                             : explore_deviate(lead, gi, views[g.walk.leader]);
    for (const auto& e : d.writes) out.writes.push_back({g.walk.leader, e});
    g.walk.phase = GroupPhase::Idle;
    g.walk.port = -1;
    g.walk.attempted = false;
    g.want = true;
    touched[gi] = 1;
  };

  // whole-group re-walk of a known safe edge (second variant's backtracks)
  auto plain_step = [&](int gi) {
    GroupUnit& g = gs_[gi];
    CautiousResult r;
    if (g.walk.attempted && views[g.walk.leader].last_attempt) {
      g.walk.phase = GroupPhase::Idle;
      g.walk.port = -1;
      g.walk.attempted = false;
      r.reunited = true;
      return r;
    }
    g.walk.attempted = true;
    Node at = leader_node(gi);
    for (int m : members(g))
      if (m >= 0 && cores[m].alive && cores[m].position == at)
        r.moves.push_back({m, g.walk.port});
    return r;
  };

  // three-leg shuffle that reassembles a rebuilt group: the new leader joins
  // the two bodies waiting across, then everyone returns together
  auto dance_step = [&](int gi) {
    GroupUnit& g = gs_[gi];
    auto& w = g.walk;
    CautiousResult r;
    if (w.phase == GroupPhase::LeaderToU && w.attempted && views[w.leader].last_attempt) {
      w.phase = GroupPhase::H2Back;
      w.port = g.dance_back;
      w.attempted = false;
    }
    if (w.phase == GroupPhase::H2Back && w.attempted && cores[w.helper2].alive &&
        views[w.helper2].last_attempt) {
      w.phase = GroupPhase::LeadersBack;
      w.attempted = false;
    }
    if (w.phase == GroupPhase::LeadersBack && w.attempted && views[w.leader].last_attempt) {
      w.phase = GroupPhase::Idle;
      w.port = -1;
      w.attempted = false;
      g.dance_back = -1;
      g.claim_node[0] = g.claim_node[1] = -1;
      g.claim_port[0] = g.claim_port[1] = -1;
      return r; // the interrupted crossing resumes through want
    }
    w.attempted = true;
    switch (w.phase) {
      case GroupPhase::LeaderToU:
        r.moves.push_back({w.leader, w.port});
        break;
      case GroupPhase::H2Back:
        r.moves.push_back({w.helper2, w.port});
        break;
      case GroupPhase::LeadersBack:
        r.moves.push_back({w.leader, w.port});
        if (w.helper1 >= 0 && cores[w.helper1].alive)
          r.moves.push_back({w.helper1, w.port});
        break;
      default:
        break;
    }
    return r;
  };

  auto step_walk = [&](int gi) {
    GroupUnit& g = gs_[gi];
    stepped[gi] = 1;
    CautiousResult r;
    if (walk_active(g.walk))
      r = cautious_step(g.walk, cores, views);
    else if (g.walk.phase == GroupPhase::Plain)
      r = plain_step(gi);
    else if (dancing(g.walk))
      r = dance_step(gi);
    for (const auto& mv : r.moves) out.moves.push_back(mv);
    if (r.reunited) g.pending = true;
    if (r.verdict == CautiousResult::Verdict::BlackHole && gi < detection_gi) {
      detection_gi = gi;
      detection = DetectClaim{g.walk.leader, g.walk.port};
    }
  };

  // trade the stranded helper of a split, blocked crossing for a live one
  // from a whole group queued on the same edge; the donor adopts the
  // crossing, the freed group reroutes
  auto handoff = [&](int dev_i, int don_i) {
    GroupUnit& dev = gs_[dev_i];
    GroupUnit& don = gs_[don_i];
    bool verify_case = dev.walk.phase == GroupPhase::Verify;
    int& dev_slot = verify_case ? dev.walk.helper1 : dev.walk.helper2;
    int& don_slot = verify_case ? don.walk.helper1 : don.walk.helper2;
    int across = dev_slot;
    int fresh = don_slot;
    dev_slot = fresh;
    don_slot = across;
    Role role = verify_case ? Role::Helper1 : Role::Helper2;
    cores[fresh].group = dev_i;
    cores[fresh].role = role;
    if (across >= 0) {
      cores[across].group = don_i;
      cores[across].role = role;
    }
    don.walk.phase = verify_case ? GroupPhase::Verify : GroupPhase::LeaderCross;
    don.walk.port = dev.walk.port;
    don.walk.attempted = false;
    don.want = false;
    don.pending = false;
    touched[don_i] = 1;
    apply_deviate(dev_i);
  };

  // first variant: around any stalled crossing, the highest-index group of
  // those contesting the edge gets out of the way
  auto nine_rules = [&]() {
    for (int ci = 0; ci < G; ++ci) {
      if (touched[ci]) continue;
      GroupUnit& c = gs_[ci];
      if (!walk_active(c.walk) || !c.stalled || !cores[c.walk.leader].alive) continue;
      Node u = leader_node(ci);
      Port p = c.walk.port;
      std::vector<int> s{ci};
      for (int gi = 0; gi < G; ++gi)
        if (gi != ci && !touched[gi] && wants_key(gi, u, p)) s.push_back(gi);
      if (s.size() < 2) continue;
      int dev_i = *std::max_element(s.begin(), s.end());
      if (dev_i != ci) {
        apply_deviate(dev_i);
        continue;
      }
      if (c.walk.phase == GroupPhase::Probing) {
        apply_deviate(ci);
        continue;
      }
      // the owner is split mid-crossing and cannot leave on its own
      int don_i = -1;
      for (int gi : s)
        if (gi != ci && intact(gi) && (don_i < 0 || gi < don_i)) don_i = gi;
      if (don_i >= 0) handoff(ci, don_i);
    }
  };

  // second variant, both groups split-stalled across the same edge in
  // opposite directions: each adopts the other's stranded member
  auto six_exchange = [&]() {
    GroupUnit& a = gs_[0];
    GroupUnit& b = gs_[1];
    if (!walk_split(a.walk) || !walk_split(b.walk)) return;
    if (!a.stalled || !b.stalled) return;
    if (!cores[a.walk.leader].alive || !cores[b.walk.leader].alive) return;
    Node u = leader_node(0);
    Node v = leader_node(1);
    if (u == v) return;
    if (fp.out(u, a.walk.port).to != v || fp.out(v, b.walk.port).to != u) return;
    int a_across = a.walk.phase == GroupPhase::Verify ? a.walk.helper1 : a.walk.helper2;
    int b_across = b.walk.phase == GroupPhase::Verify ? b.walk.helper1 : b.walk.helper2;
    if (a_across < 0 || b_across < 0) return;
    if (!cores[a_across].alive || !cores[b_across].alive) return;
    auto adopt = [&](GroupUnit& g, int gi, int newcomer) {
      if (g.walk.phase == GroupPhase::Verify) {
        g.walk.helper1 = newcomer;
        cores[newcomer].role = Role::Helper1;
        g.walk.phase = GroupPhase::Probing; // probe again with the new helper
      } else {
        g.walk.helper2 = newcomer;
        cores[newcomer].role = Role::Helper2;
      }
      g.walk.attempted = false;
      cores[newcomer].group = gi;
    };
    adopt(a, 0, b_across);
    adopt(b, 1, a_across);
    touched[0] = touched[1] = 1;
  };

  // second variant, first group blocked at v while the second is stranded
  // across the very same edge: the stranded body takes over the first
  // group's search and the displaced bodies dance back into one group
  auto six_far_side = [&]() {
    if (touched[0] || touched[1]) return;
    GroupUnit& g1 = gs_[0];
    GroupUnit& g2 = gs_[1];
    bool g1_blocked = g1.stalled && intact(0) &&
                      (g1.walk.phase == GroupPhase::Probing ||
                       g1.walk.phase == GroupPhase::Plain);
    if (!g1_blocked || !walk_split(g2.walk) || !g2.stalled) return;
    Node v = leader_node(0);
    Port q = g1.walk.port;
    int across = g2.walk.phase == GroupPhase::Verify ? g2.walk.helper1 : g2.walk.helper2;
    if (across < 0 || !cores[across].alive) return;
    if (cores[across].position != v || cores[across].pin != q) return;
    Node u = fp.out(v, q).to;
    if (!cores[g2.walk.leader].alive || cores[g2.walk.leader].position != u) return;

    int old_l1 = g1.walk.leader, old_h1 = g1.walk.helper1, old_h2 = g1.walk.helper2;
    int old_l2 = g2.walk.leader;
    int at_hand = g2.walk.phase == GroupPhase::Verify ? g2.walk.helper2 : g2.walk.helper1;
    Port back = g2.walk.port;
    AgentCore virt1 = cores[old_l1];
    AgentCore virt2 = cores[old_l2];

    // the second search continues in the first group's bodies, its pending
    // crossing completed by the body that already made it to v
    g2.walk.leader = old_l1;
    g2.walk.helper1 = old_h1;
    g2.walk.helper2 = old_h2;
    g2.walk.phase = GroupPhase::Idle;
    g2.walk.port = -1;
    g2.walk.attempted = false;
    g2.want = false;
    g2.pending = true;
    g2.adopted = true;
    g2.adopted_pin = q;
    cores[old_l1].label = virt2.label;
    cores[old_l1].state = virt2.state;
    cores[old_l1].pout = virt2.pout;
    for (int m : {old_l1, old_h1, old_h2}) cores[m].group = 1;

    // the first search reassembles around the stranded body at v
    g1.walk.leader = across;
    g1.walk.helper1 = old_l2;
    g1.walk.helper2 = at_hand >= 0 ? at_hand : -1;
    g1.walk.phase = GroupPhase::LeaderToU;
    g1.walk.port = q;
    g1.walk.attempted = false;
    g1.dance_back = back;
    g1.claim_node[0] = v;
    g1.claim_port[0] = q;
    g1.claim_node[1] = u;
    g1.claim_port[1] = back;
    g1.want = true; // the blocked crossing resumes once the dance is done
    g1.pending = false;
    cores[across].label = virt1.label;
    cores[across].state = virt1.state;
    cores[across].pout = virt1.pout;
    cores[across].role = Role::Leader;
    cores[old_l2].role = Role::Helper1;
    cores[old_l2].group = 0;
    if (at_hand >= 0) {
      cores[at_hand].role = Role::Helper2;
      cores[at_hand].group = 0;
    }
    cores[across].group = 0;
    touched[0] = touched[1] = 1;
  };

  // second variant's yield rules: the second group reroutes whenever it is
  // blocked and whole, or queued behind a blocked reservation; if it is
  // split on an edge the first group wants, the first group takes over
  auto six_rules = [&]() {
    if (touched[1]) return;
    GroupUnit& g1 = gs_[0];
    GroupUnit& g2 = gs_[1];
    if (!cores[g2.walk.leader].alive) return;
    bool blocked_walk =
        (walk_active(g2.walk) || g2.walk.phase == GroupPhase::Plain) && g2.stalled;
    if (blocked_walk && intact(1)) {
      apply_deviate(1);
      return;
    }
    if (g2.want && !g2.pending && g2.walk.phase == GroupPhase::Idle) {
      Node u = leader_node(1);
      Port p = next_port(1);
      bool holder_stalled = false;
      if (cores[g1.walk.leader].alive) {
        if (walk_active(g1.walk) && g1.stalled && leader_node(0) == u &&
            g1.walk.port == p)
          holder_stalled = true;
        if (dancing(g1.walk) && g1.stalled)
          for (int k = 0; k < 2; ++k)
            if (g1.claim_node[k] == u && g1.claim_port[k] == p) holder_stalled = true;
      }
      if (holder_stalled) {
        apply_deviate(1);
        return;
      }
    }
    if (!walk_split(g2.walk) || !g2.stalled || touched[0]) return;
    if (!cores[g2.walk.leader].alive || !cores[g1.walk.leader].alive) return;
    Node u = leader_node(1);
    Port p = g2.walk.port;
    bool g1_queued = wants_key(0, u, p) ||
                     (g1.walk.phase == GroupPhase::Plain && g1.stalled &&
                      leader_node(0) == u && g1.walk.port == p);
    if (g1_queued && intact(0)) handoff(1, 0);
  };

  auto flex_view = [&](int gi, bool arrived, bool stalled_flag) {
    PluginView pv;
    pv.group = gi;
    pv.groups = G;
    const GroupUnit& g = gs_[gi];
    pv.degree = views[g.walk.leader].degree;
    pv.board = views[g.walk.leader].board;
    pv.pin = arrived ? cores[g.walk.leader].pin : Port{-1};
    pv.arrived = arrived;
    pv.stalled = stalled_flag;
    for (int h = 0; h < G; ++h)
      if (h != gi && cores[gs_[h].walk.leader].alive && leader_node(h) == leader_node(gi))
        pv.co_groups.push_back(h);
    return pv;
  };

  auto consult = [&](int gi, bool arrived, bool stalled_flag) {
    GroupUnit& g = gs_[gi];
    PluginMove mv = plugins_[gi]->step(flex_view(gi, arrived, stalled_flag));
    for (const auto& e : mv.writes) out.writes.push_back({g.walk.leader, e});
    g.flex_port = mv.port;
    g.want = mv.port >= 0;
  };

  // a blocked probe is the plugin's to keep or abandon; verify and leader
  // crossings always ride out the stall
  auto flex_stalls = [&]() {
    for (int gi = 0; gi < G; ++gi) {
      GroupUnit& g = gs_[gi];
      if (g.walk.phase != GroupPhase::Probing || !g.stalled) continue;
      if (!cores[g.walk.leader].alive) continue;
      Port before = g.walk.port;
      consult(gi, false, true);
      if (g.want && g.flex_port == before) {
        g.want = false; // same port: keep the walk and retry
        continue;
      }
      g.walk.phase = GroupPhase::Idle;
      g.walk.port = -1;
      g.walk.attempted = false;
    }
  };

  if (round == 0 && variant_ != Variant::Flex) {
    for (int gi = 0; gi < G; ++gi) {
      GroupUnit& g = gs_[gi];
      ExplorerDecision d = explorer_bootstrap(cores[g.walk.leader], gi);
      for (const auto& e : d.writes) out.writes.push_back({g.walk.leader, e});
      g.want = true;
    }
  }

  if (round > 0) {
    if (variant_ == Variant::Six) {
      six_exchange();
      six_far_side();
      six_rules();
    } else if (variant_ == Variant::Nine) {
      nine_rules();
    } else {
      flex_stalls();
    }
  }

  for (int gi = 0; gi < G; ++gi)
    if (!stepped[gi] && (walk_active(gs_[gi].walk) ||
                         gs_[gi].walk.phase == GroupPhase::Plain || dancing(gs_[gi].walk)))
      step_walk(gi);

  // arrivals and fresh starts, lowest group first so same-round starters
  // queue behind the winner's reservation
  for (int gi = 0; gi < G; ++gi) {
    GroupUnit& g = gs_[gi];
    if (!cores[g.walk.leader].alive) continue;
    if (g.pending) {
      g.pending = false;
      AgentCore& lead = cores[g.walk.leader];
      if (g.adopted) {
        lead.pin = g.adopted_pin;
        g.adopted = false;
        g.adopted_pin = -1;
      }
      if (variant_ == Variant::Flex) {
        consult(gi, true, false);
      } else {
        ExplorerDecision d = dfs_arrival(lead, gi, views[g.walk.leader]);
        for (const auto& e : d.writes) out.writes.push_back({g.walk.leader, e});
        g.want = true; // the traversal always has a next move
      }
    } else if (variant_ == Variant::Flex && g.walk.phase == GroupPhase::Idle && !g.want &&
               !stepped[gi]) {
      consult(gi, false, false); // parked or not yet started: poll the plugin
    }
    if (g.want && !g.pending && g.walk.phase == GroupPhase::Idle) {
      Node u = leader_node(gi);
      Port p = next_port(gi);
      bool plain_move = variant_ == Variant::Six &&
                        cores[g.walk.leader].state == AgentState::Backtrack;
      if (variant_ != Variant::Flex && !plain_move && claimed_by_other(gi, u, p))
        continue;
      g.want = false;
      if (plain_move) {
        g.walk.phase = GroupPhase::Plain;
        g.walk.port = p;
        g.walk.attempted = false;
      } else {
        cautious_begin(g.walk, p);
      }
      step_walk(gi);
    }
  }

  out.detection = detection;

  for (auto& g : gs_) g.movers.clear();
  for (const auto& mv : out.moves) {
    int gi = cores[mv.agent].group;
    if (gi >= 0 && gi < G) gs_[gi].movers.push_back(mv.agent);
  }

  return out;
}

} // namespace

std::unique_ptr<ExplorationPlugin> make_dfs_plugin() {
  return std::make_unique<DfsPlugin>();
}

std::unique_ptr<Algorithm> make_bhs9() {
  return std::make_unique<GroupSearch>(GroupSearch::Variant::Nine, PluginFactory{});
}

std::unique_ptr<Algorithm> make_bhs6() {
  return std::make_unique<GroupSearch>(GroupSearch::Variant::Six, PluginFactory{});
}

std::unique_ptr<Algorithm> make_bhsf(PluginFactory factory) {
  return std::make_unique<GroupSearch>(GroupSearch::Variant::Flex, std::move(factory));
}

std::unique_ptr<Algorithm> make_algorithm(const std::string& name) {
  if (name == "explore3") return make_explore3();
  if (name == "explore2") return make_explore2();
  if (name == "bhs1-9") return make_bhs9();
  if (name == "bhs1-6") return make_bhs6();
  if (name == "bhsf") return make_bhsf();
  throw ConfigError("unknown algorithm: " + name);
}

long long fbhs_round_bound(const Footprint& fp, int f) {
  int delta = 0;
  for (Node v = 0; v < fp.n; ++v) delta = std::max(delta, fp.degree(v));
  long double b = 3.0L;
  for (int i = 0; i < fp.n; ++i) b *= delta;
  for (int i = 0; i < 2 * f + fp.n; ++i) b *= delta + 1;
  for (int i = 0; i < 2 * f; ++i) b *= std::max(1, fp.n - 1);
  const long double cap = 4.0e15L;
  return b > cap ? static_cast<long long>(cap) : static_cast<long long>(b);
}

DetectionReport detection_report(const Outcome& outcome) {
  if (outcome.kind != Outcome::Kind::Detected)
    throw std::runtime_error("run ended without locating the black hole");
  return DetectionReport{outcome.detected_node, outcome.detected_port, outcome.survivor};
}

namespace {

Outcome run_grouped(std::unique_ptr<Algorithm> algo, const Footprint& fp,
                    std::unique_ptr<Adversary> adv, const std::vector<AgentId>& roster,
                    Node root, RunConfig cfg, TraceSink* sink, long long default_rounds) {
  if (cfg.max_rounds <= 0) cfg.max_rounds = default_rounds;
  NullSink null;
  return run_simulation(fp, std::move(algo), std::move(adv), roster, root, cfg,
                        sink ? *sink : null);
}

} // namespace

Outcome run_1bhs_9(const Footprint& fp, std::unique_ptr<Adversary> adv,
                   const std::vector<AgentId>& roster, Node root, RunConfig cfg,
                   TraceSink* sink) {
  long long m = fp.m();
  return run_grouped(make_bhs9(), fp, std::move(adv), roster, root, cfg, sink,
                     1024 * m * m);
}

Outcome run_1bhs_6(const Footprint& fp, std::unique_ptr<Adversary> adv,
                   const std::vector<AgentId>& roster, Node root, RunConfig cfg,
                   TraceSink* sink) {
  long long m = fp.m();
  return run_grouped(make_bhs6(), fp, std::move(adv), roster, root, cfg, sink,
                     1024 * m * m);
}

Outcome run_fbhs(const Footprint& fp, std::unique_ptr<Adversary> adv, int f,
                 const std::vector<AgentId>& roster, Node root, RunConfig cfg,
                 TraceSink* sink) {
  if (f < 1) throw ConfigError("fault budget must be at least 1");
  cfg.f = f;
  return run_grouped(make_bhsf(), fp, std::move(adv), roster, root, cfg, sink,
                     fbhs_round_bound(fp, f));
}

} // namespace bhs
