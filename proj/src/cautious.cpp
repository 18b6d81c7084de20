#include "bhs/cautious.hpp"

namespace bhs {

uint64_t CautiousGroup::fingerprint() const {
  uint64_t h = 14695981039346656037ULL;
  auto mix = [&h](uint64_t x) {
    h ^= x + 0x9e3779b97f4a7c15ULL;
    h *= 1099511628211ULL;
  };
  mix((uint64_t)group);
  mix((uint64_t)(leader + 1));
  mix((uint64_t)(helper1 + 1));
  mix((uint64_t)(helper2 + 1));
  mix((uint64_t)phase);
  mix((uint64_t)(port + 1));
  mix(attempted ? 1 : 2);
  return h;
}

void cautious_begin(CautiousGroup& g, Port port) {
  g.phase = GroupPhase::Probing;
  g.port = port;
  g.attempted = false;
}

namespace {

bool with_leader(const LocalView& leader_view, const std::vector<AgentCore>& cores, int member) {
  if (member < 0) return false;
  AgentId id = cores[member].id;
  for (const auto& o : leader_view.others)
    if (o.id == id) return true;
  return false;
}

} // namespace

CautiousResult cautious_step(CautiousGroup& g, const std::vector<AgentCore>& cores,
                             const std::vector<LocalView>& views) {
  CautiousResult res;
  const LocalView& lv = views[g.leader];
  switch (g.phase) {
    case GroupPhase::Probing: {
      if (with_leader(lv, cores, g.helper1)) {
        res.moves.push_back({g.helper1, g.port});
      } else if (g.helper1 >= 0) {
        // the first helper left last round: verify stage begins
        g.phase = GroupPhase::Verify;
        if (g.helper2 >= 0 && with_leader(lv, cores, g.helper2))
          res.moves.push_back({g.helper2, g.port});
        if (views[g.helper1].alive) res.moves.push_back({g.helper1, views[g.helper1].pin});
      }
      // no first helper: nobody can probe, the group holds its ground
      break;
    }
    case GroupPhase::Verify: {
      bool h1_back = with_leader(lv, cores, g.helper1);
      bool h2_gone = g.helper2 >= 0 && !with_leader(lv, cores, g.helper2);
      if (h1_back) {
        g.phase = GroupPhase::LeaderCross;
        g.attempted = true;
        res.verdict = CautiousResult::Verdict::Safe;
        res.moves.push_back({g.leader, g.port});
        res.moves.push_back({g.helper1, g.port});
      } else if (h2_gone) {
        // the edge was provably present, yet the first helper stayed away
        g.phase = GroupPhase::BhDetected;
        res.verdict = CautiousResult::Verdict::BlackHole;
      } else {
        if (g.helper2 >= 0) res.moves.push_back({g.helper2, g.port});
        if (g.helper1 >= 0 && views[g.helper1].alive)
          res.moves.push_back({g.helper1, views[g.helper1].pin});
      }
      break;
    }
    case GroupPhase::LeaderCross: {
      if (g.attempted && lv.last_attempt) {
        g.phase = GroupPhase::Idle;
        g.attempted = false;
        res.reunited = true;
        break;
      }
      g.attempted = true;
      res.moves.push_back({g.leader, g.port});
      for (int m : {g.helper1, g.helper2})
        if (m >= 0 && views[m].alive && with_leader(lv, cores, m))
          res.moves.push_back({m, g.port});
      break;
    }
    default:
      break;
  }
  return res;
}

} // namespace bhs
