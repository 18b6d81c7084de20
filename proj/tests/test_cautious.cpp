#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <memory>

#include "bhs/adversary.hpp"
#include "bhs/cautious.hpp"
#include "bhs/generate.hpp"

using namespace bhs;

namespace {

// Drives exactly one cautious crossing through a fixed port, then idles.
struct CrossDriver : Algorithm {
  Port target = 0;
  bool needs_bh = false;
  CautiousGroup g;
  std::shared_ptr<std::vector<GroupPhase>> log = std::make_shared<std::vector<GroupPhase>>();

  std::string name() const override { return "cross-driver"; }
  int whiteboard_capacity() const override { return 1; }
  bool requires_black_hole() const override { return needs_bh; }
  bool halts_on_coverage() const override { return false; }

  void reset(const Footprint&, std::vector<AgentCore>& cores, Node) override {
    if (cores.size() != 3) throw ConfigError("cross-driver needs 3 agents");
    g = CautiousGroup{};
    g.group = 0;
    g.leader = 0;
    g.helper1 = 1;
    g.helper2 = 2;
    cores[0].role = Role::Leader;
    cores[1].role = Role::Helper1;
    cores[2].role = Role::Helper2;
    for (auto& c : cores) c.group = 0;
  }

  Decision step(const Footprint&, std::vector<AgentCore>& cores,
                const std::vector<LocalView>& views, long long round) override {
    if (round == 0) cautious_begin(g, target);
    auto res = cautious_step(g, cores, views);
    Decision d;
    d.moves = res.moves;
    if (res.verdict == CautiousResult::Verdict::BlackHole)
      d.detection = DetectClaim{g.leader, g.port};
    log->push_back(g.phase);
    return d;
  }

  uint64_t aux_fingerprint() const override { return g.fingerprint(); }
  std::unique_ptr<Algorithm> clone() const override { return std::make_unique<CrossDriver>(*this); }
};

struct Run {
  Outcome outcome;
  MemorySink sink;
  std::shared_ptr<std::vector<GroupPhase>> log;
};

Run drive(const Footprint& fp, bool needs_bh, std::unique_ptr<Adversary> adv,
          long long max_rounds) {
  auto algo = std::make_unique<CrossDriver>();
  algo->needs_bh = needs_bh;
  Run r;
  r.log = algo->log;
  RunConfig cfg;
  cfg.f = 1;
  cfg.max_rounds = max_rounds;
  cfg.detect_recurrence = false; // the driver idles on purpose after crossing
  r.outcome = run_simulation(fp, std::move(algo), std::move(adv), {1, 2, 3}, 0, cfg, r.sink);
  return r;
}

int count_kind(const MemorySink& s, TraceEvent::Kind k) {
  int n = 0;
  for (const auto& e : s.events)
    if (e.kind == k) ++n;
  return n;
}

bool has_move(const MemorySink& s, TraceEvent::Kind k, AgentId agent, long long round) {
  for (const auto& e : s.events)
    if (e.kind == k && e.agent == agent && e.round == round) return true;
  return false;
}

} // namespace

TEST_CASE("safe crossing with the edge always present") {
  auto r = drive(make_path(2), false, make_empty_adversary(), 8);
  CHECK(r.outcome.kind == Outcome::Kind::Timeout);
  CHECK(r.outcome.deaths.empty());

  // helper1 across, back, across again with the leader; helper2 across once
  CHECK(has_move(r.sink, TraceEvent::Kind::MoveOk, 2, 0));
  CHECK(has_move(r.sink, TraceEvent::Kind::MoveOk, 2, 1));
  CHECK(has_move(r.sink, TraceEvent::Kind::MoveOk, 3, 1));
  CHECK(has_move(r.sink, TraceEvent::Kind::MoveOk, 1, 2));
  CHECK(has_move(r.sink, TraceEvent::Kind::MoveOk, 2, 2));
  CHECK(count_kind(r.sink, TraceEvent::Kind::MoveOk) == 5);
  CHECK(count_kind(r.sink, TraceEvent::Kind::MoveFail) == 0);

  REQUIRE(r.log->size() >= 4);
  CHECK((*r.log)[0] == GroupPhase::Probing);
  CHECK((*r.log)[1] == GroupPhase::Verify);
  CHECK((*r.log)[2] == GroupPhase::LeaderCross);
  CHECK((*r.log)[3] == GroupPhase::Idle);
}

TEST_CASE("the far node swallows both helpers and the leader reports it") {
  auto fp = make_footprint(2, {{0, 1, 0, 0}}, 1);
  auto r = drive(fp, true, make_empty_adversary(), 10);
  REQUIRE(r.outcome.kind == Outcome::Kind::Detected);
  CHECK(r.outcome.rounds == 3);
  CHECK(r.outcome.detected_node == 0);
  CHECK(r.outcome.detected_port == 0);
  CHECK(r.outcome.survivor == 1);
  CHECK(r.outcome.deaths == std::vector<AgentId>{2, 3});

  for (const auto& e : r.sink.events)
    if (e.kind == TraceEvent::Kind::Death) CHECK(e.role != (int)Role::Leader);

  REQUIRE(r.log->size() == 3);
  CHECK((*r.log)[0] == GroupPhase::Probing);
  CHECK((*r.log)[1] == GroupPhase::Verify);
  CHECK((*r.log)[2] == GroupPhase::BhDetected);
}

TEST_CASE("a withheld edge delays the verdict but never changes it") {
  std::string script;
  for (int t = 1; t <= 3; ++t) script += "{\"round\":" + std::to_string(t) + ",\"removed\":[[0,1]]}\n";
  auto r = drive(make_clique(3), false, make_replay_adversary(script), 10);
  CHECK(r.outcome.kind == Outcome::Kind::Timeout);
  CHECK(r.outcome.deaths.empty());

  CHECK(has_move(r.sink, TraceEvent::Kind::MoveOk, 2, 0));
  for (long long t = 1; t <= 3; ++t) {
    CHECK(has_move(r.sink, TraceEvent::Kind::MoveFail, 2, t)); // blocked return
    CHECK(has_move(r.sink, TraceEvent::Kind::MoveFail, 3, t)); // blocked follow
  }
  CHECK(has_move(r.sink, TraceEvent::Kind::MoveOk, 2, 4));
  CHECK(has_move(r.sink, TraceEvent::Kind::MoveOk, 3, 4));
  CHECK(has_move(r.sink, TraceEvent::Kind::MoveOk, 1, 5));
  CHECK(has_move(r.sink, TraceEvent::Kind::MoveOk, 2, 5));
  CHECK(count_kind(r.sink, TraceEvent::Kind::MoveFail) == 6);

  REQUIRE(r.log->size() >= 7);
  CHECK((*r.log)[1] == GroupPhase::Verify);
  CHECK((*r.log)[4] == GroupPhase::Verify);
  CHECK((*r.log)[5] == GroupPhase::LeaderCross);
  CHECK((*r.log)[6] == GroupPhase::Idle);
}

TEST_CASE("a withheld edge also delays a black-hole verdict") {
  auto fp = make_footprint(3, {{0, 1, 0, 0}, {0, 2, 1, 0}, {1, 2, 1, 1}}, 1);
  std::string script;
  for (int t : {0, 1, 3, 4}) script += "{\"round\":" + std::to_string(t) + ",\"removed\":[[0,1]]}\n";
  auto r = drive(fp, true, make_replay_adversary(script), 12);
  REQUIRE(r.outcome.kind == Outcome::Kind::Detected);
  CHECK(r.outcome.rounds == 7);
  CHECK(r.outcome.detected_node == 0);
  CHECK(r.outcome.detected_port == 0);
  CHECK(r.outcome.deaths == std::vector<AgentId>{2, 3});

  CHECK(has_move(r.sink, TraceEvent::Kind::MoveFail, 2, 0));
  CHECK(has_move(r.sink, TraceEvent::Kind::MoveFail, 2, 1));
  CHECK(has_move(r.sink, TraceEvent::Kind::MoveOk, 2, 2));
  CHECK(has_move(r.sink, TraceEvent::Kind::MoveFail, 3, 3));
  CHECK(has_move(r.sink, TraceEvent::Kind::MoveFail, 3, 4));
  CHECK(has_move(r.sink, TraceEvent::Kind::MoveOk, 3, 5));

  auto& log = *r.log;
  REQUIRE(log.size() == 7);
  CHECK(log[2] == GroupPhase::Probing);
  CHECK(log[3] == GroupPhase::Verify);
  CHECK(log[6] == GroupPhase::BhDetected);
}

TEST_CASE("random interference cannot hurt the group or fake a verdict") {
  for (uint64_t seed = 1; seed <= 10; ++seed) {
    auto fp = make_clique(3);
    auto algo = std::make_unique<CrossDriver>();
    auto log = algo->log;
    RunConfig cfg;
    cfg.f = 1;
    cfg.seed = seed;
    cfg.max_rounds = 200;
    cfg.stuck_window = 1000; // the driver idles on purpose after reunion
    cfg.detect_recurrence = false;
    MemorySink sink;
    auto out = run_simulation(fp, std::move(algo), make_random_adversary(), {1, 2, 3}, 0, cfg, sink);
    CAPTURE(seed);
    CHECK(out.kind == Outcome::Kind::Timeout);
    CHECK(out.deaths.empty());
    CHECK(log->back() == GroupPhase::Idle); // reunited despite the interference
  }
}

TEST_CASE("an adopted crossing ignores the leader's stale attempt flag") {
  std::vector<AgentCore> cores(2);
  cores[0].id = 4;
  cores[1].id = 9;
  Whiteboard wb;
  std::vector<LocalView> views(2);
  views[0].alive = true;
  views[0].degree = 2;
  views[0].last_attempt = true; // stale success from long ago
  views[0].board = &wb;
  views[0].others.push_back({9, false, AgentState::Explore, 0, Role::Helper1, 0});
  views[1].alive = true;
  views[1].degree = 2;
  views[1].last_attempt = false;
  views[1].board = &wb;
  views[1].others.push_back({4, true, AgentState::Explore, 0, Role::Leader, 0});

  CautiousGroup g;
  g.group = 0;
  g.leader = 0;
  g.helper1 = 1;
  g.helper2 = -1;
  g.phase = GroupPhase::LeaderCross;
  g.port = 1;
  auto res = cautious_step(g, cores, views);
  CHECK(!res.reunited);
  REQUIRE(res.moves.size() == 2); // leader and the at-hand helper both cross
  CHECK(g.attempted);

  // next round, attempt registered as successful: now it counts
  auto res2 = cautious_step(g, cores, views);
  CHECK(res2.reunited);
  CHECK(g.phase == GroupPhase::Idle);
}

TEST_CASE("a group without its first helper cannot probe") {
  std::vector<AgentCore> cores(1);
  cores[0].id = 4;
  Whiteboard wb;
  std::vector<LocalView> views(1);
  views[0].alive = true;
  views[0].degree = 2;
  views[0].board = &wb;
  CautiousGroup g;
  g.leader = 0;
  g.helper1 = -1;
  g.helper2 = -1;
  cautious_begin(g, 0);
  auto res = cautious_step(g, cores, views);
  CHECK(res.moves.empty());
  CHECK(g.phase == GroupPhase::Probing);
  CHECK(res.verdict == CautiousResult::Verdict::None);
}

TEST_CASE("phase changes show up in the fingerprint") {
  CautiousGroup a;
  a.group = 0;
  a.leader = 0;
  a.helper1 = 1;
  a.helper2 = 2;
  auto base = a.fingerprint();
  auto b = a;
  b.phase = GroupPhase::Probing;
  CHECK(b.fingerprint() != base);
  auto c = a;
  c.port = 3;
  CHECK(c.fingerprint() != base);
  auto d = a;
  d.attempted = true;
  CHECK(d.fingerprint() != base);
}
