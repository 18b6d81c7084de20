#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <map>
#include <set>

#include "bhs/adversary.hpp"
#include "bhs/explore.hpp"
#include "bhs/generate.hpp"
#include "bhs/oracle.hpp"

using namespace bhs;

namespace {

struct ViewRig {
  Whiteboard wb;
  LocalView view;
  ViewRig(int degree, Port pin, bool last_attempt) {
    view.alive = true;
    view.degree = degree;
    view.pin = pin;
    view.last_attempt = last_attempt;
    view.board = &wb;
  }
};

AgentCore core_at(AgentId id, AgentState st, Port pout, Port pin, int label, int r, bool success) {
  AgentCore c;
  c.id = id;
  c.state = st;
  c.pout = pout;
  c.pin = pin;
  c.label = label;
  c.r = r;
  c.success = success;
  return c;
}

struct RunResult {
  Outcome outcome;
  MemorySink sink;
};

RunResult run_explore(const Footprint& fp, int agents, std::unique_ptr<Adversary> adv, Node root,
                      long long max_rounds, uint64_t seed = 0) {
  RunResult rr;
  RunConfig cfg;
  cfg.f = 1;
  cfg.seed = seed;
  cfg.max_rounds = max_rounds;
  std::vector<AgentId> roster;
  for (int i = 0; i < agents; ++i) roster.push_back(i + 1);
  auto algo = agents == 3 ? make_explore3() : make_explore2();
  rr.outcome = run_simulation(fp, std::move(algo), std::move(adv), roster, root, cfg, rr.sink);
  return rr;
}

// (node, port) sequence of an agent's successful moves
std::vector<std::pair<Node, Port>> ok_moves(const MemorySink& sink, AgentId id) {
  std::vector<std::pair<Node, Port>> out;
  for (const auto& e : sink.events)
    if (e.kind == TraceEvent::Kind::MoveOk && e.agent == id) out.push_back({e.node, e.port});
  return out;
}

void check_prefix_of_reference(const Footprint& fp, Node root, const MemorySink& sink,
                               AgentId min_id) {
  auto walked = ok_moves(sink, min_id);
  auto ref = static_dfs_path(fp, root);
  REQUIRE(walked.size() <= ref.size());
  for (size_t i = 0; i < walked.size(); ++i) {
    CAPTURE(i);
    CHECK(walked[i].first == ref[i].from);
    CHECK(walked[i].second == ref[i].port);
  }
}

// Agents stuck for at least `threshold` consecutive movement rounds, counted
// per round; a single missing edge must not pin more than `limit` of them at
// once.
void check_blocked_limit(const MemorySink& sink, int limit, int threshold = 4) {
  std::map<AgentId, std::set<long long>> fails;
  long long last = 0;
  for (const auto& e : sink.events) {
    if (e.kind == TraceEvent::Kind::MoveFail) fails[e.agent].insert(e.round);
    last = std::max(last, e.round);
  }
  std::map<long long, int> pinned; // round -> count of long-run agents covering it
  for (const auto& [id, rounds] : fails) {
    (void)id;
    long long run_start = -1;
    long long prev = -10;
    auto flush = [&](long long run_end) {
      if (run_start >= 0 && (run_end - run_start) / 2 + 1 >= threshold)
        for (long long t = run_start; t <= run_end; ++t) pinned[t] += 1;
    };
    for (long long t : rounds) {
      if (t != prev + 2) {
        flush(prev);
        run_start = t;
      }
      prev = t;
    }
    flush(prev);
  }
  for (const auto& [t, count] : pinned) {
    CAPTURE(t);
    CHECK(count <= limit);
  }
}

int max_label(const MemorySink& sink) {
  int top = 0;
  for (const auto& e : sink.events)
    if (e.kind == TraceEvent::Kind::Write) top = std::max(top, e.label);
  return top;
}

} // namespace

TEST_CASE("arrival at a fresh node records the entry port and rotates") {
  ViewRig rig(3, 1, true);
  auto a = core_at(5, AgentState::Explore, -1, 1, 1, 0, true);
  auto d = dfs_arrival(a, 0, rig.view);
  REQUIRE(d.writes.size() == 1);
  CHECK(d.writes[0].key == 0);
  CHECK(d.writes[0].parent == 1);
  CHECK(d.writes[0].label == 1);
  CHECK(a.pout == 2);
  CHECK(a.state == AgentState::Explore);
  CHECK(!d.move.has_value());
}

TEST_CASE("arrival at a fresh dead end turns straight back") {
  ViewRig rig(1, 0, true);
  auto a = core_at(5, AgentState::Explore, -1, 0, 2, 0, true);
  auto d = dfs_arrival(a, 1, rig.view);
  REQUIRE(d.writes.size() == 1);
  CHECK(d.writes[0].parent == 0);
  CHECK(a.pout == 0);
  CHECK(a.state == AgentState::Backtrack);
}

TEST_CASE("arrival at a node already seen under this label bounces") {
  ViewRig rig(4, 2, true);
  rig.wb.entries.push_back({0, 3, 7});
  auto a = core_at(5, AgentState::Explore, -1, 2, 7, 0, true);
  auto d = dfs_arrival(a, 0, rig.view);
  CHECK(d.writes.empty());
  CHECK(a.state == AgentState::Backtrack);
  CHECK(a.pout == 2);
}

TEST_CASE("a stale record from an earlier traversal counts as fresh") {
  ViewRig rig(2, 0, true);
  rig.wb.entries.push_back({0, 1, 3});
  auto a = core_at(5, AgentState::Explore, -1, 0, 4, 0, true);
  auto d = dfs_arrival(a, 0, rig.view);
  REQUIRE(d.writes.size() == 1);
  CHECK(d.writes[0].parent == 0);
  CHECK(d.writes[0].label == 4);
  CHECK(a.state == AgentState::Explore);
  CHECK(a.pout == 1);
}

TEST_CASE("backtracking into the root either resumes or starts a new sweep") {
  ViewRig rig(2, 1, true);
  rig.wb.entries.push_back({0, -1, 2});
  auto a = core_at(5, AgentState::Backtrack, -1, 1, 2, 0, true);
  auto d = dfs_arrival(a, 0, rig.view);
  // pin 1 wraps to port 0: the whole sweep is done, start the next one
  REQUIRE(d.writes.size() == 1);
  CHECK(d.writes[0].parent == -1);
  CHECK(d.writes[0].label == 3);
  CHECK(a.label == 3);
  CHECK(a.state == AgentState::Explore);
  CHECK(a.pout == 0);

  ViewRig rig2(3, 0, true);
  rig2.wb.entries.push_back({0, -1, 2});
  auto b = core_at(5, AgentState::Backtrack, -1, 0, 2, 0, true);
  auto d2 = dfs_arrival(b, 0, rig2.view);
  CHECK(d2.writes.empty());
  CHECK(b.label == 2);
  CHECK(b.state == AgentState::Explore);
  CHECK(b.pout == 1);
}

TEST_CASE("backtracking through a non-root node keeps or drops the state by parent port") {
  ViewRig rig(3, 1, true);
  rig.wb.entries.push_back({0, 2, 5});
  auto a = core_at(5, AgentState::Backtrack, -1, 1, 5, 0, true);
  dfs_arrival(a, 0, rig.view);
  CHECK(a.pout == 2);
  CHECK(a.state == AgentState::Backtrack); // rotated onto the parent port

  ViewRig rig2(3, 2, true);
  rig2.wb.entries.push_back({0, 1, 5});
  auto b = core_at(5, AgentState::Backtrack, -1, 2, 5, 0, true);
  dfs_arrival(b, 0, rig2.view);
  CHECK(b.pout == 0);
  CHECK(b.state == AgentState::Explore);
}

TEST_CASE("stalled pair with different targets both push on") {
  ViewRig rig(2, 0, false);
  auto a = core_at(9, AgentState::Explore, 1, 0, 1, 0, false);
  ReadableParams other{3, false, AgentState::Explore, 0, Role::Solo, -1};
  auto d = test_against(a, 0, other, rig.view);
  REQUIRE(d.move.has_value());
  CHECK(*d.move == 1);
  CHECK(a.pout == 1);
}

TEST_CASE("stalled pair on the same port: the junior retries, the senior skips") {
  ViewRig rig(2, 0, false);
  rig.wb.entries.push_back({0, -1, 1});
  auto junior = core_at(3, AgentState::Explore, 0, 0, 1, 0, false);
  ReadableParams senior_params{9, false, AgentState::Explore, 0, Role::Solo, -1};
  auto d1 = test_against(junior, 0, senior_params, rig.view);
  CHECK(*d1.move == 0);
  CHECK(junior.pout == 0);

  ViewRig rig2(2, 0, false);
  rig2.wb.entries.push_back({1, -1, 1});
  auto senior = core_at(9, AgentState::Explore, 0, 0, 1, 0, false);
  ReadableParams junior_params{3, false, AgentState::Explore, 0, Role::Solo, -1};
  auto d2 = test_against(senior, 1, junior_params, rig2.view);
  CHECK(*d2.move == 1);
  CHECK(senior.pout == 1);
  CHECK(senior.label == 1); // at the root but no wrap, so no new sweep
  CHECK(d2.writes.empty());
}

TEST_CASE("skipping past the last root port begins a new sweep") {
  ViewRig rig(2, 1, false);
  rig.wb.entries.push_back({0, -1, 4});
  auto a = core_at(9, AgentState::Explore, 1, 1, 4, 0, false);
  ReadableParams other{3, false, AgentState::Explore, 1, Role::Solo, -1};
  auto d = test_against(a, 0, other, rig.view);
  CHECK(*d.move == 0);
  CHECK(a.label == 5);
  REQUIRE(d.writes.size() == 1);
  CHECK(d.writes[0].parent == -1);
  CHECK(d.writes[0].label == 5);
}

TEST_CASE("skipping onto the parent port flips to backtrack") {
  ViewRig rig(3, 0, false);
  rig.wb.entries.push_back({0, 1, 2});
  auto a = core_at(9, AgentState::Explore, 0, 0, 2, 0, false);
  ReadableParams other{3, false, AgentState::Explore, 0, Role::Solo, -1};
  auto d = test_against(a, 0, other, rig.view);
  CHECK(*d.move == 1);
  CHECK(a.state == AgentState::Backtrack);
}

TEST_CASE("a blocked backtracker restarts from its node through the lowest other port") {
  ViewRig rig(3, 0, false);
  rig.wb.entries.push_back({0, 0, 2});
  auto a = core_at(9, AgentState::Backtrack, 0, 0, 2, 0, false);
  ReadableParams other{3, false, AgentState::Backtrack, 0, Role::Solo, -1};
  auto d = test_against(a, 0, other, rig.view);
  CHECK(a.label == 3);
  CHECK(a.state == AgentState::Explore);
  REQUIRE(d.writes.size() == 1);
  CHECK(d.writes[0].parent == -1);
  CHECK(d.writes[0].label == 3);
  CHECK(*d.move == 1);

  // blocked on port 2: the lowest other port is 0
  ViewRig rig2(3, 0, false);
  rig2.wb.entries.push_back({0, 0, 2});
  auto b = core_at(9, AgentState::Backtrack, 2, 0, 2, 0, false);
  ReadableParams other2{3, false, AgentState::Backtrack, 2, Role::Solo, -1};
  auto d2 = test_against(b, 0, other2, rig2.view);
  CHECK(*d2.move == 0);
}

TEST_CASE("assessment round only records the verdict") {
  ViewRig rig(2, 0, false);
  auto a = core_at(5, AgentState::Explore, 1, 0, 1, 1, true);
  auto d = movement3(a, 0, rig.view, 7);
  CHECK(!d.move.has_value());
  CHECK(d.writes.empty());
  CHECK(a.r == 0);
  CHECK(a.success == false);
}

TEST_CASE("stalled and alone keeps trying the same port") {
  ViewRig rig(2, 0, false);
  auto a = core_at(5, AgentState::Explore, 1, 0, 1, 0, false);
  auto d = movement3(a, 0, rig.view, 8);
  REQUIRE(d.move.has_value());
  CHECK(*d.move == 1);
  CHECK(a.pout == 1);
  CHECK(a.r == 1);
}

TEST_CASE("stalled next to a mover keeps trying the same port") {
  ViewRig rig(2, 0, false);
  rig.view.others.push_back({7, true, AgentState::Explore, 0, Role::Solo, -1});
  auto a = core_at(5, AgentState::Explore, 1, 0, 1, 0, false);
  auto d = movement3(a, 0, rig.view, 8);
  CHECK(*d.move == 1);
  CHECK(a.pout == 1);
}

TEST_CASE("three stalled at one node: only the most senior deviates") {
  // the senior measures against the junior and skips
  ViewRig rig(3, 0, false);
  rig.wb.entries.push_back({2, -1, 1});
  rig.view.others.push_back({3, false, AgentState::Explore, 1, Role::Solo, -1});
  rig.view.others.push_back({5, false, AgentState::Explore, 1, Role::Solo, -1});
  auto senior = core_at(9, AgentState::Explore, 1, 0, 1, 0, false);
  auto d = movement3(senior, 2, rig.view, 10);
  CHECK(*d.move == 2);

  // the middle measures against the senior and retries
  ViewRig rig2(3, 0, false);
  rig2.view.others.push_back({3, false, AgentState::Explore, 1, Role::Solo, -1});
  rig2.view.others.push_back({9, false, AgentState::Explore, 1, Role::Solo, -1});
  auto middle = core_at(5, AgentState::Explore, 1, 0, 1, 0, false);
  auto d2 = movement3(middle, 1, rig2.view, 10);
  CHECK(*d2.move == 1);

  // the junior measures against the senior and retries
  ViewRig rig3(3, 0, false);
  rig3.view.others.push_back({5, false, AgentState::Explore, 1, Role::Solo, -1});
  rig3.view.others.push_back({9, false, AgentState::Explore, 1, Role::Solo, -1});
  auto junior = core_at(3, AgentState::Explore, 1, 0, 1, 0, false);
  auto d3 = movement3(junior, 0, rig3.view, 10);
  CHECK(*d3.move == 1);
}

TEST_CASE("two-agent rules: the junior waits, the senior deviates at once") {
  ViewRig rig(2, 0, false);
  auto junior = core_at(3, AgentState::Explore, 1, 0, 1, 0, false);
  auto d = movement2(junior, 0, rig.view, 6, true);
  CHECK(*d.move == 1); // unchanged

  ViewRig rig2(2, 0, false);
  rig2.wb.entries.push_back({1, 0, 1});
  auto senior = core_at(9, AgentState::Explore, 1, 0, 1, 0, false);
  auto d2 = movement2(senior, 1, rig2.view, 6, false);
  CHECK(*d2.move == 0);
  CHECK(senior.state == AgentState::Backtrack); // skipped onto its parent port
}

TEST_CASE("three agents sweep the triangle unhindered") {
  auto fp = make_clique(3);
  auto rr = run_explore(fp, 3, make_empty_adversary(), 0, 24);
  CHECK(rr.outcome.kind == Outcome::Kind::Explored);
  CHECK(rr.outcome.rounds <= 24);
  auto cov = coverage(rr.sink.events, {1, 2, 3}, 0);
  CHECK(exploration_complete(cov, fp));
  check_prefix_of_reference(fp, 0, rr.sink, 1);
}

TEST_CASE("a bridge cannot be withheld: the two-node path is explored immediately") {
  auto fp = make_path(2);
  auto rr3 = run_explore(fp, 3, make_block_min_id_adversary(), 0, 16);
  CHECK(rr3.outcome.kind == Outcome::Kind::Explored);
  CHECK(rr3.outcome.rounds <= 4);
  auto rr2 = run_explore(fp, 2, make_block_min_id_adversary(), 0, 16);
  CHECK(rr2.outcome.kind == Outcome::Kind::Explored);
  CHECK(rr2.outcome.rounds <= 4);
}

TEST_CASE("three agents cover every probe graph against the min-id blocker") {
  std::vector<Footprint> fps = {make_clique(3), make_ring(4),  make_path(4),
                                make_clique(4), make_ring(5),  make_clique(5),
                                make_path(5),   make_ring(6)};
  for (uint64_t seed = 1; seed <= 6; ++seed) {
    FamilySpec spec;
    spec.kind = "random-connected";
    spec.n = 5;
    spec.seed = seed;
    fps.push_back(generate(spec));
  }
  for (const auto& fp : fps) {
    CAPTURE(fp.serialize());
    long long bound = 256LL * fp.m() * fp.m();
    auto rr = run_explore(fp, 3, make_block_min_id_adversary(), 0, bound);
    CHECK(rr.outcome.kind == Outcome::Kind::Explored);
    CHECK(rr.outcome.rounds <= bound);
    auto cov = coverage(rr.sink.events, {1, 2, 3}, 0);
    CHECK(exploration_complete(cov, fp));
    check_prefix_of_reference(fp, 0, rr.sink, 1);
    check_blocked_limit(rr.sink, 2);
    CHECK(max_label(rr.sink) <= 256 * fp.m() * fp.m());
  }
}

TEST_CASE("two agents cover every probe graph against the min-id blocker") {
  std::vector<Footprint> fps = {make_clique(3), make_ring(4), make_path(4), make_clique(4),
                                make_ring(5), make_clique(5)};
  for (uint64_t seed = 11; seed <= 16; ++seed) {
    FamilySpec spec;
    spec.kind = "random-connected";
    spec.n = 5;
    spec.seed = seed;
    fps.push_back(generate(spec));
  }
  for (const auto& fp : fps) {
    CAPTURE(fp.serialize());
    long long bound = 128LL * fp.m() * fp.m();
    auto rr = run_explore(fp, 2, make_block_min_id_adversary(), 0, bound);
    CHECK(rr.outcome.kind == Outcome::Kind::Explored);
    CHECK(rr.outcome.rounds <= bound);
    auto cov = coverage(rr.sink.events, {1, 2}, 0);
    CHECK(exploration_complete(cov, fp));
    check_prefix_of_reference(fp, 0, rr.sink, 1);
    check_blocked_limit(rr.sink, 1);
    CHECK(max_label(rr.sink) <= 128 * fp.m() * fp.m());
  }
}

TEST_CASE("random adversaries never break the reference-prefix property") {
  for (uint64_t seed = 1; seed <= 25; ++seed) {
    FamilySpec spec;
    spec.kind = "random-connected";
    spec.n = 4 + (int)(seed % 3);
    spec.seed = seed * 31;
    auto fp = generate(spec);
    CAPTURE(fp.serialize());
    long long bound = 256LL * fp.m() * fp.m();
    auto rr = run_explore(fp, 3, make_random_adversary(), 0, bound, seed);
    CHECK(rr.outcome.kind == Outcome::Kind::Explored);
    check_prefix_of_reference(fp, 0, rr.sink, 1);
    check_blocked_limit(rr.sink, 2);

    auto rr2 = run_explore(fp, 2, make_random_adversary(), 0, 128LL * fp.m() * fp.m(), seed);
    CHECK(rr2.outcome.kind == Outcome::Kind::Explored);
    check_prefix_of_reference(fp, 0, rr2.sink, 1);
    check_blocked_limit(rr2.sink, 1);
  }
}

TEST_CASE("roster size is enforced") {
  auto fp = make_clique(3);
  RunConfig cfg;
  cfg.max_rounds = 10;
  NullSink sink;
  CHECK_THROWS_AS(
      run_simulation(fp, make_explore3(), make_empty_adversary(), {1, 2}, 0, cfg, sink),
      ConfigError);
  CHECK_THROWS_AS(
      run_simulation(fp, make_explore2(), make_empty_adversary(), {1, 2, 3}, 0, cfg, sink),
      ConfigError);
}
