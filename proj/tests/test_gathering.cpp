#include <catch2/catch_amalgamated.hpp>

#include <map>
#include <set>

#include "gathersim/gathering.hpp"

using namespace gathersim;

namespace {

PartialMap map_of(const PortGraph& g) {
  PartialMap m;
  for (int v = 0; v < g.node_count(); ++v) m.add_node(g.degree(v), {});
  for (int v = 0; v < g.node_count(); ++v)
    for (int p = 0; p < g.degree(v); ++p) {
      const PortTarget t = g.step(v, p);
      m.nodes[v].ports[p] = {t.node, t.rev_port};
    }
  return m;
}

// Group ids never increase once set (the -1 of a waiter is a sentinel,
// not a group id).
void check_monotone_gid(const Trace& trace) {
  std::map<int, long> last;
  for (const TraceRecord& r : trace.records) {
    if (r.group_id < 0) continue;
    auto it = last.find(r.label);
    if (it != last.end()) REQUIRE(r.group_id <= it->second);
    last[r.label] = r.group_id;
  }
}

}  // namespace

TEST_CASE("cycle lengths") {
  CHECK(cycle_length(1, 4) == 6);
  CHECK(cycle_length(2, 3) == 12);
  CHECK(cycle_length(0, 2) == 0);
  CHECK(cycle_length(0, 37) == 0);
  CHECK(cycle_length(2, 5, true, 2) == 2 * 2 + 2 * 4);  // Delta-aware
}

TEST_CASE("schedule arithmetic matches an independent recomputation") {
  auto sched = compute_schedule(2, 2, 5);
  CHECK(sched.r1 == 160);
  CHECK(sched.r == 164);
  CHECK(sched.bmax == 3);
  CHECK(sched.t[1] == 2);
  CHECK(sched.d[1] == 6);
  CHECK(sched.s[2] == 334);

  // Recompute a larger schedule with standalone arithmetic.
  const int n = 7, b = 2;
  auto s7 = compute_schedule(n, b, 100);
  long r1 = 20;
  for (int i = 0; i < 2; ++i) r1 *= n;
  r1 *= n;
  const long r = r1 + 2 * n;
  long bmax = 1;
  while ((1L << bmax) < 49) ++bmax;  // ceil(log2 n^b)
  ++bmax;
  CHECK(s7.r1 == r1);
  CHECK(s7.r == r);
  CHECK(s7.bmax == bmax);
  long expect_s = r;
  for (int i = 2; i <= 6; ++i) {
    long t = 0, pw = 1;
    for (int j = 1; j <= i - 1; ++j) {
      pw *= n - 1;
      t += 2 * pw;
    }
    expect_s += bmax * t + r;
    CHECK(s7.s[i] == expect_s);
  }

  // Pure function of shared knowledge.
  CHECK(compute_schedule(7, 2, 100).s == s7.s);
}

TEST_CASE("initial role assignment") {
  std::vector<RobotSpec> robots = {{5, 0}, {9, 0}, {7, 2}, {3, 4}, {4, 4}, {8, 4}};
  auto roles = assign_initial_states(robots);
  CHECK(roles[0].mode == Mode::finder);
  CHECK(roles[0].group_id == 5);
  CHECK(roles[1].mode == Mode::helper);
  CHECK(roles[1].group_id == 5);
  CHECK(roles[2].mode == Mode::waiter);
  CHECK(roles[2].group_id == -1);
  CHECK(roles[3].mode == Mode::finder);
  CHECK(roles[3].group_id == 3);
  CHECK(roles[4].mode == Mode::helper);
  CHECK(roles[4].group_id == 3);
  CHECK(roles[5].mode == Mode::helper);
  CHECK(roles[5].group_id == 3);
}

TEST_CASE("spanning tree tours") {
  CHECK(spanning_tree_tour(map_of(generate_family(GraphFamily::path, 2))).size() == 2);
  CHECK(spanning_tree_tour(map_of(generate_family(GraphFamily::star, 4))).size() == 6);
  CHECK(spanning_tree_tour(map_of(generate_family(GraphFamily::cycle, 5))).size() == 8);
  PartialMap incomplete;
  incomplete.add_node(1, {});
  CHECK_THROWS_AS(spanning_tree_tour(incomplete), MapError);
}

TEST_CASE("undispersed gathering from a single shared node") {
  auto g = generate_family(GraphFamily::cycle, 4);
  std::vector<RobotSpec> robots = {{1, 2}, {2, 2}, {3, 2}};
  UndispersedGathering prog(4);
  auto [trace, stats] = run_with_stats(g, robots, prog);
  const long r = map_round_budget(4) + 2 * 4;
  REQUIRE(stats.all_terminated);
  for (long t : stats.termination_round) CHECK(t == r);
  CHECK(stats.final_node == std::vector<int>{2, 2, 2});
  check_monotone_gid(trace);
}

TEST_CASE("undispersed gathering from a dispersed start never moves") {
  auto g = generate_family(GraphFamily::path, 5);
  std::vector<RobotSpec> robots = {{1, 0}, {2, 2}, {3, 4}};
  UndispersedGathering prog(5);
  auto [trace, stats] = run_with_stats(g, robots, prog);
  REQUIRE(stats.all_terminated);
  for (long m : stats.move_count) CHECK(m == 0);
  CHECK(stats.final_node == std::vector<int>{0, 2, 4});
}

TEST_CASE("two finder groups and waiters funnel to the minimum group id") {
  auto g = generate_family(GraphFamily::cycle, 6);
  // Group {3,4} at node 0 (gid 3), group {5,6} at node 2 (gid 5), waiters elsewhere.
  std::vector<RobotSpec> robots = {{3, 0}, {4, 0}, {5, 2}, {6, 2}, {7, 4}};
  UndispersedGathering prog(6);
  auto [trace, stats] = run_with_stats(g, robots, prog);
  REQUIRE(stats.all_terminated);
  CHECK(stats.final_node == std::vector<int>(5, 0));  // gid-3 finder started at node 0
  check_monotone_gid(trace);
  // Everyone ends in group 3.
  std::map<int, long> final_gid;
  for (const TraceRecord& r : trace.records) final_gid[r.label] = r.group_id;
  for (const auto& [label, gid] : final_gid) CHECK(gid == 3);
}

TEST_CASE("sequence gathering: adjacent robots with labels 2 and 3") {
  auto g = generate_family(GraphFamily::path, 2);
  auto seq = provide_sequence(2, SequenceProvider::brute_force);
  const long t = seq.length();
  std::vector<RobotSpec> robots = {{2, 0}, {3, 1}};
  UxsGathering prog(2, 2, seq);
  auto [trace, stats] = run_with_stats(g, robots, prog);
  REQUIRE(stats.all_terminated);
  // First cycle bits differ (2 = 10, 3 = 11 read least-significant first),
  // so they merge within the first 2T rounds.
  CHECK(stats.first_colocation_round < 2 * t);
  // Leader 3 has two bits: full schedule ends after (2+1) cycles.
  for (long tr : stats.termination_round) CHECK(tr == (2 + 1) * 2 * t);
  CHECK(stats.final_node[0] == stats.final_node[1]);
  CHECK(stats.last_round <= 2 * t * (ceil_log2(3) + 1) + 2 * t);
}

TEST_CASE("sequence gathering: a single robot terminates alone") {
  auto g = generate_family(GraphFamily::cycle, 3);
  auto seq = provide_sequence(3, SequenceProvider::brute_force);
  std::vector<RobotSpec> robots = {{1, 1}};
  UxsGathering prog(3, 2, seq);
  auto [trace, stats] = run_with_stats(g, robots, prog);
  REQUIRE(stats.all_terminated);
  CHECK(stats.termination_round[0] == (1 + 1) * 2 * seq.length());
}

TEST_CASE("sequence gathering: co-located pair plus a distant singleton") {
  auto g = generate_family(GraphFamily::path, 4);
  auto seq = provide_sequence(4, SequenceProvider::brute_force);
  std::vector<RobotSpec> robots = {{4, 0}, {6, 0}, {5, 3}};
  UxsGathering prog(4, 2, seq);
  auto [trace, stats] = run_with_stats(g, robots, prog);
  REQUIRE(stats.all_terminated);
  // All terminated simultaneously and co-located.
  CHECK(stats.termination_round[0] == stats.termination_round[1]);
  CHECK(stats.termination_round[1] == stats.termination_round[2]);
  CHECK(stats.final_node[0] == stats.final_node[1]);
  CHECK(stats.final_node[1] == stats.final_node[2]);
}

TEST_CASE("one-hop meeting freezes an adjacent pair in the first cycle") {
  auto g = generate_family(GraphFamily::path, 2);
  std::vector<RobotSpec> robots = {{2, 0}, {3, 1}};
  HopMeeting prog(1, 2, 2);
  auto [trace, stats] = run_with_stats(g, robots, prog);
  REQUIRE(stats.all_terminated);
  CHECK(stats.first_colocation_round < cycle_length(1, 2));
  CHECK(stats.final_node[0] == stats.final_node[1]);
  // Frozen robots appear in the trace.
  bool saw_frozen = false;
  for (const TraceRecord& r : trace.records) saw_frozen |= r.mode == Mode::frozen;
  CHECK(saw_frozen);
}

TEST_CASE("one-hop meeting at distance two is vacuous") {
  auto g = generate_family(GraphFamily::path, 3);
  std::vector<RobotSpec> robots = {{1, 0}, {2, 2}};
  HopMeeting prog(1, 3, 2);
  auto [trace, stats] = run_with_stats(g, robots, prog);
  REQUIRE(stats.all_terminated);
  CHECK(stats.first_colocation_round == -1);
  CHECK(stats.final_node == std::vector<int>{0, 2});
}

TEST_CASE("two-hop meeting reaches an undispersed configuration") {
  auto g = generate_family(GraphFamily::cycle, 6);
  std::vector<RobotSpec> robots = {{5, 0}, {6, 2}};  // distance 2
  HopMeeting prog(2, 6, 2);
  auto [trace, stats] = run_with_stats(g, robots, prog);
  REQUIRE(stats.all_terminated);
  const long window = max_bit_cycles(6, 2) * cycle_length(2, 6);
  REQUIRE(stats.first_colocation_round >= 0);
  CHECK(stats.first_colocation_round <= window);
  CHECK(stats.final_node[0] == stats.final_node[1]);
}

TEST_CASE("faster gathering: undispersed start terminates at R") {
  auto g = generate_family(GraphFamily::cycle, 4);
  auto seq = provide_sequence(4, SequenceProvider::brute_force);
  std::vector<RobotSpec> robots = {{1, 0}, {2, 0}};
  FasterGathering prog(4, 2, seq);
  auto [trace, stats] = run_with_stats(g, robots, prog);
  REQUIRE(stats.all_terminated);
  for (long t : stats.termination_round) CHECK(t == prog.sched.r);
  CHECK(stats.final_node[0] == stats.final_node[1]);
}

TEST_CASE("faster gathering: adjacent pair terminates exactly at S2") {
  auto g = generate_family(GraphFamily::path, 4);
  auto seq = provide_sequence(4, SequenceProvider::brute_force);
  std::vector<RobotSpec> robots = {{1, 1}, {2, 2}};
  FasterGathering prog(4, 2, seq);
  auto [trace, stats] = run_with_stats(g, robots, prog);
  REQUIRE(stats.all_terminated);
  for (long t : stats.termination_round) CHECK(t == prog.sched.s[2]);
  CHECK(stats.final_node[0] == stats.final_node[1]);
  check_monotone_gid(trace);
}

TEST_CASE("faster gathering: distance six on a path falls through to the sequence stage") {
  auto g = generate_family(GraphFamily::path, 8);
  auto seq = provide_sequence(8, SequenceProvider::heuristic, 1);
  // The heuristic sequence must be re-verified against this corpus.
  for (int start = 0; start < 8; ++start) REQUIRE(walk_explores(g, start, seq.symbols));
  std::vector<RobotSpec> robots = {{1, 0}, {2, 6}};
  FasterGathering prog(8, 2, seq);
  auto [trace, stats] = run_with_stats(g, robots, prog);
  REQUIRE(stats.all_terminated);
  for (long t : stats.termination_round) CHECK(t > prog.sched.s[6]);
  CHECK(stats.final_node[0] == stats.final_node[1]);
  // Never co-located before the sequence stage.
  CHECK(stats.first_colocation_round > prog.sched.s[6]);
}

TEST_CASE("delta-aware cycles shorten the meeting windows") {
  auto g = generate_family(GraphFamily::cycle, 6);  // max degree 2
  std::vector<RobotSpec> robots = {{2, 0}, {3, 1}};
  HopMeeting prog(1, 6, 2, true, 2);
  CHECK(prog.core.cycle_len == 4);  // 2*Delta instead of 2*(n-1)
  auto [trace, stats] = run_with_stats(g, robots, prog);
  REQUIRE(stats.all_terminated);
  REQUIRE(stats.first_colocation_round >= 0);
  CHECK(stats.first_colocation_round < 4);

  auto seq = provide_sequence(6, SequenceProvider::heuristic, 3);
  for (int start = 0; start < 6; ++start) REQUIRE(walk_explores(g, start, seq.symbols));
  FasterGathering prog2(6, 2, seq, 1, true, 2);
  CHECK(prog2.sched.s[2] < compute_schedule(6, 2, seq.length()).s[2]);
  auto [trace2, stats2] = run_with_stats(g, robots, prog2);
  REQUIRE(stats2.all_terminated);
  for (long t : stats2.termination_round) CHECK(t == prog2.sched.s[2]);
}

TEST_CASE("faster gathering with a start-step offset") {
  auto g = generate_family(GraphFamily::path, 4);
  auto seq = provide_sequence(4, SequenceProvider::brute_force);
  std::vector<RobotSpec> robots = {{1, 1}, {2, 2}};
  FasterGathering prog(4, 2, seq, 2);  // skip step 1
  auto [trace, stats] = run_with_stats(g, robots, prog);
  REQUIRE(stats.all_terminated);
  for (long t : stats.termination_round) CHECK(t == prog.sched.s[2] - prog.sched.s[1]);
}
