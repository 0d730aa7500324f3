#pragma once

// Independent brute-force verifiers. Oracles never consult algorithm
// internals: they recompute everything from graphs, placements, and
// traces alone.

#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "gathersim/enumerate.hpp"
#include "gathersim/gathering.hpp"
#include "gathersim/port_graph.hpp"
#include "gathersim/sim.hpp"

namespace gathersim {

class OracleError : public std::runtime_error {
 public:
  enum class Kind { FewerThanTwoRobots, ScopeTooLarge, BadParameter };

  OracleError(Kind kind, const std::string& msg) : std::runtime_error(msg), kind(kind) {}

  Kind kind;
};

// Minimum over all robot pairs of the hop distance between their nodes.
inline int min_pairwise_distance(const PortGraph& g, std::span<const int> placement) {
  if (placement.size() < 2)
    throw OracleError(OracleError::Kind::FewerThanTwoRobots,
                      "pairwise distance needs at least two robots");
  int best = g.node_count();
  for (size_t i = 0; i < placement.size(); ++i) {
    const std::vector<int> dist = bfs_distances(g, placement[i]);
    for (size_t j = i + 1; j < placement.size(); ++j) best = std::min(best, dist[placement[j]]);
  }
  return best;
}

struct LemmaReport {
  std::string scope;
  int bound = 0;
  long instances_checked = 0;
  bool pass = false;
  struct Counterexample {
    PortGraph graph;
    std::vector<int> placement;
    int observed = 0;
  };
  std::optional<Counterexample> counterexample;
};

// Closed-form count the report must match: sum over structures of
// C(n, floor(n/c)+1) placements, over all n in [2, n_max] with at least
// two robots to place.
inline long expected_hop_instances(int n_max, int c) {
  long total = 0;
  for (int n = 2; n <= n_max; ++n) {
    const int k = n / c + 1;
    if (k < 2 || k > n) continue;
    long choose = 1;
    for (int i = 0; i < k; ++i) choose = choose * (n - i) / (i + 1);
    total += choose * static_cast<long>(enumerate_connected(n, EnumMode::structures).size());
  }
  return total;
}

// For every connected structure with at most n_max nodes and every
// placement of floor(n/c)+1 robots on distinct nodes, checks that some
// robot pair is at most `bound` apart (default 2c-2, the lemma's claim;
// pass 2c-3 to witness tightness). Distances ignore port labels, so
// structures are enumerated up to isomorphism only.
inline LemmaReport check_hop_lemma(int n_max, int c, int bound = -1) {
  if (n_max > 8)
    throw OracleError(OracleError::Kind::ScopeTooLarge, "hop lemma sweep is capped at n <= 8");
  if (c < 2)
    throw OracleError(OracleError::Kind::BadParameter, "the lemma needs c >= 2");
  LemmaReport report;
  report.bound = bound < 0 ? 2 * c - 2 : bound;
  report.pass = true;
  {
    std::ostringstream s;
    s << "structures n in [2," << n_max << "], c=" << c << ", " << "k=floor(n/c)+1";
    report.scope = s.str();
  }
  for (int n = 2; n <= n_max; ++n) {
    const int k = n / c + 1;
    if (k < 2 || k > n) continue;
    for (const PortGraph& g : enumerate_connected(n, EnumMode::structures)) {
      std::vector<std::vector<int>> dist(n);
      for (int v = 0; v < n; ++v) dist[v] = bfs_distances(g, v);
      for (uint32_t mask = 0; mask < (1u << n); ++mask) {
        if (std::popcount(mask) != k) continue;
        std::vector<int> placement;
        for (int v = 0; v < n; ++v)
          if (mask & (1u << v)) placement.push_back(v);
        int min_dist = n;
        for (size_t i = 0; i < placement.size(); ++i)
          for (size_t j = i + 1; j < placement.size(); ++j)
            min_dist = std::min(min_dist, dist[placement[i]][placement[j]]);
        ++report.instances_checked;
        if (min_dist > report.bound) {
          report.pass = false;
          report.counterexample = LemmaReport::Counterexample{g, placement, min_dist};
          return report;
        }
      }
    }
  }
  return report;
}

// Structured text summary; counterexamples carry the graph in the file
// format plus a placement line.
inline std::string render(const LemmaReport& report) {
  std::ostringstream out;
  out << "hop-distance lemma: " << report.scope << " bound=" << report.bound << '\n';
  out << "instances=" << report.instances_checked << " verdict="
      << (report.pass ? "PASS" : "FAIL") << '\n';
  if (report.counterexample) {
    out << "counterexample: observed min distance " << report.counterexample->observed << '\n';
    write_graph(out, report.counterexample->graph);
    out << "placement:";
    for (int v : report.counterexample->placement) out << ' ' << v;
    out << '\n';
  }
  return out.str();
}

namespace detail {

// Replays a trace round by round: positions of all robots (terminated
// robots rest at their final node) handed to the visitor after each
// round, together with whether any TERMINATE event fired in it.
template <class Fn>
void replay_rounds(const Trace& trace, Fn&& fn) {
  if (trace.records.empty()) return;
  std::vector<int> labels = trace.labels;
  std::vector<int> node(labels.size(), -1);
  auto index_of = [&labels](int label) {
    for (size_t i = 0; i < labels.size(); ++i)
      if (labels[i] == label) return i;
    return labels.size();
  };
  size_t at = 0;
  const long last = trace.records.back().round;
  for (long round = 0; round <= last; ++round) {
    bool terminate_event = false;
    while (at < trace.records.size() && trace.records[at].round == round) {
      const TraceRecord& r = trace.records[at];
      node[index_of(r.label)] = r.node;
      terminate_event |= (r.events & event::kTerminate) != 0;
      ++at;
    }
    fn(round, std::span<const int>(node), terminate_event);
  }
}

inline bool all_equal(std::span<const int> xs) {
  for (int x : xs)
    if (x != xs.front()) return false;
  return true;
}

inline bool all_distinct(std::span<const int> xs) {
  for (size_t i = 0; i < xs.size(); ++i)
    for (size_t j = i + 1; j < xs.size(); ++j)
      if (xs[i] == xs[j]) return false;
  return true;
}

}  // namespace detail

// True iff at every round in which some robot terminates, all robots of
// the trace occupy a single node. (Robots that terminated earlier count
// at their final position; first-round termination of a co-located run is
// sound by the same rule.)
inline bool check_detection_soundness(const Trace& trace) {
  bool sound = true;
  detail::replay_rounds(trace, [&](long, std::span<const int> nodes, bool terminated) {
    if (terminated && !detail::all_equal(nodes)) sound = false;
  });
  return sound;
}

// True iff at every step boundary the configuration is one single group
// or all singletons. The configuration AT a boundary round is what its
// communicate step sees: positions at the end of the previous round.
// clock_offset shifts the boundaries for runs started at a later step.
inline bool check_step_dichotomy(const Trace& trace, const Schedule& sched,
                                 long clock_offset = 0) {
  bool ok = true;
  detail::replay_rounds(trace, [&](long round, std::span<const int> nodes, bool) {
    for (int i = 1; i <= 6; ++i)
      if (round + 1 + clock_offset == sched.s[i] &&
          !(detail::all_equal(nodes) || detail::all_distinct(nodes)))
        ok = false;
  });
  return ok;
}

}  // namespace gathersim
