#pragma once

// Deterministic round-synchronous execution of robot programs on a
// PortGraph with Face-to-Face messaging.
//
// Each round runs in fixed order: (1) co-located robots exchange messages
// and every robot computes, (2) all movements apply simultaneously.
// Messages and the states they are computed from always reflect the
// positions at the start of the round, so no robot observes another's
// same-round move except through its announced action. Two robots
// crossing one edge in opposite directions are never co-located.

#include <concepts>
#include <cstdint>
#include <functional>
#include <ostream>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "gathersim/port_graph.hpp"

namespace gathersim {

inline constexpr std::string_view kToolVersion = "gathersim 0.1.0";

enum class Mode : uint8_t { finder, helper, waiter, leader, follower, frozen, terminated };

inline std::string_view mode_name(Mode m) {
  switch (m) {
    case Mode::finder: return "finder";
    case Mode::helper: return "helper";
    case Mode::waiter: return "waiter";
    case Mode::leader: return "leader";
    case Mode::follower: return "follower";
    case Mode::frozen: return "frozen";
    case Mode::terminated: return "terminated";
  }
  return "?";
}

struct Action {
  enum class Kind : uint8_t { stay, move, terminate };

  Kind kind = Kind::stay;
  int port = -1;

  static Action stay() { return {}; }
  static Action move(int port) { return {Kind::move, port}; }
  static Action terminate() { return {Kind::terminate, -1}; }

  bool is_move() const { return kind == Kind::move; }
  bool operator==(const Action&) const = default;
};

// Everything a robot may say to co-located robots in one round. The
// model allows unbounded structured payloads; this struct is the union
// of what the programs in this artifact need.
struct Message {
  int label = 0;
  Mode mode = Mode::waiter;
  long group_id = -1;
  Action announced = Action::stay();  // own action this round, for follow semantics
  int escort_port = -1;               // order to same-group token helpers, -1 none
  bool reports_n = false;             // informational annotation
};

struct RobotSpec {
  int label = 0;  // unique, in [1, n^b]
  int home = 0;   // initial node
};

struct SimConfig {
  int b = 2;                    // ID-range exponent, labels in [1, n^b]
  long max_rounds = 0;          // 0: 4x the program's declared round bound
  bool delta_aware = false;     // cycle lengths use Delta instead of n-1
  bool record_messages = false; // tally message traffic in RunStats
};

struct PreView {
  long round = 0;
  int node_degree = 0;
  int arrival_port = -1;  // port entered through on last move, -1 at start or after a stay
};

// colocated holds the messages of every robot at this node (self
// included) when two or more robots share it, and is empty when the
// robot is alone.
struct LocalView {
  long round = 0;
  int node_degree = 0;
  int arrival_port = -1;
  std::span<const Message> colocated;
};

struct StepResult {
  Action action = Action::stay();
  bool phase_boundary = false;
};

namespace event {
inline constexpr uint8_t kMeet = 1;
inline constexpr uint8_t kMerge = 2;
inline constexpr uint8_t kStateChange = 4;
inline constexpr uint8_t kTerminate = 8;
inline constexpr uint8_t kPhaseBoundary = 16;
}  // namespace event

struct TraceRecord {
  long round = 0;
  int label = 0;
  int node = 0;  // end-of-round position
  Mode mode = Mode::waiter;
  long group_id = -1;
  Action action = Action::stay();
  uint8_t events = 0;
};

struct Trace {
  std::vector<int> labels;  // ascending
  std::vector<TraceRecord> records;  // ordered by (round, label)
};

class SimError : public std::runtime_error {
 public:
  enum class Kind { RoundLimitExceeded, IllegalMove, Config, BudgetExceeded };

  SimError(Kind kind, const std::string& msg) : std::runtime_error(msg), kind(kind) {}

  Kind kind;
};

template <class P>
concept RobotProgram = requires(const P& p, const RobotSpec& spec, typename P::State& st,
                                const typename P::State& cst, const PreView& pre,
                                const LocalView& view) {
  { p.make_initial_state(spec) } -> std::same_as<typename P::State>;
  { p.emit(cst, pre) } -> std::same_as<Message>;
  { p.act(st, view) } -> std::same_as<StepResult>;
  { p.round_bound() } -> std::convertible_to<long>;
  { cst.mode } -> std::convertible_to<Mode>;
  { cst.group_id } -> std::convertible_to<long>;
};

struct RunStats {
  long last_round = -1;   // index of the last executed round
  bool all_terminated = false;
  bool stopped_early = false;  // a stop predicate ended the run
  std::vector<long> termination_round;  // per robot, -1 if still active
  std::vector<long> move_count;
  std::vector<int> final_node;
  long first_colocation_round = -1;  // end-of-round, -1 if never
  long gathered_round = -1;  // first round from which all robots stay co-located
  long message_count = 0;    // filled when record_messages is set
  long message_bits = 0;     // serialized payload estimate, no cap applies
};

struct NullTraceSink {
  void operator()(const TraceRecord&) {}
};

struct RecordingSink {
  Trace* trace;
  void operator()(const TraceRecord& r) { trace->records.push_back(r); }
};

struct NeverStop {
  bool operator()(long, std::span<const int>) const { return false; }
};

namespace detail {

inline void check_robots(const PortGraph& g, std::span<const RobotSpec> robots, int b) {
  if (robots.empty()) throw SimError(SimError::Kind::Config, "no robots");
  double limit = 1;
  for (int i = 0; i < b; ++i) limit *= g.node_count();
  for (const RobotSpec& r : robots) {
    if (r.home < 0 || r.home >= g.node_count())
      throw SimError(SimError::Kind::Config, "robot home out of range");
    if (r.label < 1 || static_cast<double>(r.label) > limit)
      throw SimError(SimError::Kind::Config,
                     "label " + std::to_string(r.label) + " outside [1, n^b]");
  }
  for (size_t i = 0; i < robots.size(); ++i)
    for (size_t j = i + 1; j < robots.size(); ++j)
      if (robots[i].label == robots[j].label)
        throw SimError(SimError::Kind::Config, "robot labels must be pairwise distinct");
}

}  // namespace detail

// Core loop. Robots are processed in ascending label order everywhere, so
// identical inputs yield identical traces. The sink sees one record per
// active robot per round; the stop predicate sees end-of-round positions
// and may end the run early (stats.stopped_early).
template <class Prog, class Sink = NullTraceSink, class Stop = NeverStop>
  requires RobotProgram<Prog>
RunStats run_rounds(const PortGraph& g, std::span<const RobotSpec> robots, const Prog& prog,
                    const SimConfig& cfg, Sink&& sink = Sink{}, Stop&& stop = Stop{},
                    std::vector<typename Prog::State>* final_states = nullptr) {
  detail::check_robots(g, robots, cfg.b);
  const int k = static_cast<int>(robots.size());

  // Index robots by ascending label.
  std::vector<int> by_label(k);
  for (int i = 0; i < k; ++i) by_label[i] = i;
  std::sort(by_label.begin(), by_label.end(),
            [&](int a, int b2) { return robots[a].label < robots[b2].label; });

  std::vector<typename Prog::State> state;
  state.reserve(k);
  for (const RobotSpec& r : robots) state.push_back(prog.make_initial_state(r));

  std::vector<int> pos(k), prev_pos(k), arrival(k, -1);
  for (int i = 0; i < k; ++i) pos[i] = robots[i].home;

  RunStats stats;
  stats.termination_round.assign(k, -1);
  stats.move_count.assign(k, 0);
  const long max_rounds = cfg.max_rounds > 0 ? cfg.max_rounds : 4 * prog.round_bound();

  std::vector<int> msg_offset(k), msg_len(k);
  std::vector<Message> node_msgs;
  node_msgs.reserve(k);
  std::vector<int> order(k);
  std::vector<Action> acts(k);
  std::vector<uint8_t> evs(k);
  int active = k;
  long last_scatter = -1;
  std::vector<int> prev_start(k, -1);  // positions at the start of the previous round

  for (long round = 0; round < max_rounds && active > 0; ++round) {
    prev_pos = pos;  // positions at the start of this round

    // Group active robots by node; runs keep label order.
    order.clear();
    for (int i : by_label)
      if (state[i].mode != Mode::terminated) order.push_back(i);
    std::stable_sort(order.begin(), order.end(), [&](int a, int b2) { return pos[a] < pos[b2]; });

    // Communicate: messages exist only where two or more robots share a node.
    node_msgs.clear();
    for (size_t s = 0; s < order.size();) {
      size_t e = s + 1;
      while (e < order.size() && pos[order[e]] == pos[order[s]]) ++e;
      if (e - s >= 2) {
        const int off = static_cast<int>(node_msgs.size());
        for (size_t j = s; j < e; ++j) {
          const int i = order[j];
          node_msgs.push_back(prog.emit(
              state[i], PreView{round, g.degree(pos[i]), arrival[i]}));
        }
        for (size_t j = s; j < e; ++j) {
          msg_offset[order[j]] = off;
          msg_len[order[j]] = static_cast<int>(e - s);
        }
        if (cfg.record_messages) {
          stats.message_count += static_cast<long>(e - s);
          stats.message_bits += static_cast<long>(e - s) * static_cast<long>(sizeof(Message)) * 8;
        }
      } else {
        msg_offset[order[s]] = 0;
        msg_len[order[s]] = 0;
      }
      s = e;
    }

    // Compute: every robot decides from round-start state and messages.
    for (int i : order) {
      LocalView view{round, g.degree(pos[i]), arrival[i],
                     std::span<const Message>(node_msgs.data() + msg_offset[i],
                                              static_cast<size_t>(msg_len[i]))};
      const Mode old_mode = state[i].mode;
      const long old_gid = state[i].group_id;
      const StepResult res = prog.act(state[i], view);
      acts[i] = res.action;
      uint8_t e = 0;
      if (state[i].mode != old_mode) e |= event::kStateChange;
      if (state[i].group_id != old_gid) e |= event::kMerge;
      if (res.phase_boundary) e |= event::kPhaseBoundary;
      if (res.action.kind == Action::Kind::terminate) e |= event::kTerminate;
      if (msg_len[i] >= 2) {
        for (int j = msg_offset[i]; j < msg_offset[i] + msg_len[i]; ++j) {
          const int other = node_msgs[j].label;
          if (other == robots[i].label) continue;
          // Newly co-located with someone this round?
          bool was_together = false;
          for (int t = 0; t < k; ++t)
            if (robots[t].label == other) {
              was_together = round > 0 && prev_start[t] == prev_start[i];
              break;
            }
          if (!was_together) { e |= event::kMeet; break; }
        }
      }
      evs[i] = e;
    }

    // Move: apply all movements simultaneously.
    for (int i : order) {
      const Action a = acts[i];
      if (a.kind == Action::Kind::move) {
        if (a.port < 0 || a.port >= g.degree(pos[i]))
          throw SimError(SimError::Kind::IllegalMove,
                         "robot " + std::to_string(robots[i].label) + " requested port " +
                             std::to_string(a.port) + " at a degree-" +
                             std::to_string(g.degree(pos[i])) + " node (round " +
                             std::to_string(round) + ")");
        const PortTarget t = g.step(pos[i], a.port);
        pos[i] = t.node;
        arrival[i] = t.rev_port;
        ++stats.move_count[i];
      } else {
        arrival[i] = -1;
      }
    }

    for (int i : order) {
      sink(TraceRecord{round, robots[i].label, pos[i], state[i].mode, state[i].group_id,
                       acts[i], evs[i]});
      if (acts[i].kind == Action::Kind::terminate) {
        state[i].mode = Mode::terminated;
        stats.termination_round[i] = round;
        --active;
      }
    }

    stats.last_round = round;
    prev_start = prev_pos;

    // End-of-round configuration bookkeeping over all k robots.
    bool any_shared = false;
    bool all_same = true;
    for (int i = 1; i < k; ++i) {
      if (pos[i] != pos[0]) all_same = false;
    }
    for (int i = 0; i < k && !any_shared; ++i)
      for (int j = i + 1; j < k; ++j)
        if (pos[i] == pos[j]) { any_shared = true; break; }
    if (any_shared && stats.first_colocation_round < 0) stats.first_colocation_round = round;
    if (!all_same) last_scatter = round;

    if (active == 0) break;
    if (stop(round, std::span<const int>(pos))) {
      stats.stopped_early = true;
      break;
    }
  }

  stats.all_terminated = active == 0;
  stats.final_node = pos;
  bool all_same_final = true;
  for (int i = 1; i < k; ++i)
    if (pos[i] != pos[0]) all_same_final = false;
  if (all_same_final) stats.gathered_round = last_scatter + 1;
  if (final_states) *final_states = std::move(state);
  return stats;
}

// The spec-level entry point: runs to joint termination and returns the
// complete trace. Throws RoundLimitExceeded if some robot is still active
// at the round cap and IllegalMove on a program bug.
template <class Prog>
  requires RobotProgram<Prog>
Trace run_simulation(const PortGraph& g, std::span<const RobotSpec> robots, const Prog& prog,
                     const SimConfig& cfg = {}) {
  Trace trace;
  for (const RobotSpec& r : robots) trace.labels.push_back(r.label);
  std::sort(trace.labels.begin(), trace.labels.end());
  RecordingSink sink{&trace};
  const RunStats stats = run_rounds(g, robots, prog, cfg, sink, NeverStop{});
  if (!stats.all_terminated)
    throw SimError(SimError::Kind::RoundLimitExceeded,
                   "robots still active after " + std::to_string(stats.last_round + 1) +
                       " rounds (liveness failure)");
  return trace;
}

// Same run, trace and stats together (tests inspect both).
template <class Prog>
  requires RobotProgram<Prog>
std::pair<Trace, RunStats> run_with_stats(const PortGraph& g, std::span<const RobotSpec> robots,
                                          const Prog& prog, const SimConfig& cfg = {}) {
  Trace trace;
  for (const RobotSpec& r : robots) trace.labels.push_back(r.label);
  std::sort(trace.labels.begin(), trace.labels.end());
  RecordingSink sink{&trace};
  RunStats stats = run_rounds(g, robots, prog, cfg, sink, NeverStop{});
  return {std::move(trace), std::move(stats)};
}

// ---------------------------------------------------------------------------
// Trace utilities.

// Positions of all robots at the end of the given round; terminated robots
// rest at their final node.
inline std::vector<std::pair<int, int>> positions_at(const Trace& trace, long round) {
  std::vector<std::pair<int, int>> out;  // (label, node)
  for (int label : trace.labels) out.emplace_back(label, -1);
  for (const TraceRecord& r : trace.records) {
    if (r.round > round) break;
    for (auto& [l, node] : out)
      if (l == r.label) { node = r.node; break; }
  }
  return out;
}

// The exact multiset of robot groups per node at the end of the round.
inline std::vector<std::vector<int>> colocated_groups(const Trace& trace, long round) {
  const auto positions = positions_at(trace, round);
  std::vector<std::vector<int>> groups;
  std::vector<int> seen_nodes;
  for (const auto& [label, node] : positions) {
    bool placed = false;
    for (size_t i = 0; i < seen_nodes.size(); ++i)
      if (seen_nodes[i] == node) {
        groups[i].push_back(label);
        placed = true;
        break;
      }
    if (!placed) {
      seen_nodes.push_back(node);
      groups.push_back({label});
    }
  }
  for (auto& g : groups) std::sort(g.begin(), g.end());
  return groups;
}

inline long last_round(const Trace& trace) {
  return trace.records.empty() ? -1 : trace.records.back().round;
}

// ---------------------------------------------------------------------------
// Trace export: one structured text record per round per robot, stable
// field order, byte-exact across reruns of the same inputs.

inline void format_record(std::ostream& out, const TraceRecord& r) {
  out << "round=" << r.round << " label=" << r.label << " node=" << r.node
      << " mode=" << mode_name(r.mode) << " group=" << r.group_id << " action=";
  switch (r.action.kind) {
    case Action::Kind::stay: out << "stay"; break;
    case Action::Kind::move: out << "move:" << r.action.port; break;
    case Action::Kind::terminate: out << "terminate"; break;
  }
  out << " events=";
  if (r.events == 0) {
    out << '-';
  } else {
    bool first = true;
    auto put = [&](uint8_t bit, std::string_view name) {
      if (r.events & bit) {
        if (!first) out << ',';
        out << name;
        first = false;
      }
    };
    put(event::kMeet, "MEET");
    put(event::kMerge, "MERGE");
    put(event::kStateChange, "STATE_CHANGE");
    put(event::kTerminate, "TERMINATE");
    put(event::kPhaseBoundary, "PHASE_BOUNDARY");
  }
  out << '\n';
}

inline void write_trace(std::ostream& out, const Trace& trace, std::string_view manifest = {}) {
  out << "# " << kToolVersion << '\n';
  out << "# manifest=" << (manifest.empty() ? "-" : manifest) << '\n';
  for (const TraceRecord& r : trace.records) format_record(out, r);
}

inline std::string trace_to_text(const Trace& trace, std::string_view manifest = {}) {
  std::ostringstream out;
  write_trace(out, trace, manifest);
  return out.str();
}

}  // namespace gathersim
