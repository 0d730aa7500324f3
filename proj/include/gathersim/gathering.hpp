#pragma once

// The gathering programs and their shared schedule arithmetic.
//
// Leader selection differs on purpose between the algorithms: the
// sequence-driven gathering follows the LARGEST label of a merged group,
// while the undispersed algorithm's finder is the MINIMUM label of a
// co-located group and captures always decrease group ids.

#include <array>
#include <bit>
#include <vector>

#include "gathersim/exploration.hpp"
#include "gathersim/map_builder.hpp"
#include "gathersim/sim.hpp"

namespace gathersim {

// ---------------------------------------------------------------------------
// Schedule arithmetic.

inline int bit_length(long value) { return 64 - std::countl_zero(static_cast<uint64_t>(value)); }

inline int ceil_log2(uint64_t value) {
  return value <= 1 ? 0 : 64 - std::countl_zero(value - 1);
}

// T(i) = sum_{j=1..i} 2*(n-1)^j rounds, the cycle length of the radius-i
// meeting walk; with the maximum degree known, Delta replaces n-1.
// T(0) = 0 marks an already undispersed configuration.
inline long cycle_length(int i, int n, bool delta_aware = false, int delta = 0) {
  const long base = delta_aware ? delta : n - 1;
  long total = 0;
  long power = 1;
  for (int j = 1; j <= i; ++j) {
    power *= base;
    total += 2 * power;
  }
  return total;
}

// B_max: enough bit cycles for every label in [1, n^b], plus one slack
// cycle.
inline long max_bit_cycles(int n, int b) {
  uint64_t range = 1;
  for (int i = 0; i < b; ++i) range *= static_cast<uint64_t>(n);
  return ceil_log2(range) + 1;
}

struct Schedule {
  int n = 0;
  int b = 0;
  long r1 = 0;               // map budget R1
  long r = 0;                // R = R1 + 2n, one undispersed step
  long bmax = 0;             // bit cycles per meeting procedure
  std::array<long, 6> t{};   // t[i] = T(i), i = 0..5
  std::array<long, 6> d{};   // d[i] = bmax * t[i], procedure duration
  std::array<long, 7> s{};   // s[0] = 0; s[i] = end of step i; s[6] also starts the
                             // sequence stage
  long uxs_T = 0;

  long uxs_stage_bound() const { return 2 * uxs_T * (bmax + 1); }
  long total_bound() const { return s[6] + uxs_stage_bound() + 1; }
};

// Pure function of shared knowledge: every robot computes the identical
// schedule.
inline Schedule compute_schedule(int n, int b, long uxs_T, bool delta_aware = false,
                                 int delta = 0) {
  Schedule sched;
  sched.n = n;
  sched.b = b;
  sched.r1 = map_round_budget(n);
  sched.r = sched.r1 + 2L * n;
  sched.bmax = max_bit_cycles(n, b);
  for (int i = 0; i < 6; ++i) {
    sched.t[i] = cycle_length(i, n, delta_aware, delta);
    sched.d[i] = sched.bmax * sched.t[i];
  }
  sched.s[0] = 0;
  sched.s[1] = sched.r;
  for (int i = 2; i <= 6; ++i) sched.s[i] = sched.s[i - 1] + sched.d[i - 1] + sched.r;
  sched.uxs_T = uxs_T;
  return sched;
}

// ---------------------------------------------------------------------------
// Initial role assignment of the undispersed algorithm: per node, the
// minimum label becomes the finder (group id = own label), the rest its
// helpers, and singletons wait with group id -1.

struct InitialRole {
  Mode mode = Mode::waiter;
  long group_id = -1;
};

inline std::vector<InitialRole> assign_initial_states(std::span<const RobotSpec> robots) {
  std::vector<InitialRole> roles(robots.size());
  for (size_t i = 0; i < robots.size(); ++i) {
    int min_label = robots[i].label;
    int count = 0;
    for (const RobotSpec& other : robots)
      if (other.home == robots[i].home) {
        ++count;
        min_label = std::min(min_label, other.label);
      }
    if (count < 2) {
      roles[i] = {Mode::waiter, -1};
    } else if (min_label == robots[i].label) {
      roles[i] = {Mode::finder, robots[i].label};
    } else {
      roles[i] = {Mode::helper, min_label};
    }
  }
  return roles;
}

// Depth-first Euler tour of the lexicographic smallest-port spanning tree
// of a completed map, rooted at the origin: exactly 2(n-1) moves visiting
// every node and returning.
inline std::vector<int> spanning_tree_tour(const PartialMap& map) {
  if (!map.complete())
    throw MapError(MapError::Kind::IncompleteMap, "spanning tree tour needs a complete map");
  std::vector<int> ports, nodes;
  map.tour_from(0, ports, nodes);
  return ports;
}

// ---------------------------------------------------------------------------
// Undispersed-Gathering, embeddable core. Relative rounds 0..R-1: round 0
// assigns roles, rounds [1, R1) build maps (waiters hold still), rounds
// [R1, R1+2n) are the gathering phase in which each surviving finder
// tours its spanning tree and capture rules funnel everyone to the
// minimum-group finder's start node.

struct UndispersedCore {
  int n;
  long r1;

  explicit UndispersedCore(int node_count) : n(node_count), r1(map_round_budget(node_count)) {}

  struct State {
    Mode mode = Mode::waiter;
    long group_id = -1;
    bool assigned = false;
    TokenMapCore map_core;  // finder only
    bool phase2_ready = false;
    std::vector<int> tour;
    size_t tour_pos = 0;
    int follow_label = -1;  // helper: finder currently replicated
    bool gathered_report = false;
  };

  // A finder robot moves this round unless some co-located robot carries a
  // strictly smaller group id; every robot at the node evaluates this from
  // the same messages, so followers replicate the true move.
  static Action final_action_of(const Message& m, std::span<const Message> all) {
    if (m.mode != Mode::finder) return Action::stay();
    for (const Message& other : all)
      if (other.label != m.label && (other.mode == Mode::finder || other.mode == Mode::helper) &&
          other.group_id < m.group_id)
        return Action::stay();
    return m.announced;
  }

  Message emit(const State& s, const PreView& v, long rel, int label) const {
    Message m{label, s.mode, s.group_id};
    if (!s.assigned || s.mode != Mode::finder) return m;
    if (rel < r1) {
      if (!s.map_core.done()) {
        State scratch = s;
        const TokenMapCore::Out out =
            scratch.map_core.step(rel, v.node_degree, v.arrival_port, false);
        m.announced = out.action;
        if (out.escort) m.escort_port = out.action.port;
      }
      return m;
    }
    // Gathering phase: announce the planned tour move.
    m.reports_n = true;
    if (s.phase2_ready && s.tour_pos < s.tour.size())
      m.announced = Action::move(s.tour[s.tour_pos]);
    return m;
  }

  Action act(State& s, const LocalView& v, long rel, int label) const {
    if (rel == 0) {
      assign_role(s, v, label);
      return Action::stay();
    }
    if (rel < r1) return phase1(s, v, label);
    return phase2(s, v, rel, label);
  }

 private:
  static void assign_role(State& s, const LocalView& v, int label) {
    s.assigned = true;
    if (v.colocated.size() < 2) {
      s.mode = Mode::waiter;
      s.group_id = -1;
      return;
    }
    int min_label = label;
    for (const Message& m : v.colocated) min_label = std::min(min_label, m.label);
    s.mode = min_label == label ? Mode::finder : Mode::helper;
    s.group_id = min_label;
  }

  Action phase1(State& s, const LocalView& v, int) const {
    switch (s.mode) {
      case Mode::finder: {
        if (s.map_core.done()) return Action::stay();
        bool token_present = false;
        for (const Message& m : v.colocated)
          if (m.mode == Mode::helper && m.group_id == s.group_id) token_present = true;
        return s.map_core.step(v.round, v.node_degree, v.arrival_port, token_present).action;
      }
      case Mode::helper:
        for (const Message& m : v.colocated)
          if (m.mode == Mode::finder && m.group_id == s.group_id && m.escort_port >= 0)
            return Action::move(m.escort_port);
        return Action::stay();
      default:
        return Action::stay();
    }
  }

  Action phase2(State& s, const LocalView& v, long rel, int label) const {
    if (rel == r1 && s.mode == Mode::finder) {
      if (!s.map_core.done())
        throw SimError(SimError::Kind::BudgetExceeded,
                       "map incomplete at R1(n); the implementation bound is violated");
      s.tour = spanning_tree_tour(s.map_core.map);
      s.tour_pos = 0;
      s.phase2_ready = true;
    }
    switch (s.mode) {
      case Mode::finder: {
        // Captured by a strictly smaller group id?
        const Message* min_finder = nullptr;
        long min_gid = s.group_id;
        for (const Message& m : v.colocated) {
          if (m.label == label || (m.mode != Mode::finder && m.mode != Mode::helper)) continue;
          if (m.group_id < min_gid) {
            min_gid = m.group_id;
            min_finder = m.mode == Mode::finder ? &m : nullptr;
          } else if (m.group_id == min_gid && m.mode == Mode::finder && min_gid < s.group_id) {
            min_finder = &m;
          }
        }
        if (min_gid < s.group_id) {
          s.mode = Mode::helper;
          s.group_id = min_gid;
          if (min_finder) {
            s.follow_label = min_finder->label;
            return final_action_of(*min_finder, v.colocated);
          }
          s.follow_label = -1;
          return Action::stay();
        }
        if (s.tour_pos < s.tour.size()) return Action::move(s.tour[s.tour_pos++]);
        s.gathered_report = true;  // back at the start node, window runs out
        return Action::stay();
      }
      case Mode::helper: {
        const Message* best = nullptr;
        for (const Message& m : v.colocated)
          if (m.mode == Mode::finder && m.group_id < s.group_id &&
              (!best || m.group_id < best->group_id))
            best = &m;
        if (best) {
          s.group_id = best->group_id;
          s.follow_label = best->label;
          return final_action_of(*best, v.colocated);
        }
        if (s.follow_label >= 0)
          for (const Message& m : v.colocated)
            if (m.label == s.follow_label) return final_action_of(m, v.colocated);
        return Action::stay();
      }
      case Mode::waiter: {
        const Message* best = nullptr;
        for (const Message& m : v.colocated)
          if (m.mode == Mode::finder && (!best || m.group_id < best->group_id)) best = &m;
        if (best) {
          s.mode = Mode::helper;
          s.group_id = best->group_id;
          s.follow_label = best->label;
          return final_action_of(*best, v.colocated);
        }
        return Action::stay();
      }
      default:
        return Action::stay();
    }
  }
};

// Standalone Undispersed-Gathering: terminates on the shared round counter
// at R1 + 2n. From an undispersed start everyone ends gathered at the
// minimum-group finder's start node; from a dispersed start nothing ever
// moves.
struct UndispersedGathering {
  int n;
  UndispersedCore core;

  explicit UndispersedGathering(int node_count) : n(node_count), core(node_count) {}

  struct State {
    Mode mode = Mode::waiter;
    long group_id = -1;
    int label = 0;
    UndispersedCore::State und;
  };

  State make_initial_state(const RobotSpec& r) const {
    State s;
    s.label = r.label;
    return s;
  }

  long round_bound() const { return core.r1 + 2L * n + 1; }

  Message emit(const State& s, const PreView& v) const { return core.emit(s.und, v, v.round, s.label); }

  StepResult act(State& s, const LocalView& v) const {
    if (v.round >= core.r1 + 2L * n) return {Action::terminate()};
    const Action a = core.act(s.und, v, v.round, s.label);
    s.mode = s.und.mode;
    s.group_id = s.und.group_id;
    return {a, v.round == core.r1};
  }
};

// ---------------------------------------------------------------------------
// i-Hop-Meeting, embeddable core. B_max cycles of T(i) rounds; per cycle a
// robot reads one label bit (least significant first): 0 stays home, 1
// walks the depth-limited lexicographic port tree with backtracking. Any
// co-location freezes everyone at that node for the rest of the window.

struct HopCore {
  int radius;
  long cycle_len;  // T(radius)
  long bmax;

  HopCore(int i, int n, int b, bool delta_aware = false, int delta = 0)
      : radius(i), cycle_len(cycle_length(i, n, delta_aware, delta)), bmax(max_bit_cycles(n, b)) {}

  long window_len() const { return bmax * cycle_len; }

  struct Frame {
    int entry = -1;  // port we entered this node through (-1 at home)
    int next = 0;    // next port index to try
  };

  struct State {
    Mode mode = Mode::leader;
    long group_id = -1;
    bool frozen = false;
    bool walking = false;
    bool awaiting_entry = false;  // a descend move is in flight
    std::vector<Frame> stack;
  };

  // Walk plan is a pure function of the stack; commit advances it. Both
  // emit and act call plan, only act commits.
  Action plan(const State& s, const LocalView& v) const {
    if (s.frozen) return Action::stay();
    State scratch = s;
    return step_walk(scratch, v);
  }

  Action act(State& s, const LocalView& v, long rel, int label) const {
    if (s.group_id < 0) s.group_id = label;
    if (s.frozen) return Action::stay();
    if (v.colocated.size() >= 2) {
      s.mode = Mode::frozen;
      s.frozen = true;
      s.walking = false;
      return Action::stay();
    }
    if (rel % cycle_len == 0) {
      // Cycle boundary: read the next bit. Bits past the label's length
      // read as 0, so exhausted robots wait at home.
      const long cycle = rel / cycle_len;
      s.walking = cycle < bmax && ((label >> cycle) & 1L) != 0;
      s.awaiting_entry = false;
      s.stack.clear();
      if (s.walking) s.stack.push_back(Frame{});
    }
    return step_walk(s, v);
  }

 private:
  Action step_walk(State& s, const LocalView& v) const {
    if (!s.walking) return Action::stay();
    if (s.awaiting_entry) {
      s.stack.push_back(Frame{v.arrival_port, 0});
      s.awaiting_entry = false;
    }
    Frame& top = s.stack.back();
    const int depth = static_cast<int>(s.stack.size()) - 1;
    if (depth < radius) {
      int p = top.next;
      while (p == top.entry) ++p;
      if (p < v.node_degree) {
        top.next = p + 1;
        s.awaiting_entry = true;
        return Action::move(p);
      }
    }
    if (depth > 0) {
      const int back = top.entry;
      s.stack.pop_back();
      return Action::move(back);
    }
    s.walking = false;  // tree exhausted, wait out the cycle at home
    return Action::stay();
  }
};

// Standalone i-Hop-Meeting: runs one full window and terminates. If two
// robots started within i hops, the configuration is undispersed by then.
struct HopMeeting {
  int n;
  HopCore core;

  HopMeeting(int i, int node_count, int b, bool delta_aware = false, int delta = 0)
      : n(node_count), core(i, node_count, b, delta_aware, delta) {}

  struct State {
    Mode mode = Mode::leader;
    long group_id = -1;
    int label = 0;
    HopCore::State hop;
  };

  State make_initial_state(const RobotSpec& r) const {
    State s;
    s.label = r.label;
    s.group_id = r.label;
    s.hop.group_id = r.label;
    return s;
  }

  long round_bound() const { return core.window_len() + 1; }

  Message emit(const State& s, const PreView& v) const {
    Message m{s.label, s.hop.mode, s.hop.group_id};
    m.announced = core.plan(s.hop, LocalView{v.round, v.node_degree, v.arrival_port, {}});
    return m;
  }

  StepResult act(State& s, const LocalView& v) const {
    if (v.round >= core.window_len()) return {Action::terminate()};
    const Action a = core.act(s.hop, v, v.round, s.label);
    s.mode = s.hop.mode;
    s.group_id = s.hop.group_id;
    return {a, v.round % core.cycle_len == 0};
  }
};

// ---------------------------------------------------------------------------
// Sequence-driven gathering with detection, embeddable core. Cycles of 2T
// rounds, one label bit each (least significant first): bit 1 explores
// for T rounds then waits T, bit 0 the opposite order. Groups follow the
// largest label present and merge under it on any co-location. A leader
// whose bits are exhausted waits one further cycle; if nobody arrives, the
// gathering is complete and it terminates with its followers.

struct UxsCore {
  const std::vector<int>* symbols;
  long t;  // T, the sequence length

  explicit UxsCore(const ExplorationSequence& seq)
      : symbols(&seq.symbols), t(seq.length()) {}

  struct State {
    Mode mode = Mode::leader;
    long group_id = -1;  // label of the robot led by / self
    int follow_label = -1;
  };

  // Leader plan: pure in (round, label, degree, arrival port).
  Action plan(long rel, int label, int degree, int arrival) const {
    const long cycle = rel / (2 * t);
    const long pos = rel % (2 * t);
    const int bits = bit_length(label);
    if (cycle < bits) {
      const bool one = ((label >> cycle) & 1) != 0;
      const bool exploring = one ? pos < t : pos >= t;
      if (!exploring) return Action::stay();
      const long idx = one ? pos : pos - t;
      const int entry = idx == 0 ? -1 : arrival;  // fresh walk each cycle
      const int exit = ((entry < 0 ? 0 : entry) + (*symbols)[idx]) % degree;
      return Action::move(exit);
    }
    if (rel == (bits + 1) * 2 * t) return Action::terminate();
    return Action::stay();  // the final 2T waiting window
  }

  Action act(State& s, const LocalView& v, long rel, int label) const {
    if (s.group_id < 0) s.group_id = label;
    if (!v.colocated.empty()) {
      int largest = label;
      const Message* leader_msg = nullptr;
      for (const Message& m : v.colocated)
        if (m.label > largest) largest = m.label;
      if (largest != label) {
        for (const Message& m : v.colocated)
          if (m.label == largest) leader_msg = &m;
        s.mode = Mode::follower;
        s.group_id = largest;
        s.follow_label = largest;
        return leader_msg->announced;  // the largest present is always a leader
      }
    }
    if (s.mode == Mode::follower) {
      // A follower is co-located with its leader by construction; reaching
      // here means the whole group merged under this robot, impossible.
      return Action::stay();
    }
    return plan(rel, label, v.node_degree, v.arrival_port);
  }
};

// Standalone gathering via exploration sequence.
struct UxsGathering {
  int n;
  int b;
  ExplorationSequence seq;
  UxsCore core;

  UxsGathering(int node_count, int id_exponent, ExplorationSequence sequence)
      : n(node_count), b(id_exponent), seq(std::move(sequence)), core(seq) {}

  struct State {
    Mode mode = Mode::leader;
    long group_id = -1;
    int label = 0;
    UxsCore::State uxs;
  };

  State make_initial_state(const RobotSpec& r) const {
    State s;
    s.label = r.label;
    s.group_id = r.label;
    s.uxs.group_id = r.label;
    return s;
  }

  long round_bound() const { return (max_bit_cycles(n, b) + 1) * 2 * core.t + 1; }

  Message emit(const State& s, const PreView& v) const {
    Message m{s.label, s.uxs.mode, s.uxs.group_id};
    if (s.uxs.mode == Mode::leader)
      m.announced = core.plan(v.round, s.label, v.node_degree, v.arrival_port);
    return m;
  }

  StepResult act(State& s, const LocalView& v) const {
    const Action a = core.act(s.uxs, v, v.round, s.label);
    s.mode = s.uxs.mode;
    s.group_id = s.uxs.group_id;
    return {a, v.round % (2 * core.t) == 0};
  }
};

// ---------------------------------------------------------------------------
// Faster-Gathering: Step 1 runs the undispersed algorithm for R rounds;
// steps 2..6 run the (i-1)-hop meeting for D(i-1) rounds and the
// undispersed algorithm for R more; the boundary round of every step
// checks aloneness (not alone means gathering is complete: terminate);
// step 7 falls back to the sequence stage, which always terminates
// gathered. Given initial hop-distance information, start_step skips
// ahead (the program clock is offset by the skipped steps).

struct FasterGathering {
  int n;
  int b;
  ExplorationSequence seq;
  Schedule sched;
  int start_step;
  UndispersedCore und_core;
  HopCore hop_cores[5];
  UxsCore uxs_core;

  FasterGathering(int node_count, int id_exponent, ExplorationSequence sequence,
                  int first_step = 1, bool delta_aware = false, int delta = 0)
      : n(node_count),
        b(id_exponent),
        seq(std::move(sequence)),
        sched(compute_schedule(node_count, id_exponent, seq.length(), delta_aware, delta)),
        start_step(first_step),
        und_core(node_count),
        hop_cores{HopCore(1, node_count, id_exponent, delta_aware, delta),
                  HopCore(2, node_count, id_exponent, delta_aware, delta),
                  HopCore(3, node_count, id_exponent, delta_aware, delta),
                  HopCore(4, node_count, id_exponent, delta_aware, delta),
                  HopCore(5, node_count, id_exponent, delta_aware, delta)},
        uxs_core(seq) {
    if (first_step < 1 || first_step > 7)
      throw SimError(SimError::Kind::Config, "start step must be in [1, 7]");
  }

  struct Window {
    enum class Kind { undispersed, hop, uxs } kind;
    int id;         // distinct per window for reset detection
    long base;      // first clock round of the window
    int hop_index;  // 0..4 when kind == hop
  };

  Window window_of(long clock) const {
    if (clock < sched.s[1]) return {Window::Kind::undispersed, 1, 0, 0};
    for (int i = 2; i <= 6; ++i) {
      if (clock < sched.s[i]) {
        const long base = sched.s[i - 1];
        if (clock - base < sched.d[i - 1])
          return {Window::Kind::hop, 2 * i, base, i - 2};  // radius i-1
        return {Window::Kind::undispersed, 2 * i + 1, base + sched.d[i - 1], 0};
      }
    }
    return {Window::Kind::uxs, 100, sched.s[6], 0};
  }

  struct State {
    Mode mode = Mode::leader;
    long group_id = -1;
    int label = 0;
    int window_id = -1;
    UndispersedCore::State und;
    HopCore::State hop;
    UxsCore::State uxs;
  };

  State make_initial_state(const RobotSpec& r) const {
    State s;
    s.label = r.label;
    s.group_id = r.label;
    return s;
  }

  long clock_of(long round) const { return round + sched.s[start_step - 1]; }

  long round_bound() const { return sched.total_bound() - sched.s[start_step - 1]; }

  bool is_boundary(long clock) const {
    for (int i = 1; i <= 6; ++i)
      if (clock == sched.s[i]) return true;
    return false;
  }

  Message emit(const State& s, const PreView& v) const {
    const long clock = clock_of(v.round);
    const Window w = window_of(clock);
    Message m{s.label, s.mode, s.group_id};
    if (w.id != s.window_id) {
      // First round of a window: sub-state not yet initialized. The only
      // announcement that matters here is a sequence-stage leader's plan.
      if (w.kind == Window::Kind::uxs)
        m.announced = uxs_core.plan(clock - w.base, s.label, v.node_degree, v.arrival_port);
      return m;
    }
    switch (w.kind) {
      case Window::Kind::undispersed: {
        PreView rel_view{clock - w.base, v.node_degree, v.arrival_port};
        return und_core.emit(s.und, rel_view, clock - w.base, s.label);
      }
      case Window::Kind::hop:
        m.mode = s.hop.mode;
        m.group_id = s.hop.group_id;
        m.announced = hop_cores[w.hop_index].plan(
            s.hop, LocalView{clock - w.base, v.node_degree, v.arrival_port, {}});
        return m;
      case Window::Kind::uxs:
        m.mode = s.uxs.mode;
        m.group_id = s.uxs.group_id;
        if (s.uxs.mode == Mode::leader)
          m.announced = uxs_core.plan(clock - w.base, s.label, v.node_degree, v.arrival_port);
        return m;
    }
    return m;
  }

  StepResult act(State& s, const LocalView& v) const {
    const long clock = clock_of(v.round);
    // Step-boundary aloneness check: company at a boundary means the
    // gathering is complete (step dichotomy), so terminate. Skipped at
    // round 0, where a start-step offset may land on a boundary before
    // anything has run.
    if (v.round > 0 && is_boundary(clock) && !v.colocated.empty())
      return {Action::terminate(), true};

    const Window w = window_of(clock);
    bool fresh = false;
    if (w.id != s.window_id) {
      s.window_id = w.id;
      fresh = true;
      switch (w.kind) {
        case Window::Kind::undispersed: s.und = UndispersedCore::State{}; break;
        case Window::Kind::hop: s.hop = HopCore::State{}; s.hop.group_id = s.label; break;
        case Window::Kind::uxs: s.uxs = UxsCore::State{}; s.uxs.group_id = s.label; break;
      }
    }
    const long rel = clock - w.base;
    Action a = Action::stay();
    switch (w.kind) {
      case Window::Kind::undispersed: {
        LocalView rel_view{rel, v.node_degree, v.arrival_port, v.colocated};
        a = und_core.act(s.und, rel_view, rel, s.label);
        s.mode = s.und.mode;
        s.group_id = s.und.group_id;
        break;
      }
      case Window::Kind::hop: {
        LocalView rel_view{rel, v.node_degree, v.arrival_port, v.colocated};
        a = hop_cores[w.hop_index].act(s.hop, rel_view, rel, s.label);
        s.mode = s.hop.mode;
        s.group_id = s.hop.group_id;
        break;
      }
      case Window::Kind::uxs: {
        LocalView rel_view{rel, v.node_degree, v.arrival_port, v.colocated};
        a = uxs_core.act(s.uxs, rel_view, rel, s.label);
        s.mode = s.uxs.mode;
        s.group_id = s.uxs.group_id;
        break;
      }
    }
    return {a, fresh};
  }
};

}  // namespace gathersim
