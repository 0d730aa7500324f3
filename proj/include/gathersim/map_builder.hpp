#pragma once

// Map construction with a movable token. A finder explores the anonymous
// graph while its co-located helpers act as the token: parking the token
// at an unknown endpoint and sweeping the known nodes is the only way to
// test node identity when nodes carry no names. The finder grows a
// PartialMap until no frontier ports remain, then brings the token home.
//
// Frontier-resolution loop, one port at a time in lexicographic order:
//   1. escort the token to the frontier node u,
//   2. lead it across port p to the unknown endpoint w, note the arrival
//      port q, leave the token, return to u through q,
//   3. sweep every known node; finding the token at known x means w = x,
//      finding nothing means w is new,
//   4. rejoin the token and continue from there.

#include <optional>
#include <vector>

#include "gathersim/port_graph.hpp"
#include "gathersim/sim.hpp"

namespace gathersim {

class MapError : public std::runtime_error {
 public:
  enum class Kind { IncompleteMap };

  MapError(Kind kind, const std::string& msg) : std::runtime_error(msg), kind(kind) {}

  Kind kind;
};

// Phase-1 round budget R1(n): every map construction finishes within it,
// with room to spare (the loop spends under 8n moves per frontier port
// and there are at most 2m <= n(n-1) of them).
inline long map_round_budget(int n) { return 20L * n * n * n; }

struct PartialMap {
  struct PortEntry {
    int to = -1;   // local node id, -1 while the port is frontier
    int rev = -1;  // reverse port at that node
    bool resolved() const { return to >= 0; }
  };
  struct Node {
    int degree = 0;
    std::vector<PortEntry> ports;
    std::vector<int> path_from_origin;  // port walk from local node 0
  };

  std::vector<Node> nodes;  // origin is local id 0

  int known_count() const { return static_cast<int>(nodes.size()); }

  long entry_count() const {
    long total = 0;
    for (const Node& v : nodes) total += static_cast<long>(v.ports.size());
    return total;
  }

  bool complete() const {
    for (const Node& v : nodes)
      for (const PortEntry& e : v.ports)
        if (!e.resolved()) return false;
    return !nodes.empty();
  }

  int add_node(int degree, std::vector<int> path) {
    Node v;
    v.degree = degree;
    v.ports.resize(degree);
    v.path_from_origin = std::move(path);
    nodes.push_back(std::move(v));
    return static_cast<int>(nodes.size()) - 1;
  }

  void resolve(int u, int p, int w, int q) {
    nodes[u].ports[p] = {w, q};
    nodes[w].ports[q] = {u, p};
  }

  // Smallest unresolved (node, port) in lexicographic order.
  std::optional<std::pair<int, int>> first_frontier() const {
    for (int v = 0; v < known_count(); ++v)
      for (int p = 0; p < nodes[v].degree; ++p)
        if (!nodes[v].ports[p].resolved()) return std::make_pair(v, p);
    return std::nullopt;
  }

  // Port walk between known nodes along resolved edges (breadth-first,
  // ascending ports, so deterministic).
  std::vector<int> resolved_path(int from, int to) const {
    if (from == to) return {};
    std::vector<int> via_node(nodes.size(), -1), via_port(nodes.size(), -1);
    std::vector<int> queue = {from};
    via_node[from] = from;
    for (size_t head = 0; head < queue.size(); ++head) {
      const int v = queue[head];
      for (int p = 0; p < nodes[v].degree; ++p) {
        const PortEntry& e = nodes[v].ports[p];
        if (!e.resolved() || via_node[e.to] >= 0) continue;
        via_node[e.to] = v;
        via_port[e.to] = p;
        queue.push_back(e.to);
      }
    }
    std::vector<int> path;
    for (int v = to; v != from; v = via_node[v]) path.push_back(via_port[v]);
    std::reverse(path.begin(), path.end());
    return path;
  }

  // Depth-first Euler tour of the smallest-port spanning tree of the
  // resolved subgraph, rooted at `root`: visits every known node and
  // returns, in exactly 2(known-1) moves. Also reports the local node
  // reached after each move.
  void tour_from(int root, std::vector<int>& ports_out, std::vector<int>& nodes_out) const {
    ports_out.clear();
    nodes_out.clear();
    std::vector<bool> visited(nodes.size(), false);
    visited[root] = true;
    struct Frame { int node; int next_port; int entry_rev; };
    std::vector<Frame> stack = {{root, 0, -1}};
    while (!stack.empty()) {
      Frame& f = stack.back();
      bool descended = false;
      while (f.next_port < nodes[f.node].degree) {
        const PortEntry& e = nodes[f.node].ports[f.next_port];
        const int p = f.next_port++;
        if (!e.resolved() || visited[e.to]) continue;
        visited[e.to] = true;
        ports_out.push_back(p);
        nodes_out.push_back(e.to);
        stack.push_back({e.to, 0, e.rev});
        descended = true;
        break;
      }
      if (descended) continue;
      const int rev = f.entry_rev;
      stack.pop_back();
      if (!stack.empty()) {
        ports_out.push_back(rev);
        nodes_out.push_back(stack.back().node);
      }
    }
  }

  // A completed map is itself a port graph, exportable for offline
  // isomorphism checks.
  PortGraph to_port_graph() const {
    if (!complete())
      throw MapError(MapError::Kind::IncompleteMap, "map still has frontier ports");
    std::vector<std::vector<PortTarget>> ports(nodes.size());
    for (size_t v = 0; v < nodes.size(); ++v) {
      ports[v].resize(nodes[v].ports.size());
      for (size_t p = 0; p < nodes[v].ports.size(); ++p)
        ports[v][p] = PortTarget{nodes[v].ports[p].to, nodes[v].ports[p].rev};
    }
    return PortGraph::validate(std::move(ports));
  }
};

// The finder-side driver of the frontier-resolution loop. One call per
// round; consumes the round's observations (current degree, arrival port,
// token presence) and yields the finder's move plus whether the token
// must move along.
struct TokenMapCore {
  enum class Stage { start, escort, cross_park, at_w, tour, cross_join, go_home, done };

  PartialMap map;
  Stage stage = Stage::start;
  int cur = 0;  // finder's position as a local node id
  int u = -1, p = -1;
  int park_q = -1;
  int pending_degree = -1;
  std::vector<int> path;
  size_t path_pos = 0;
  std::vector<int> tour_ports, tour_nodes;
  size_t tour_pos = 0;
  long completion_round = -1;  // rel round when the token came home
  long moves = 0;

  bool done() const { return stage == Stage::done; }

  struct Out {
    Action action = Action::stay();
    bool escort = false;  // token helpers move through the same port
  };

  // Token presence may only turn a sweep round into a stay (the regroup
  // round below), never into an escorted move, so the finder's message,
  // which is computed before it can see the token, stays consistent with
  // what it does.
  Out step(long rel_round, int my_degree, int arrival_port, bool token_present) {
    if (stage == Stage::start) {
      map.add_node(my_degree, {});
      pick_next();
    }
    if (stage == Stage::tour && token_present) {
      // The token sits on a known node: w = cur. Regroup this round; the
      // next escort starts here.
      map.resolve(u, p, cur, park_q);
      pick_next();
      return {Action::stay(), false};
    }
    for (;;) {
      switch (stage) {
        case Stage::escort:
          if (path_pos < path.size()) {
            const int port = path[path_pos];
            cur = map.nodes[cur].ports[port].to;
            ++path_pos;
            ++moves;
            return {Action::move(port), true};
          }
          stage = Stage::cross_park;
          continue;
        case Stage::cross_park:
          // Lead the token across the frontier port; the position becomes
          // the unknown endpoint w (no local id yet).
          stage = Stage::at_w;
          ++moves;
          return {Action::move(p), true};
        case Stage::at_w:
          // First observation of w: its degree, and q, the port we came in
          // through. Leave the token and step back to u alone.
          park_q = arrival_port;
          pending_degree = my_degree;
          map.tour_from(u, tour_ports, tour_nodes);
          tour_pos = 0;
          stage = Stage::tour;
          ++moves;
          return {Action::move(park_q), false};
        case Stage::tour:
          if (tour_pos < tour_ports.size()) {
            const int port = tour_ports[tour_pos];
            cur = tour_nodes[tour_pos];
            ++tour_pos;
            ++moves;
            return {Action::move(port), false};
          } else {
            // Swept every known node without finding the token: w is new.
            std::vector<int> path_w = map.nodes[u].path_from_origin;
            path_w.push_back(p);
            const int w = map.add_node(pending_degree, std::move(path_w));
            map.resolve(u, p, w, park_q);
            stage = Stage::cross_join;
            continue;
          }
        case Stage::cross_join: {
          // Rejoin the token at w; the next escort starts from there.
          const int cross_port = p;
          cur = map.nodes[u].ports[p].to;
          pick_next();  // reassigns u and p
          ++moves;
          return {Action::move(cross_port), false};
        }
        case Stage::go_home:
          if (path_pos < path.size()) {
            const int port = path[path_pos];
            cur = map.nodes[cur].ports[port].to;
            ++path_pos;
            ++moves;
            return {Action::move(port), true};
          }
          stage = Stage::done;
          completion_round = rel_round;
          continue;
        case Stage::done:
          return {Action::stay(), false};
        case Stage::start:
          continue;
      }
    }
  }

 private:
  void pick_next() {
    if (auto f = map.first_frontier()) {
      u = f->first;
      p = f->second;
      path = map.resolved_path(cur, u);
      path_pos = 0;
      stage = Stage::escort;
    } else {
      path = map.resolved_path(cur, 0);
      path_pos = 0;
      stage = Stage::go_home;
    }
  }
};

// Standalone map-finding program. Round 0 is the role-assignment round:
// co-located robots exchange labels, the minimum becomes the finder and
// the rest its token helpers; singletons wait. The script starts at round
// 1 and everyone terminates when the budget R1(n) elapses, finder and
// token back at the start node with the map complete.
struct TokenMapProgram {
  int n;

  explicit TokenMapProgram(int node_count) : n(node_count) {}

  struct State {
    Mode mode = Mode::waiter;
    long group_id = -1;
    int label = 0;
    bool assigned = false;
    TokenMapCore core;  // finder only
  };

  State make_initial_state(const RobotSpec& r) const {
    State s;
    s.label = r.label;
    return s;
  }

  long round_bound() const { return map_round_budget(n) + 1; }

  Message emit(const State& s, const PreView& v) const {
    Message m{s.label, s.mode, s.group_id};
    if (s.assigned && s.mode == Mode::finder && !s.core.done()) {
      // Planned on a scratch copy; token presence (unknowable before the
      // messages are exchanged) can only turn this plan into a stay, never
      // into an escorted move, so the escort order is reliable.
      State scratch = s;
      const TokenMapCore::Out out =
          scratch.core.step(v.round, v.node_degree, v.arrival_port, false);
      m.announced = out.action;
      if (out.escort) m.escort_port = out.action.port;
    }
    return m;
  }

  StepResult act(State& s, const LocalView& v) const {
    if (v.round >= map_round_budget(n)) return {Action::terminate()};
    if (!s.assigned) {
      assign_role(s, v);
      return {Action::stay()};  // round 0: exchange labels only
    }
    switch (s.mode) {
      case Mode::finder: {
        if (s.core.done()) return {Action::stay()};
        bool token_present = false;
        for (const Message& m : v.colocated)
          if (m.mode == Mode::helper && m.group_id == s.group_id) token_present = true;
        const TokenMapCore::Out out =
            s.core.step(v.round, v.node_degree, v.arrival_port, token_present);
        return {out.action, s.core.done()};
      }
      case Mode::helper:
        for (const Message& m : v.colocated)
          if (m.mode == Mode::finder && m.group_id == s.group_id && m.escort_port >= 0)
            return {Action::move(m.escort_port)};
        return {Action::stay()};
      default:
        return {Action::stay()};
    }
  }

 private:
  static void assign_role(State& s, const LocalView& v) {
    s.assigned = true;
    if (v.colocated.size() < 2) {
      s.mode = Mode::waiter;
      s.group_id = -1;
      return;
    }
    int min_label = s.label;
    for (const Message& m : v.colocated) min_label = std::min(min_label, m.label);
    s.mode = min_label == s.label ? Mode::finder : Mode::helper;
    s.group_id = min_label;
  }
};

}  // namespace gathersim
