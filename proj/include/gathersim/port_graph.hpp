#pragma once

// Anonymous port-labeled graphs: the world the robots move in.
//
// Nodes carry no identifiers. Each node of degree d labels its incident
// edges with ports 0..d-1; the two endpoints of an edge may label it
// differently. PortGraph values are immutable after validation and safe
// to share read-only across threads.

#include <algorithm>
#include <cstdint>
#include <istream>
#include <optional>
#include <ostream>
#include <queue>
#include <sstream>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

namespace gathersim {

struct PortTarget {
  int node = -1;      // neighbor reached through this port
  int rev_port = -1;  // port assigned to the edge at that neighbor

  bool operator==(const PortTarget&) const = default;
};

class GraphError : public std::runtime_error {
 public:
  enum class Kind {
    PortGap,
    AsymmetricEdge,
    SelfLoop,
    MultiEdge,
    Disconnected,
    Parse,
    UnsupportedSize,
    ScopeTooLarge,
  };

  GraphError(Kind kind, const std::string& msg)
      : std::runtime_error(msg), kind(kind) {}

  Kind kind;
};

class PortGraph {
 public:
  // Validates a raw per-node port table and takes ownership of it.
  // Throws GraphError on any violation of the model invariants.
  static PortGraph validate(std::vector<std::vector<PortTarget>> ports) {
    const int n = static_cast<int>(ports.size());
    if (n < 1) throw GraphError(GraphError::Kind::UnsupportedSize, "graph needs at least one node");
    for (int v = 0; v < n; ++v) {
      std::vector<bool> seen_neighbor(n, false);
      for (int p = 0; p < static_cast<int>(ports[v].size()); ++p) {
        const PortTarget t = ports[v][p];
        if (t.node < 0 || t.node >= n)
          throw GraphError(GraphError::Kind::Parse,
                           "node " + std::to_string(v) + " port " + std::to_string(p) + ": neighbor out of range");
        if (t.node == v)
          throw GraphError(GraphError::Kind::SelfLoop,
                           "self-loop at node " + std::to_string(v));
        if (seen_neighbor[t.node])
          throw GraphError(GraphError::Kind::MultiEdge,
                           "multi-edge between " + std::to_string(v) + " and " + std::to_string(t.node));
        seen_neighbor[t.node] = true;
        if (t.rev_port < 0 || t.rev_port >= static_cast<int>(ports[t.node].size()) ||
            ports[t.node][t.rev_port].node != v || ports[t.node][t.rev_port].rev_port != p)
          throw GraphError(GraphError::Kind::AsymmetricEdge,
                           "edge " + std::to_string(v) + "/" + std::to_string(p) +
                               " has no symmetric counterpart");
      }
    }
    // Connectivity via breadth-first search from node 0.
    std::vector<bool> reached(n, false);
    std::queue<int> q;
    reached[0] = true;
    q.push(0);
    int count = 1;
    while (!q.empty()) {
      const int v = q.front();
      q.pop();
      for (const PortTarget& t : ports[v]) {
        if (!reached[t.node]) {
          reached[t.node] = true;
          ++count;
          q.push(t.node);
        }
      }
    }
    if (count != n) throw GraphError(GraphError::Kind::Disconnected, "graph is not connected");
    return PortGraph(std::move(ports));
  }

  // Builds port tables from neighbor lists, assigning ports by ascending
  // neighbor index. This is the canonical port labeling used for
  // generated and enumerated graphs.
  static PortGraph from_adjacency(const std::vector<std::vector<int>>& neighbors) {
    const int n = static_cast<int>(neighbors.size());
    std::vector<std::vector<int>> sorted(n);
    for (int v = 0; v < n; ++v) {
      sorted[v] = neighbors[v];
      std::sort(sorted[v].begin(), sorted[v].end());
    }
    std::vector<std::vector<PortTarget>> ports(n);
    for (int v = 0; v < n; ++v) {
      ports[v].resize(sorted[v].size());
      for (int p = 0; p < static_cast<int>(sorted[v].size()); ++p) {
        const int u = sorted[v][p];
        const auto it = std::lower_bound(sorted[u].begin(), sorted[u].end(), v);
        ports[v][p] = PortTarget{u, static_cast<int>(it - sorted[u].begin())};
      }
    }
    return validate(std::move(ports));
  }

  int node_count() const { return static_cast<int>(ports_.size()); }

  int degree(int v) const { return static_cast<int>(ports_[v].size()); }

  PortTarget step(int v, int port) const { return ports_[v][port]; }

  const std::vector<PortTarget>& ports(int v) const { return ports_[v]; }

  long edge_count() const {
    long twice = 0;
    for (const auto& row : ports_) twice += static_cast<long>(row.size());
    return twice / 2;
  }

  bool operator==(const PortGraph& other) const { return ports_ == other.ports_; }

 private:
  explicit PortGraph(std::vector<std::vector<PortTarget>> ports) : ports_(std::move(ports)) {}

  std::vector<std::vector<PortTarget>> ports_;
};

struct GraphStats {
  int diameter = 0;    // max over node pairs of hop distance
  int max_degree = 0;  // the Delta the cycle-length remark uses
  long edge_count = 0;
};

inline std::vector<int> bfs_distances(const PortGraph& g, int src) {
  std::vector<int> dist(g.node_count(), -1);
  std::queue<int> q;
  dist[src] = 0;
  q.push(src);
  while (!q.empty()) {
    const int v = q.front();
    q.pop();
    for (const PortTarget& t : g.ports(v)) {
      if (dist[t.node] < 0) {
        dist[t.node] = dist[v] + 1;
        q.push(t.node);
      }
    }
  }
  return dist;
}

// Minimum number of edges on any u-v path. Connectivity is a PortGraph
// invariant, so the result is always defined.
inline int shortest_path_distance(const PortGraph& g, int u, int v) {
  if (u == v) return 0;
  return bfs_distances(g, u)[v];
}

inline GraphStats compute_stats(const PortGraph& g) {
  GraphStats s;
  s.edge_count = g.edge_count();
  for (int v = 0; v < g.node_count(); ++v) {
    s.max_degree = std::max(s.max_degree, g.degree(v));
    const std::vector<int> dist = bfs_distances(g, v);
    for (int d : dist) s.diameter = std::max(s.diameter, d);
  }
  return s;
}

// splitmix64, the fixed published recurrence used wherever the artifact
// needs seeded determinism (random graphs, label sampling, heuristic
// exploration sequences).
struct SplitMix64 {
  uint64_t state;

  explicit SplitMix64(uint64_t seed) : state(seed) {}

  uint64_t next() {
    uint64_t z = (state += 0x9e3779b97f4a7c15ull);
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ull;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebull;
    return z ^ (z >> 31);
  }

  // Unbiased-enough for desk scale; bound > 0.
  uint64_t below(uint64_t bound) { return next() % bound; }
};

enum class GraphFamily { path, cycle, complete, star, random_connected };

inline std::optional<GraphFamily> family_from_name(std::string_view name) {
  if (name == "path") return GraphFamily::path;
  if (name == "cycle") return GraphFamily::cycle;
  if (name == "complete") return GraphFamily::complete;
  if (name == "star") return GraphFamily::star;
  if (name == "random-connected") return GraphFamily::random_connected;
  return std::nullopt;
}

// Deterministic test-corpus generator: identical (kind, n, seed) yields an
// identical graph. Ports follow the ascending-neighbor convention.
inline PortGraph generate_family(GraphFamily kind, int n, uint64_t seed = 0) {
  if (n < 2) throw GraphError(GraphError::Kind::UnsupportedSize, "family graphs need n >= 2");
  std::vector<std::vector<int>> adj(n);
  auto link = [&adj](int a, int b) {
    adj[a].push_back(b);
    adj[b].push_back(a);
  };
  switch (kind) {
    case GraphFamily::path:
      for (int v = 0; v + 1 < n; ++v) link(v, v + 1);
      break;
    case GraphFamily::cycle:
      if (n < 3) throw GraphError(GraphError::Kind::UnsupportedSize, "cycle needs n >= 3");
      for (int v = 0; v < n; ++v) link(v, (v + 1) % n);
      break;
    case GraphFamily::complete:
      for (int u = 0; u < n; ++u)
        for (int v = u + 1; v < n; ++v) link(u, v);
      break;
    case GraphFamily::star:
      for (int v = 1; v < n; ++v) link(0, v);
      break;
    case GraphFamily::random_connected: {
      SplitMix64 rng(seed);
      std::vector<std::vector<bool>> has(n, std::vector<bool>(n, false));
      for (int v = 1; v < n; ++v) {
        const int u = static_cast<int>(rng.below(static_cast<uint64_t>(v)));
        has[u][v] = has[v][u] = true;
        link(u, v);
      }
      for (int u = 0; u < n; ++u)
        for (int v = u + 1; v < n; ++v)
          if (!has[u][v] && (rng.next() & 1)) link(u, v);
      break;
    }
  }
  return PortGraph::from_adjacency(adj);
}

// ---------------------------------------------------------------------------
// Graph file format.
//
//   n=<int>
//   <node>: <port0>-><neighbor>/<revport> <port1>->...
//
// One line per node, ports in ascending order, single spaces, no trailing
// whitespace. The parser rejects any deviation.

inline void write_graph(std::ostream& out, const PortGraph& g) {
  out << "n=" << g.node_count() << '\n';
  for (int v = 0; v < g.node_count(); ++v) {
    out << v << ':';
    for (int p = 0; p < g.degree(v); ++p) {
      const PortTarget t = g.step(v, p);
      out << ' ' << p << "->" << t.node << '/' << t.rev_port;
    }
    out << '\n';
  }
}

inline std::string to_text(const PortGraph& g) {
  std::ostringstream out;
  write_graph(out, g);
  return out.str();
}

namespace detail {

inline int parse_int(std::string_view text, size_t& pos, std::string_view what) {
  const size_t start = pos;
  while (pos < text.size() && text[pos] >= '0' && text[pos] <= '9') ++pos;
  if (pos == start || pos - start > 9)
    throw GraphError(GraphError::Kind::Parse, std::string("expected ") + std::string(what));
  int value = 0;
  for (size_t i = start; i < pos; ++i) value = value * 10 + (text[i] - '0');
  return value;
}

inline void expect(std::string_view text, size_t& pos, std::string_view token) {
  if (text.substr(pos, token.size()) != token)
    throw GraphError(GraphError::Kind::Parse, "expected '" + std::string(token) + "'");
  pos += token.size();
}

}  // namespace detail

inline PortGraph parse_graph_text(std::string_view text) {
  size_t pos = 0;
  detail::expect(text, pos, "n=");
  const int n = detail::parse_int(text, pos, "node count");
  detail::expect(text, pos, "\n");
  if (n < 1) throw GraphError(GraphError::Kind::Parse, "node count must be positive");
  std::vector<std::vector<PortTarget>> ports(n);
  for (int v = 0; v < n; ++v) {
    const int node = detail::parse_int(text, pos, "node id");
    if (node != v) throw GraphError(GraphError::Kind::Parse, "node lines must appear in order");
    detail::expect(text, pos, ":");
    int next_port = 0;
    while (pos < text.size() && text[pos] == ' ') {
      ++pos;
      const int p = detail::parse_int(text, pos, "port");
      if (p != next_port)
        throw GraphError(GraphError::Kind::PortGap,
                         "ports at node " + std::to_string(v) + " must be 0.." + "deg-1 in order");
      ++next_port;
      detail::expect(text, pos, "->");
      const int to = detail::parse_int(text, pos, "neighbor");
      detail::expect(text, pos, "/");
      const int rev = detail::parse_int(text, pos, "reverse port");
      ports[v].push_back(PortTarget{to, rev});
    }
    detail::expect(text, pos, "\n");
  }
  if (pos != text.size())
    throw GraphError(GraphError::Kind::Parse, "trailing content after last node line");
  return PortGraph::validate(std::move(ports));
}

inline PortGraph read_graph(std::istream& in) {
  std::ostringstream buf;
  buf << in.rdbuf();
  return parse_graph_text(buf.str());
}

}  // namespace gathersim
