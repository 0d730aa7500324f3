#include <catch2/catch_amalgamated.hpp>

#include <algorithm>
#include <numeric>
#include <queue>
#include <set>
#include <vector>

#include "gathersim/enumerate.hpp"
#include "gathersim/port_graph.hpp"

using namespace gathersim;

namespace {

// Independent oracle: breadth-first distances recomputed over a plain
// adjacency matrix, sharing no code with the library walk.
int oracle_distance(const PortGraph& g, int u, int v) {
  const int n = g.node_count();
  std::vector<std::vector<bool>> adj(n, std::vector<bool>(n, false));
  for (int a = 0; a < n; ++a)
    for (const PortTarget& t : g.ports(a)) adj[a][t.node] = true;
  std::vector<int> dist(n, -1);
  std::queue<int> q;
  dist[u] = 0;
  q.push(u);
  while (!q.empty()) {
    const int a = q.front();
    q.pop();
    for (int b = 0; b < n; ++b)
      if (adj[a][b] && dist[b] < 0) {
        dist[b] = dist[a] + 1;
        q.push(b);
      }
  }
  return dist[v];
}

using Matrix = std::vector<std::vector<bool>>;

bool matrix_connected(const Matrix& m) {
  const int n = static_cast<int>(m.size());
  std::vector<bool> seen(n, false);
  std::vector<int> stack = {0};
  seen[0] = true;
  int count = 1;
  while (!stack.empty()) {
    const int v = stack.back();
    stack.pop_back();
    for (int u = 0; u < n; ++u)
      if (m[v][u] && !seen[u]) {
        seen[u] = true;
        ++count;
        stack.push_back(u);
      }
  }
  return count == n;
}

bool matrix_isomorphic(const Matrix& a, const Matrix& b) {
  const int n = static_cast<int>(a.size());
  std::vector<int> perm(n);
  std::iota(perm.begin(), perm.end(), 0);
  do {
    bool match = true;
    for (int i = 0; i < n && match; ++i)
      for (int j = 0; j < n && match; ++j)
        if (a[i][j] != b[perm[i]][perm[j]]) match = false;
    if (match) return true;
  } while (std::next_permutation(perm.begin(), perm.end()));
  return false;
}

// Independent oracle: connected graphs on n nodes up to isomorphism via
// adjacency-matrix filtering and brute-force permutation dedup.
int oracle_connected_structure_count(int n) {
  const int edges = n * (n - 1) / 2;
  std::vector<Matrix> classes;
  for (uint32_t mask = 0; mask < (1u << edges); ++mask) {
    Matrix m(n, std::vector<bool>(n, false));
    int e = 0;
    for (int i = 0; i < n; ++i)
      for (int j = i + 1; j < n; ++j, ++e)
        if (mask & (1u << e)) m[i][j] = m[j][i] = true;
    if (!matrix_connected(m)) continue;
    bool fresh = true;
    for (const Matrix& c : classes)
      if (matrix_isomorphic(m, c)) {
        fresh = false;
        break;
      }
    if (fresh) classes.push_back(m);
  }
  return static_cast<int>(classes.size());
}

Matrix matrix_of(const PortGraph& g) {
  Matrix m(g.node_count(), std::vector<bool>(g.node_count(), false));
  for (int v = 0; v < g.node_count(); ++v)
    for (const PortTarget& t : g.ports(v)) m[v][t.node] = true;
  return m;
}

// A fresh port labeling of g drawn from per-node permutations.
PortGraph relabel_ports(const PortGraph& g, uint64_t seed) {
  SplitMix64 rng(seed);
  const int n = g.node_count();
  std::vector<std::vector<int>> order(n);  // order[v][p] = neighbor on port p
  for (int v = 0; v < n; ++v) {
    for (const PortTarget& t : g.ports(v)) order[v].push_back(t.node);
    for (int i = static_cast<int>(order[v].size()) - 1; i > 0; --i)
      std::swap(order[v][i], order[v][rng.below(i + 1)]);
  }
  std::vector<std::vector<PortTarget>> ports(n);
  for (int v = 0; v < n; ++v) {
    ports[v].resize(order[v].size());
    for (int p = 0; p < static_cast<int>(order[v].size()); ++p) {
      const int u = order[v][p];
      int rev = -1;
      for (int q = 0; q < static_cast<int>(order[u].size()); ++q)
        if (order[u][q] == v) rev = q;
      ports[v][p] = PortTarget{u, rev};
    }
  }
  return PortGraph::validate(std::move(ports));
}

}  // namespace

TEST_CASE("validate accepts the smallest connected graph") {
  auto g = PortGraph::validate({{{1, 0}}, {{0, 0}}});
  CHECK(g.node_count() == 2);
  CHECK(g.edge_count() == 1);
}

TEST_CASE("validate accepts a consistent triangle") {
  auto g = generate_family(GraphFamily::cycle, 3);
  CHECK(g.node_count() == 3);
  CHECK(g.edge_count() == 3);
  for (int v = 0; v < 3; ++v) CHECK(g.degree(v) == 2);
}

TEST_CASE("validate rejects model violations") {
  // Two disjoint edges on 4 nodes.
  CHECK_THROWS_MATCHES(
      PortGraph::validate({{{1, 0}}, {{0, 0}}, {{3, 0}}, {{2, 0}}}), GraphError,
      Catch::Matchers::Predicate<GraphError>(
          [](const GraphError& e) { return e.kind == GraphError::Kind::Disconnected; }));
  // Self-loop.
  CHECK_THROWS_MATCHES(
      PortGraph::validate({{{0, 0}}}), GraphError,
      Catch::Matchers::Predicate<GraphError>(
          [](const GraphError& e) { return e.kind == GraphError::Kind::SelfLoop; }));
  // Reverse-port mismatch.
  CHECK_THROWS_MATCHES(
      PortGraph::validate({{{1, 0}, {2, 0}}, {{0, 1}}, {{0, 1}}}), GraphError,
      Catch::Matchers::Predicate<GraphError>(
          [](const GraphError& e) { return e.kind == GraphError::Kind::AsymmetricEdge; }));
}

TEST_CASE("shortest path distances") {
  auto p5 = generate_family(GraphFamily::path, 5);
  CHECK(shortest_path_distance(p5, 2, 2) == 0);
  CHECK(shortest_path_distance(p5, 0, 4) == 4);

  auto g = generate_family(GraphFamily::random_connected, 8, 7);
  for (int u = 0; u < 8; ++u)
    for (int v = 0; v < 8; ++v)
      CHECK(shortest_path_distance(g, u, v) == oracle_distance(g, u, v));
}

TEST_CASE("distance is symmetric and triangular on all structures up to n=6") {
  for (int n = 2; n <= 6; ++n) {
    for (const PortGraph& g : enumerate_connected(n, EnumMode::structures)) {
      std::vector<std::vector<int>> d(n);
      for (int v = 0; v < n; ++v) d[v] = bfs_distances(g, v);
      for (int u = 0; u < n; ++u)
        for (int v = 0; v < n; ++v) {
          REQUIRE(d[u][v] == d[v][u]);
          for (int w = 0; w < n; ++w) REQUIRE(d[u][v] <= d[u][w] + d[w][v]);
        }
    }
  }
}

TEST_CASE("generate_family produces the requested families deterministically") {
  auto c4 = generate_family(GraphFamily::cycle, 4);
  for (int v = 0; v < 4; ++v) CHECK(c4.degree(v) == 2);

  auto k5 = generate_family(GraphFamily::complete, 5);
  CHECK(k5.edge_count() == 10);
  for (int v = 0; v < 5; ++v) CHECK(k5.degree(v) == 4);

  auto star = generate_family(GraphFamily::star, 5);
  CHECK(star.degree(0) == 4);
  CHECK(star.edge_count() == 4);

  auto a = generate_family(GraphFamily::random_connected, 8, 42);
  auto b = generate_family(GraphFamily::random_connected, 8, 42);
  CHECK(to_text(a) == to_text(b));
  CHECK_FALSE(to_text(a) == to_text(generate_family(GraphFamily::random_connected, 8, 43)));

  CHECK_THROWS_AS(generate_family(GraphFamily::path, 1), GraphError);
}

TEST_CASE("enumerate_connected structure counts match an independent oracle") {
  CHECK(enumerate_connected(2, EnumMode::structures).size() == 1);
  CHECK(enumerate_connected(4, EnumMode::structures).size() == 6);
  for (int n = 2; n <= 5; ++n)
    CHECK(static_cast<int>(enumerate_connected(n, EnumMode::structures).size()) ==
          oracle_connected_structure_count(n));
  // Every yielded graph is valid by construction and connected.
  for (const PortGraph& g : enumerate_connected(5, EnumMode::structures)) {
    CHECK(g.node_count() == 5);
    CHECK(matrix_connected(matrix_of(g)));
  }
  CHECK_THROWS_AS(enumerate_connected(9, EnumMode::structures), GraphError);
}

TEST_CASE("all-port-labelings mode counts degree-factorial products") {
  // n=3: path contributes 1!*2!*1! = 2, triangle contributes 2!^3 = 8.
  auto labelings = enumerate_connected(3, EnumMode::all_port_labelings);
  CHECK(labelings.size() == 10);
  std::set<std::string> distinct;
  for (const PortGraph& g : labelings) distinct.insert(to_text(g));
  CHECK(distinct.size() == 10);
  CHECK_THROWS_AS(enumerate_connected(5, EnumMode::all_port_labelings), GraphError);
}

TEST_CASE("isomorphism checks") {
  auto p3 = generate_family(GraphFamily::path, 3);
  auto k3 = generate_family(GraphFamily::cycle, 3);
  CHECK(are_isomorphic(p3, p3, IsoMode::underlying));
  CHECK(are_isomorphic(p3, p3, IsoMode::port_preserving));
  CHECK_FALSE(are_isomorphic(p3, k3, IsoMode::underlying));

  auto c5 = generate_family(GraphFamily::cycle, 5);
  auto r1 = relabel_ports(c5, 11);
  auto r2 = relabel_ports(c5, 29);
  CHECK(are_isomorphic(r1, r2, IsoMode::underlying));
  CHECK(matrix_isomorphic(matrix_of(r1), matrix_of(r2)));  // brute-force bijection oracle

  // A canonically labeled path is port-preserving isomorphic to itself under
  // a node shift only if ports line up; compare against the reverse path.
  std::vector<std::vector<int>> rev = {{1}, {0, 2}, {1, 3}, {2}};
  auto p4 = generate_family(GraphFamily::path, 4);
  CHECK(are_isomorphic(p4, PortGraph::from_adjacency(rev), IsoMode::port_preserving));
}

TEST_CASE("isomorphism is an equivalence relation on the n=3 labelings corpus") {
  auto corpus = enumerate_connected(3, EnumMode::all_port_labelings);
  const int sz = static_cast<int>(corpus.size());
  for (int i = 0; i < sz; ++i) {
    CHECK(are_isomorphic(corpus[i], corpus[i], IsoMode::port_preserving));
    for (int j = 0; j < sz; ++j) {
      const bool ij = are_isomorphic(corpus[i], corpus[j], IsoMode::port_preserving);
      CHECK(ij == are_isomorphic(corpus[j], corpus[i], IsoMode::port_preserving));
      if (!ij) continue;
      for (int k = 0; k < sz; ++k)
        if (are_isomorphic(corpus[j], corpus[k], IsoMode::port_preserving))
          CHECK(are_isomorphic(corpus[i], corpus[k], IsoMode::port_preserving));
    }
  }
}

TEST_CASE("graph stats") {
  auto p5 = generate_family(GraphFamily::path, 5);
  auto s = compute_stats(p5);
  CHECK(s.diameter == 4);
  CHECK(s.max_degree == 2);
  CHECK(s.edge_count == 4);
}

TEST_CASE("graph file format round trips and rejects deviations") {
  auto g = generate_family(GraphFamily::cycle, 4);
  const std::string text = to_text(g);
  CHECK(parse_graph_text(text) == g);
  CHECK(to_text(parse_graph_text(text)) == text);

  CHECK_THROWS_AS(parse_graph_text("n=2\n0: 1->1/0\n1: 0->0/0\n"), GraphError);  // port gap
  CHECK_THROWS_AS(parse_graph_text("n=2\n0: 0->1/0\n1: 0->0/0\n junk"), GraphError);
  CHECK_THROWS_AS(parse_graph_text("n=2\n0: 0->1/0 \n1: 0->0/0\n"), GraphError);  // trailing space
  CHECK_THROWS_AS(parse_graph_text("n=3\n0: 0->1/0\n1: 0->0/0\n"), GraphError);   // missing line
  CHECK_THROWS_AS(parse_graph_text(""), GraphError);
}

TEST_CASE("enumerated graphs all pass validation round trip") {
  for (int n = 2; n <= 4; ++n)
    for (const PortGraph& g : enumerate_connected(n, EnumMode::all_port_labelings))
      CHECK(parse_graph_text(to_text(g)) == g);
}
