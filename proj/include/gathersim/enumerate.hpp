#pragma once

// Exhaustive enumeration of small connected graphs up to isomorphism and
// the isomorphism checks the oracles build on. Everything here is sized
// for desk-scale exhaustion (n <= 8 structures, n <= 4 port labelings),
// correctness over speed.

#include <array>
#include <cstdint>
#include <unordered_set>
#include <vector>

#include "gathersim/port_graph.hpp"

namespace gathersim {

// Adjacency-by-bitmask representation for tiny graphs, rows[v] bit u set
// iff edge {u, v}.
using AdjRows = std::array<uint8_t, 8>;

namespace detail {

inline bool rows_connected(const AdjRows& rows, int n) {
  uint32_t reached = 1;
  uint32_t frontier = 1;
  while (frontier != 0) {
    uint32_t next = 0;
    for (int v = 0; v < n; ++v)
      if (frontier & (1u << v)) next |= rows[v];
    frontier = next & ~reached;
    reached |= next;
  }
  return reached == (1u << n) - 1u;
}

// Canonical key: the lexicographically smallest bit string of the upper
// triangle, read column by column as vertices are placed, over all vertex
// orderings. Computed by backtracking with prefix pruning.
struct CanonSearch {
  const AdjRows& rows;
  int n;
  int total_bits;
  std::array<int, 8> perm{};
  uint64_t best = ~0ull;

  CanonSearch(const AdjRows& r, int nn) : rows(r), n(nn), total_bits(nn * (nn - 1) / 2) {}

  void run(int pos, int bits_done, uint64_t key, uint32_t used) {
    if (pos == n) {
      if (key < best) best = key;
      return;
    }
    for (int v = 0; v < n; ++v) {
      if (used & (1u << v)) continue;
      uint64_t k = key;
      for (int j = 0; j < pos; ++j) k = (k << 1) | ((rows[v] >> perm[j]) & 1u);
      const int nb = bits_done + pos;
      if (best != ~0ull && k > (best >> (total_bits - nb))) continue;
      perm[pos] = v;
      run(pos + 1, nb, k, used | (1u << v));
    }
  }
};

}  // namespace detail

inline uint64_t canonical_key(const AdjRows& rows, int n) {
  if (n == 1) return 0;
  detail::CanonSearch search(rows, n);
  search.run(0, 0, 0, 0);
  return search.best;
}

// Inverse of the canonical packing: expands a key back into rows.
inline AdjRows rows_from_key(uint64_t key, int n) {
  AdjRows rows{};
  int bit = n * (n - 1) / 2;
  for (int i = 1; i < n; ++i) {
    for (int j = 0; j < i; ++j) {
      --bit;
      if ((key >> bit) & 1u) {
        rows[i] |= static_cast<uint8_t>(1u << j);
        rows[j] |= static_cast<uint8_t>(1u << i);
      }
    }
  }
  return rows;
}

inline AdjRows rows_of(const PortGraph& g) {
  AdjRows rows{};
  for (int v = 0; v < g.node_count(); ++v)
    for (const PortTarget& t : g.ports(v)) rows[v] |= static_cast<uint8_t>(1u << t.node);
  return rows;
}

enum class EnumMode { structures, all_port_labelings };

// All graphs on exactly `n` vertices up to isomorphism, as canonical keys.
// Grown one vertex at a time; every (j+1)-vertex graph arises from some
// j-vertex graph by attaching the new vertex to a neighborhood subset, so
// the sweep is exhaustive.
inline std::vector<uint64_t> all_graph_keys(int n) {
  std::vector<uint64_t> level = {0};  // single vertex
  for (int j = 1; j < n; ++j) {
    std::unordered_set<uint64_t> next;
    for (uint64_t key : level) {
      const AdjRows base = rows_from_key(key, j);
      for (uint32_t nb = 0; nb < (1u << j); ++nb) {
        AdjRows rows = base;
        rows[j] = static_cast<uint8_t>(nb);
        for (int u = 0; u < j; ++u)
          if (nb & (1u << u)) rows[u] |= static_cast<uint8_t>(1u << j);
        next.insert(canonical_key(rows, j + 1));
      }
    }
    level.assign(next.begin(), next.end());
  }
  std::sort(level.begin(), level.end());
  return level;
}

namespace detail {

// Streams every port labeling of the structure given by `rows`: each node
// independently assigns its ports to its neighbors in any permutation.
template <class Fn>
void for_each_port_labeling(const AdjRows& rows, int n, Fn&& fn) {
  std::vector<std::vector<int>> nbr(n);
  for (int v = 0; v < n; ++v)
    for (int u = 0; u < n; ++u)
      if (rows[v] & (1u << u)) nbr[v].push_back(u);
  std::vector<std::vector<int>> perm = nbr;
  while (true) {
    std::vector<std::vector<PortTarget>> ports(n);
    for (int v = 0; v < n; ++v) {
      ports[v].resize(perm[v].size());
      for (int p = 0; p < static_cast<int>(perm[v].size()); ++p) {
        const int u = perm[v][p];
        int rev = -1;
        for (int q = 0; q < static_cast<int>(perm[u].size()); ++q)
          if (perm[u][q] == v) rev = q;
        ports[v][p] = PortTarget{u, rev};
      }
    }
    fn(PortGraph::validate(std::move(ports)));
    // Odometer over per-node permutations.
    int v = 0;
    while (v < n && !std::next_permutation(perm[v].begin(), perm[v].end())) ++v;
    if (v == n) break;
  }
}

}  // namespace detail

// Streams every connected port-labeled graph on exactly n nodes (every
// labeling of every structure). Used by the exhaustive sequence verifier,
// which at n=5 cannot afford to materialize the corpus.
template <class Fn>
void for_each_connected_labeling(int n, Fn&& fn) {
  for (uint64_t key : all_graph_keys(n)) {
    const AdjRows rows = rows_from_key(key, n);
    if (!detail::rows_connected(rows, n)) continue;
    detail::for_each_port_labeling(rows, n, fn);
  }
}

// Every connected simple graph on n unlabeled nodes, one canonical port
// labeling each (structures mode) or every port labeling of every
// structure (all-labelings mode). Deterministic order.
inline std::vector<PortGraph> enumerate_connected(int n, EnumMode mode) {
  if (n < 1 || n > 8)
    throw GraphError(GraphError::Kind::ScopeTooLarge, "structure enumeration is capped at n <= 8");
  if (mode == EnumMode::all_port_labelings && n > 4)
    throw GraphError(GraphError::Kind::ScopeTooLarge,
                     "all-port-labelings enumeration is capped at n <= 4 (labeling count is "
                     "the product of per-node degree factorials)");
  std::vector<PortGraph> out;
  for (uint64_t key : all_graph_keys(n)) {
    const AdjRows rows = rows_from_key(key, n);
    if (!detail::rows_connected(rows, n)) continue;
    if (mode == EnumMode::structures) {
      std::vector<std::vector<int>> nbr(n);
      for (int v = 0; v < n; ++v)
        for (int u = 0; u < n; ++u)
          if (rows[v] & (1u << u)) nbr[v].push_back(u);
      out.push_back(PortGraph::from_adjacency(nbr));
    } else {
      detail::for_each_port_labeling(rows, n, [&out](PortGraph g) { out.push_back(std::move(g)); });
    }
  }
  return out;
}

enum class IsoMode { underlying, port_preserving };

namespace detail {

// A port-preserving isomorphism of a connected graph is fully determined
// by the image of one node: ports force the rest.
inline bool port_preserving_iso(const PortGraph& a, const PortGraph& b) {
  const int n = a.node_count();
  if (n != b.node_count()) return false;
  for (int w0 = 0; w0 < n; ++w0) {
    std::vector<int> image(n, -1);
    std::vector<bool> taken(n, false);
    std::vector<int> stack = {0};
    image[0] = w0;
    taken[w0] = true;
    bool ok = a.degree(0) == b.degree(w0);
    while (ok && !stack.empty()) {
      const int v = stack.back();
      stack.pop_back();
      const int w = image[v];
      for (int p = 0; p < a.degree(v); ++p) {
        const PortTarget ta = a.step(v, p);
        const PortTarget tb = b.step(w, p);
        if (ta.rev_port != tb.rev_port) { ok = false; break; }
        if (image[ta.node] == -1) {
          if (taken[tb.node] || a.degree(ta.node) != b.degree(tb.node)) { ok = false; break; }
          image[ta.node] = tb.node;
          taken[tb.node] = true;
          stack.push_back(ta.node);
        } else if (image[ta.node] != tb.node) {
          ok = false;
          break;
        }
      }
    }
    if (ok) return true;
  }
  return false;
}

}  // namespace detail

inline bool are_isomorphic(const PortGraph& g1, const PortGraph& g2, IsoMode mode) {
  if (g1.node_count() != g2.node_count()) return false;
  if (g1.edge_count() != g2.edge_count()) return false;
  if (mode == IsoMode::underlying) {
    const int n = g1.node_count();
    if (n > 8)
      throw GraphError(GraphError::Kind::ScopeTooLarge,
                       "underlying isomorphism uses exhaustive canonical forms, capped at n <= 8");
    return canonical_key(rows_of(g1), n) == canonical_key(rows_of(g2), n);
  }
  return detail::port_preserving_iso(g1, g2);
}

}  // namespace gathersim
