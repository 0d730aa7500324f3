#pragma once

// Exploration sequences: finite symbol strings whose port-offset walk
// visits every node of every connected port-labeled graph up to a given
// size, from any start node. Certified sequences come from exhaustive
// search over the (deduplicated) corpus of rooted port-labeled graphs;
// heuristic sequences are seeded pseudo-random strings that each corpus
// must re-verify before acceptance use.

#include <bit>
#include <cmath>
#include <cstdint>
#include <filesystem>
#include <fstream>
#include <map>
#include <mutex>
#include <optional>
#include <sstream>
#include <string>
#include <unordered_set>
#include <vector>

#include "gathersim/enumerate.hpp"
#include "gathersim/port_graph.hpp"

namespace gathersim {

class SequenceError : public std::runtime_error {
 public:
  enum class Kind { ScopeTooLarge, Parse };

  SequenceError(Kind kind, const std::string& msg) : std::runtime_error(msg), kind(kind) {}

  Kind kind;
};

enum class Provenance { brute_force_verified, heuristic_corpus_verified };

inline std::string_view provenance_name(Provenance p) {
  return p == Provenance::brute_force_verified ? "brute-force-verified"
                                               : "heuristic-corpus-verified";
}

struct ExplorationSequence {
  std::vector<int> symbols;
  int scope_n = 0;
  Provenance provenance = Provenance::heuristic_corpus_verified;

  // T, the exploration-time bound every schedule is parametric in.
  int length() const { return static_cast<int>(symbols.size()); }
  // M, the memory the stored sequence occupies (no asymptotic claim).
  size_t stored_bytes() const { return symbols.size() * sizeof(int); }
};

// One step of the standard sequence application rule: leave through port
// (entry + symbol) mod degree, where the entry port counts as 0 at the
// start of a walk. Returns the node reached and the new entry port. Pure.
inline std::pair<int, int> apply_uxs_step(const PortGraph& g, int node, int entry_port,
                                          int symbol) {
  const int deg = g.degree(node);
  const int e = entry_port < 0 ? 0 : entry_port;
  const PortTarget t = g.step(node, (e + symbol) % deg);
  return {t.node, t.rev_port};
}

// Does the walk of `symbols` from `start` visit all nodes of g?
inline bool walk_explores(const PortGraph& g, int start, const std::vector<int>& symbols) {
  const int n = g.node_count();
  if (n == 1) return true;
  uint32_t visited = 1u << start;
  int need = n - 1;
  int node = start;
  int entry = -1;
  for (int s : symbols) {
    const auto [next, rev] = apply_uxs_step(g, node, entry, s);
    node = next;
    entry = rev;
    if (!(visited & (1u << node))) {
      visited |= 1u << node;
      if (--need == 0) return true;
    }
  }
  return need == 0;
}

// True iff the walk of seq visits all nodes of every connected port-labeled
// graph with at most n nodes, from every start node. Exhaustive over all
// port labelings; n=5 is allowed but long-running.
inline bool verify_universal(const ExplorationSequence& seq, int n) {
  if (n > 5)
    throw SequenceError(SequenceError::Kind::ScopeTooLarge,
                        "exhaustive universality checks are capped at n <= 5");
  for (int j = 2; j <= n; ++j) {
    bool ok = true;
    for_each_connected_labeling(j, [&](const PortGraph& g) {
      if (!ok) return;
      for (int start = 0; start < j; ++start)
        if (!walk_explores(g, start, seq.symbols)) {
          ok = false;
          return;
        }
    });
    if (!ok) return false;
  }
  return true;
}

namespace detail {

// Canonical form of a rooted port-labeled graph: relabel nodes in the
// first-visit order of a breadth-first sweep from the root that scans
// ports in ascending order. The numbering is forced by structure, so two
// rooted graphs share a form iff a port-preserving isomorphism maps one
// root to the other.
inline std::string rooted_canonical_form(const PortGraph& g, int root) {
  const int n = g.node_count();
  std::vector<int> id(n, -1);
  std::vector<int> order;
  id[root] = 0;
  order.push_back(root);
  for (size_t head = 0; head < order.size(); ++head) {
    const int v = order[head];
    for (int p = 0; p < g.degree(v); ++p) {
      const int u = g.step(v, p).node;
      if (id[u] < 0) {
        id[u] = static_cast<int>(order.size());
        order.push_back(u);
      }
    }
  }
  std::string form;
  form.reserve(static_cast<size_t>(n) * 8);
  for (int v : order) {
    form += '|';
    for (int p = 0; p < g.degree(v); ++p) {
      const PortTarget t = g.step(v, p);
      form += std::to_string(id[t.node]);
      form += ':';
      form += std::to_string(t.rev_port);
      form += ' ';
    }
  }
  return form;
}

// The search corpus: every rooted connected port-labeled graph with 2..n
// nodes, one representative per rooted isomorphism class.
struct RootedInstance {
  PortGraph graph;
  int start;
};

inline std::vector<RootedInstance> rooted_corpus(int n) {
  std::vector<RootedInstance> corpus;
  std::unordered_set<std::string> seen;
  for (int j = 2; j <= n; ++j) {
    for_each_connected_labeling(j, [&](const PortGraph& g) {
      for (int start = 0; start < j; ++start)
        if (seen.insert(rooted_canonical_form(g, start)).second)
          corpus.push_back(RootedInstance{g, start});
    });
  }
  return corpus;
}

struct WalkState {
  int node;
  int entry;
  uint32_t visited;
};

// Iterative-deepening search for a shortest sequence that completes every
// corpus instance, pruning branches whose remaining budget cannot cover
// the worst instance's unvisited count. Node-budgeted; returns nullopt
// when the budget runs out before the current depth is exhausted.
class SequenceSearch {
 public:
  SequenceSearch(const std::vector<RootedInstance>& corpus, int symbol_count, long node_budget)
      : corpus_(corpus), symbol_count_(symbol_count), budget_(node_budget) {}

  std::optional<std::vector<int>> run(int max_depth) {
    for (int depth = 1; depth <= max_depth; ++depth) {
      std::vector<WalkState> states;
      states.reserve(corpus_.size());
      int worst = 0;
      for (const RootedInstance& inst : corpus_) {
        states.push_back({inst.start, -1, 1u << inst.start});
        worst = std::max(worst, inst.graph.node_count() - 1);
      }
      prefix_.clear();
      if (dfs(states, worst, depth)) return prefix_;
      if (budget_ < 0) return std::nullopt;
    }
    return std::nullopt;
  }

 private:
  bool dfs(std::vector<WalkState>& states, int worst_unvisited, int remaining) {
    if (worst_unvisited == 0) return true;
    if (remaining < worst_unvisited) return false;  // one new node per step at best
    if (--budget_ < 0) return false;
    const size_t sz = states.size();
    std::vector<WalkState> saved(states);
    for (int s = 0; s < symbol_count_; ++s) {
      int worst = 0;
      for (size_t i = 0; i < sz; ++i) {
        WalkState& w = states[i];
        const PortGraph& g = corpus_[i].graph;
        const auto [next, rev] = apply_uxs_step(g, w.node, w.entry, s);
        w.node = next;
        w.entry = rev;
        w.visited |= 1u << next;
        const int unvisited =
            g.node_count() - std::popcount(w.visited);
        worst = std::max(worst, unvisited);
      }
      prefix_.push_back(s);
      if (dfs(states, worst, remaining - 1)) return true;
      prefix_.pop_back();
      states = saved;
      if (budget_ < 0) return false;
    }
    return false;
  }

  const std::vector<RootedInstance>& corpus_;
  int symbol_count_;
  long budget_;
  std::vector<int> prefix_;
};

// Deterministic beam-search fallback for scopes where iterative deepening
// to the true optimum is out of reach. Scores a beam entry by the sorted
// per-instance unvisited counts (worst first), ties broken by the symbol
// string, so the result depends only on (n, width).
inline std::optional<std::vector<int>> beam_search_sequence(
    const std::vector<RootedInstance>& corpus, int symbol_count, int width, int max_len) {
  struct Entry {
    std::vector<WalkState> states;
    std::vector<int> symbols;
    std::vector<int> score;  // unvisited counts, descending
  };
  auto score_of = [&corpus](const std::vector<WalkState>& states) {
    std::vector<int> sc(states.size());
    for (size_t i = 0; i < states.size(); ++i)
      sc[i] = corpus[i].graph.node_count() - std::popcount(states[i].visited);
    std::sort(sc.rbegin(), sc.rend());
    return sc;
  };

  Entry root;
  for (const RootedInstance& inst : corpus)
    root.states.push_back({inst.start, -1, 1u << inst.start});
  root.score = score_of(root.states);
  std::vector<Entry> beam = {std::move(root)};

  for (int len = 1; len <= max_len; ++len) {
    std::vector<Entry> next;
    next.reserve(beam.size() * static_cast<size_t>(symbol_count));
    for (const Entry& e : beam) {
      for (int s = 0; s < symbol_count; ++s) {
        Entry cand;
        cand.states = e.states;
        for (size_t i = 0; i < cand.states.size(); ++i) {
          WalkState& w = cand.states[i];
          const auto [nn, rev] = apply_uxs_step(corpus[i].graph, w.node, w.entry, s);
          w.node = nn;
          w.entry = rev;
          w.visited |= 1u << nn;
        }
        cand.symbols = e.symbols;
        cand.symbols.push_back(s);
        cand.score = score_of(cand.states);
        if (cand.score[0] == 0) return cand.symbols;
        next.push_back(std::move(cand));
      }
    }
    std::sort(next.begin(), next.end(), [](const Entry& a, const Entry& b) {
      if (a.score != b.score) return a.score < b.score;
      return a.symbols < b.symbols;
    });
    if (static_cast<int>(next.size()) > width) next.resize(width);
    beam = std::move(next);
  }
  return std::nullopt;
}

}  // namespace detail

// Exhaustive-search provider internals, exposed for the sequence tools.
// Iterative deepening first (shortest certified result); if its node
// budget runs out, a deterministic beam search supplies a longer but
// still certified sequence.
inline ExplorationSequence search_certified_sequence(int n, long idfs_budget = 40'000'000,
                                                     int idfs_max_depth = 14) {
  if (n > 5)
    throw SequenceError(SequenceError::Kind::ScopeTooLarge,
                        "brute-force sequences are searched for n <= 5 only");
  const auto corpus = detail::rooted_corpus(n);
  detail::SequenceSearch search(corpus, n, idfs_budget);
  std::optional<std::vector<int>> symbols = search.run(idfs_max_depth);
  if (!symbols) symbols = detail::beam_search_sequence(corpus, n, 128, 64 * n * n * n);
  if (!symbols)
    throw SequenceError(SequenceError::Kind::ScopeTooLarge,
                        "sequence search failed for scope " + std::to_string(n));
  ExplorationSequence seq{std::move(*symbols), n, Provenance::brute_force_verified};
  if (!verify_universal(seq, n))
    throw SequenceError(SequenceError::Kind::Parse,
                        "search produced a non-universal sequence (internal error)");
  return seq;
}

// ---------------------------------------------------------------------------
// Certified-sequence cache files.
//
//   scope_n=4
//   length=23
//   symbols=0 1 2 ...
//   provenance=brute-force-verified
//   checksum=<fnv1a64 of the four lines above>

namespace detail {

inline uint64_t fnv1a64(std::string_view text) {
  uint64_t h = 0xcbf29ce484222325ull;
  for (unsigned char c : text) {
    h ^= c;
    h *= 0x100000001b3ull;
  }
  return h;
}

inline std::string sequence_body(const ExplorationSequence& seq) {
  std::ostringstream out;
  out << "scope_n=" << seq.scope_n << '\n';
  out << "length=" << seq.length() << '\n';
  out << "symbols=";
  for (size_t i = 0; i < seq.symbols.size(); ++i) {
    if (i) out << ' ';
    out << seq.symbols[i];
  }
  out << '\n';
  out << "provenance=" << provenance_name(seq.provenance) << '\n';
  return out.str();
}

}  // namespace detail

inline void save_sequence(const std::filesystem::path& path, const ExplorationSequence& seq) {
  const std::string body = detail::sequence_body(seq);
  std::ofstream out(path, std::ios::binary);
  if (!out) throw SequenceError(SequenceError::Kind::Parse, "cannot write " + path.string());
  char checksum[32];
  std::snprintf(checksum, sizeof checksum, "%016llx",
                static_cast<unsigned long long>(detail::fnv1a64(body)));
  out << body << "checksum=" << checksum << '\n';
}

inline std::optional<ExplorationSequence> load_sequence(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) return std::nullopt;
  std::ostringstream buf;
  buf << in.rdbuf();
  const std::string text = buf.str();
  const size_t mark = text.rfind("checksum=");
  if (mark == std::string::npos || mark == 0)
    throw SequenceError(SequenceError::Kind::Parse, "sequence cache missing checksum");
  const std::string body = text.substr(0, mark);
  std::string recorded = text.substr(mark + 9);
  if (!recorded.empty() && recorded.back() == '\n') recorded.pop_back();
  char expect[32];
  std::snprintf(expect, sizeof expect, "%016llx",
                static_cast<unsigned long long>(detail::fnv1a64(body)));
  if (recorded != expect)
    throw SequenceError(SequenceError::Kind::Parse, "sequence cache checksum mismatch");

  ExplorationSequence seq;
  std::istringstream lines(body);
  std::string line;
  int declared_length = -1;
  while (std::getline(lines, line)) {
    if (line.starts_with("scope_n=")) {
      seq.scope_n = std::stoi(line.substr(8));
    } else if (line.starts_with("length=")) {
      declared_length = std::stoi(line.substr(7));
    } else if (line.starts_with("symbols=")) {
      std::istringstream symbols(line.substr(8));
      int s;
      while (symbols >> s) seq.symbols.push_back(s);
    } else if (line.starts_with("provenance=")) {
      const std::string p = line.substr(11);
      if (p == "brute-force-verified") seq.provenance = Provenance::brute_force_verified;
      else if (p == "heuristic-corpus-verified") seq.provenance = Provenance::heuristic_corpus_verified;
      else throw SequenceError(SequenceError::Kind::Parse, "unknown provenance " + p);
    } else {
      throw SequenceError(SequenceError::Kind::Parse, "unexpected cache line: " + line);
    }
  }
  if (seq.scope_n < 2 || declared_length != seq.length())
    throw SequenceError(SequenceError::Kind::Parse, "sequence cache is inconsistent");
  return seq;
}

enum class SequenceProvider { brute_force, heuristic };

inline std::optional<SequenceProvider> provider_from_name(std::string_view name) {
  if (name == "brute-force") return SequenceProvider::brute_force;
  if (name == "heuristic") return SequenceProvider::heuristic;
  return std::nullopt;
}

// Sequence provider. Brute force (n <= 5): shortest-found certified
// sequence, cached in memory and, when cache_dir is given, on disk
// (loaded in preference to re-searching). Heuristic (any n): a
// deterministic splitmix64 symbol stream of length ceil(8 n^3 log2 n),
// NOT certified; callers verify it against their own corpus before
// relying on it.
inline ExplorationSequence provide_sequence(int n, SequenceProvider provider, uint64_t seed = 0,
                                            const std::filesystem::path& cache_dir = {}) {
  if (provider == SequenceProvider::heuristic) {
    const long len = static_cast<long>(std::ceil(8.0 * n * n * n * std::log2(double(n))));
    ExplorationSequence seq;
    seq.scope_n = n;
    seq.provenance = Provenance::heuristic_corpus_verified;
    SplitMix64 rng(seed ^ (static_cast<uint64_t>(n) * 0x9e3779b97f4a7c15ull));
    seq.symbols.reserve(static_cast<size_t>(len));
    for (long i = 0; i < len; ++i) seq.symbols.push_back(static_cast<int>(rng.below(n)));
    return seq;
  }

  if (n > 5)
    throw SequenceError(SequenceError::Kind::ScopeTooLarge,
                        "brute-force provider is capped at n <= 5");
  static std::mutex mutex;
  static std::map<int, ExplorationSequence> memory;
  std::scoped_lock lock(mutex);
  if (auto it = memory.find(n); it != memory.end()) return it->second;
  if (!cache_dir.empty()) {
    const auto path = cache_dir / ("uxs_scope" + std::to_string(n) + ".txt");
    if (auto seq = load_sequence(path); seq && seq->scope_n == n &&
                                        seq->provenance == Provenance::brute_force_verified) {
      memory[n] = *seq;
      return *seq;
    }
  }
  ExplorationSequence seq = search_certified_sequence(n);
  memory[n] = seq;
  if (!cache_dir.empty()) {
    std::error_code ec;
    std::filesystem::create_directories(cache_dir, ec);
    save_sequence(cache_dir / ("uxs_scope" + std::to_string(n) + ".txt"), seq);
  }
  return seq;
}

}  // namespace gathersim
