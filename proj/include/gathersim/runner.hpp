#pragma once

// RunManifest: everything that determines a run, serialized into every
// output file so any result can be reproduced byte for byte.

#include <fstream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <json.hpp>

#include "gathersim/gathering.hpp"
#include "gathersim/oracle.hpp"
#include "gathersim/port_graph.hpp"
#include "gathersim/sim.hpp"

namespace gathersim {

struct RunManifest {
  // Graph source: a file, or a family with size and seed.
  std::string graph_file;
  std::string family;
  int n = 0;
  uint64_t graph_seed = 0;

  // Placement: an explicit "label@node,label@node" list, or k robots
  // placed by a named scheme.
  std::string robots;
  int k = 0;
  std::string placement;  // dispersed-random | adjacent-pair | same-node | spread
  uint64_t placement_seed = 0;

  // Algorithm and configuration.
  std::string algorithm;  // uxs | undispersed | hop-meeting | faster
  int hop_i = 1;
  int b = 2;
  bool delta_aware = false;
  int start_step = 1;
  std::string uxs_provider = "auto";  // auto | brute-force | heuristic
  uint64_t uxs_seed = 0;
  std::string cache_dir;
  long max_rounds = 0;

  // Output paths (empty: keep in memory only).
  std::string trace_out;
  std::string metrics_out;

  nlohmann::json to_json() const {
    nlohmann::json j;
    j["graph_file"] = graph_file;
    j["family"] = family;
    j["n"] = n;
    j["graph_seed"] = graph_seed;
    j["robots"] = robots;
    j["k"] = k;
    j["placement"] = placement;
    j["placement_seed"] = placement_seed;
    j["algorithm"] = algorithm;
    j["hop_i"] = hop_i;
    j["b"] = b;
    j["delta_aware"] = delta_aware;
    j["start_step"] = start_step;
    j["uxs_provider"] = uxs_provider;
    j["uxs_seed"] = uxs_seed;
    j["cache_dir"] = cache_dir;
    j["max_rounds"] = max_rounds;
    return j;
  }

  static RunManifest from_json(const nlohmann::json& j) {
    RunManifest m;
    m.graph_file = j.value("graph_file", "");
    m.family = j.value("family", "");
    m.n = j.value("n", 0);
    m.graph_seed = j.value("graph_seed", uint64_t{0});
    m.robots = j.value("robots", "");
    m.k = j.value("k", 0);
    m.placement = j.value("placement", "");
    m.placement_seed = j.value("placement_seed", uint64_t{0});
    m.algorithm = j.value("algorithm", "");
    m.hop_i = j.value("hop_i", 1);
    m.b = j.value("b", 2);
    m.delta_aware = j.value("delta_aware", false);
    m.start_step = j.value("start_step", 1);
    m.uxs_provider = j.value("uxs_provider", "auto");
    m.uxs_seed = j.value("uxs_seed", uint64_t{0});
    m.cache_dir = j.value("cache_dir", "");
    m.max_rounds = j.value("max_rounds", 0L);
    return m;
  }

  std::string to_line() const { return to_json().dump(); }
};

// Exit codes of the command-line surface.
inline constexpr int kExitOk = 0;
inline constexpr int kExitValidation = 2;
inline constexpr int kExitOracle = 3;
inline constexpr int kExitRoundLimit = 4;

struct RunOutcome {
  std::optional<PortGraph> graph;
  std::vector<RobotSpec> robot_specs;
  Trace trace;
  RunStats stats;
  std::optional<Schedule> sched;  // faster only
  bool gathered = false;
  bool oracles_pass = false;
  int exit_code = kExitOk;
  std::string message;
};

namespace detail {

inline std::vector<RobotSpec> parse_robot_list(const std::string& text) {
  std::vector<RobotSpec> robots;
  std::istringstream in(text);
  std::string item;
  while (std::getline(in, item, ',')) {
    const size_t at = item.find('@');
    if (at == std::string::npos || at == 0 || at + 1 >= item.size())
      throw SimError(SimError::Kind::Config, "robot list entries must look like label@node");
    robots.push_back(RobotSpec{std::stoi(item.substr(0, at)), std::stoi(item.substr(at + 1))});
  }
  if (robots.empty()) throw SimError(SimError::Kind::Config, "empty robot list");
  return robots;
}

inline std::vector<RobotSpec> place_robots(const PortGraph& g, const RunManifest& m) {
  if (!m.robots.empty()) return parse_robot_list(m.robots);
  if (m.k < 1) throw SimError(SimError::Kind::Config, "placement needs k >= 1");
  const int n = g.node_count();
  std::vector<RobotSpec> robots;
  if (m.placement == "same-node") {
    for (int i = 0; i < m.k; ++i) robots.push_back({i + 1, 0});
  } else if (m.placement == "adjacent-pair") {
    if (m.k != 2) throw SimError(SimError::Kind::Config, "adjacent-pair places exactly 2 robots");
    robots.push_back({1, 0});
    robots.push_back({2, g.step(0, 0).node});
  } else if (m.placement == "dispersed-random") {
    if (m.k > n)
      throw SimError(SimError::Kind::Config, "dispersed placement needs k <= n");
    std::vector<int> nodes(n);
    for (int v = 0; v < n; ++v) nodes[v] = v;
    SplitMix64 rng(m.placement_seed);
    for (int v = n - 1; v > 0; --v)
      std::swap(nodes[v], nodes[rng.below(static_cast<uint64_t>(v) + 1)]);
    for (int i = 0; i < m.k; ++i) robots.push_back({i + 1, nodes[i]});
  } else if (m.placement == "spread") {
    if (m.k > n) throw SimError(SimError::Kind::Config, "spread placement needs k <= n");
    std::vector<int> chosen = {0};
    while (static_cast<int>(chosen.size()) < m.k) {
      int best = -1, best_dist = -1;
      for (int v = 0; v < n; ++v) {
        int d = n + 1;
        for (int c : chosen) d = std::min(d, shortest_path_distance(g, v, c));
        if (d > best_dist) {
          best_dist = d;
          best = v;
        }
      }
      chosen.push_back(best);
    }
    for (int i = 0; i < m.k; ++i) robots.push_back({i + 1, chosen[i]});
  } else {
    throw SimError(SimError::Kind::Config, "unknown placement scheme '" + m.placement + "'");
  }
  return robots;
}

inline PortGraph load_graph(const RunManifest& m) {
  if (!m.graph_file.empty()) {
    std::ifstream in(m.graph_file, std::ios::binary);
    if (!in) throw GraphError(GraphError::Kind::Parse, "cannot open " + m.graph_file);
    return read_graph(in);
  }
  const auto family = family_from_name(m.family);
  if (!family) throw GraphError(GraphError::Kind::Parse, "unknown family '" + m.family + "'");
  return generate_family(*family, m.n, m.graph_seed);
}

inline ExplorationSequence sequence_for(const RunManifest& m, int n) {
  std::string provider = m.uxs_provider;
  if (provider == "auto") provider = n <= 5 ? "brute-force" : "heuristic";
  const auto p = provider_from_name(provider);
  if (!p) throw SequenceError(SequenceError::Kind::Parse, "unknown provider '" + provider + "'");
  return provide_sequence(n, *p, m.uxs_seed, m.cache_dir);
}

}  // namespace detail

// Runs one manifest end to end: graph, placement, program, simulation,
// then the trace-level oracles. Exit 0 means gathered with detection and
// every oracle passed.
inline RunOutcome run_manifest(const RunManifest& m) {
  RunOutcome out;
  try {
    PortGraph g = detail::load_graph(m);
    const int n = g.node_count();
    out.robot_specs = detail::place_robots(g, m);
    SimConfig cfg;
    cfg.b = m.b;
    cfg.max_rounds = m.max_rounds;
    cfg.delta_aware = m.delta_aware;
    const int delta = m.delta_aware ? compute_stats(g).max_degree : 0;

    long dichotomy_offset = 0;
    if (m.algorithm == "undispersed") {
      UndispersedGathering prog(n);
      std::tie(out.trace, out.stats) = run_with_stats(g, out.robot_specs, prog, cfg);
    } else if (m.algorithm == "uxs") {
      UxsGathering prog(n, m.b, detail::sequence_for(m, n));
      std::tie(out.trace, out.stats) = run_with_stats(g, out.robot_specs, prog, cfg);
    } else if (m.algorithm == "hop-meeting") {
      if (m.hop_i < 1 || m.hop_i > 5)
        throw SimError(SimError::Kind::Config, "hop radius must be in [1, 5]");
      HopMeeting prog(m.hop_i, n, m.b, m.delta_aware, delta);
      std::tie(out.trace, out.stats) = run_with_stats(g, out.robot_specs, prog, cfg);
    } else if (m.algorithm == "faster") {
      FasterGathering prog(n, m.b, detail::sequence_for(m, n), m.start_step, m.delta_aware,
                           delta);
      out.sched = prog.sched;
      dichotomy_offset = prog.sched.s[m.start_step - 1];
      std::tie(out.trace, out.stats) = run_with_stats(g, out.robot_specs, prog, cfg);
    } else {
      throw SimError(SimError::Kind::Config, "unknown algorithm '" + m.algorithm + "'");
    }
    out.graph = std::move(g);

    if (!out.stats.all_terminated)
      throw SimError(SimError::Kind::RoundLimitExceeded,
                     "robots still active at the round cap");
    out.gathered = out.stats.gathered_round >= 0;
    out.oracles_pass = check_detection_soundness(out.trace);
    if (out.sched)
      out.oracles_pass =
          out.oracles_pass && check_step_dichotomy(out.trace, *out.sched, dichotomy_offset);
    if (!out.gathered) {
      out.exit_code = kExitOracle;
      out.message = "run completed without gathering";
    } else if (!out.oracles_pass) {
      out.exit_code = kExitOracle;
      out.message = "oracle violation";
    }
  } catch (const GraphError& e) {
    out.exit_code = kExitValidation;
    out.message = e.what();
  } catch (const SequenceError& e) {
    out.exit_code = kExitValidation;
    out.message = e.what();
  } catch (const SimError& e) {
    switch (e.kind) {
      case SimError::Kind::RoundLimitExceeded: out.exit_code = kExitRoundLimit; break;
      case SimError::Kind::Config: out.exit_code = kExitValidation; break;
      default: out.exit_code = kExitOracle; break;  // IllegalMove, BudgetExceeded
    }
    out.message = e.what();
  } catch (const std::exception& e) {
    out.exit_code = kExitValidation;
    out.message = e.what();
  }
  return out;
}

// Metrics: delimited text with a fixed header, robots in ascending label
// order. gathering_round is the round all robots completed (max
// termination round), stable_colocation_round the first round from which
// everyone stayed together.
inline std::string metrics_text(const RunManifest& m, const RunOutcome& out) {
  std::ostringstream text;
  text << "# " << kToolVersion << '\n';
  text << "# manifest=" << m.to_line() << '\n';
  text << "key,label,value\n";
  long gathering_round = -1;
  for (long t : out.stats.termination_round) gathering_round = std::max(gathering_round, t);
  text << "total_rounds," << '-' << ',' << out.stats.last_round + 1 << '\n';
  text << "gathering_round," << '-' << ',' << gathering_round << '\n';
  text << "stable_colocation_round," << '-' << ',' << out.stats.gathered_round << '\n';
  text << "gathered," << '-' << ',' << (out.gathered ? 1 : 0) << '\n';
  std::vector<size_t> order(out.robot_specs.size());
  for (size_t i = 0; i < order.size(); ++i) order[i] = i;
  std::sort(order.begin(), order.end(), [&](size_t a, size_t b) {
    return out.robot_specs[a].label < out.robot_specs[b].label;
  });
  for (size_t i : order)
    text << "moves," << out.robot_specs[i].label << ',' << out.stats.move_count[i] << '\n';
  for (size_t i : order)
    text << "termination_round," << out.robot_specs[i].label << ','
         << out.stats.termination_round[i] << '\n';
  return text.str();
}

inline void write_run_outputs(const RunManifest& m, const RunOutcome& out) {
  if (!m.trace_out.empty()) {
    std::ofstream f(m.trace_out, std::ios::binary);
    write_trace(f, out.trace, m.to_line());
  }
  if (!m.metrics_out.empty()) {
    std::ofstream f(m.metrics_out, std::ios::binary);
    f << metrics_text(m, out);
  }
}

}  // namespace gathersim
