// Command-line interface: simulations, sweeps, lemma checks, sequence
// management, and graph utilities.

#include <cmath>
#include <cstdio>
#include <fstream>
#include <iostream>

#include <CLI11.hpp>
#include <json.hpp>

#include "gathersim/enumerate.hpp"
#include "gathersim/exploration.hpp"
#include "gathersim/oracle.hpp"
#include "gathersim/runner.hpp"

using namespace gathersim;

namespace {

void add_graph_flags(CLI::App* cmd, RunManifest& m) {
  cmd->add_option("--graph", m.graph_file, "graph file (strict text format)");
  cmd->add_option("--family", m.family, "path | cycle | complete | star | random-connected");
  cmd->add_option("--n", m.n, "family size");
  cmd->add_option("--seed", m.graph_seed, "family seed (random-connected)");
}

void add_run_flags(CLI::App* cmd, RunManifest& m) {
  cmd->add_option("--robots", m.robots, "explicit placement, e.g. 2@0,3@1");
  cmd->add_option("--k", m.k, "robot count for generated placements");
  cmd->add_option("--placement", m.placement,
                  "dispersed-random | adjacent-pair | same-node | spread");
  cmd->add_option("--placement-seed", m.placement_seed, "placement seed");
  cmd->add_option("--algorithm", m.algorithm, "uxs | undispersed | hop-meeting | faster");
  cmd->add_option("--hop-i", m.hop_i, "hop radius for hop-meeting (1..5)");
  cmd->add_option("--b", m.b, "ID-range exponent, labels in [1, n^b] (>= 2)");
  cmd->add_flag("--delta-aware", m.delta_aware,
                "use the maximum degree instead of n-1 in cycle lengths");
  cmd->add_option("--start-step", m.start_step,
                  "start the faster algorithm at this step (hop info known)");
  cmd->add_option("--uxs-provider", m.uxs_provider, "auto | brute-force | heuristic");
  cmd->add_option("--uxs-seed", m.uxs_seed, "heuristic sequence seed");
  cmd->add_option("--cache-dir", m.cache_dir, "certified sequence cache directory");
  cmd->add_option("--max-rounds", m.max_rounds, "round cap (0: 4x the program bound)");
}

int cmd_simulate(const RunManifest& manifest) {
  RunManifest m = manifest;
  if (m.b < 2) {
    std::cerr << "b must be at least 2\n";
    return kExitValidation;
  }
  const RunOutcome out = run_manifest(m);
  if (out.exit_code != kExitOk) {
    std::cerr << "simulate: " << out.message << "\n";
    return out.exit_code;
  }
  write_run_outputs(m, out);
  std::cout << metrics_text(m, out);
  return kExitOk;
}

struct SweepSpec {
  std::vector<std::string> families;
  std::vector<int> sizes;
  int k = 0;
  std::string k_rule;  // half-plus-one | third-plus-one
  std::string placement = "dispersed-random";
  int runs = 1;
  uint64_t seed = 0;
  RunManifest base;  // algorithm and config flags
  std::string out;
};

int cmd_sweep(const SweepSpec& spec) {
  if (spec.families.empty() || spec.sizes.empty() || spec.runs < 1) {
    std::cerr << "sweep: empty corpus\n";
    return kExitValidation;
  }
  nlohmann::json sweep_manifest;
  sweep_manifest["families"] = spec.families;
  sweep_manifest["sizes"] = spec.sizes;
  sweep_manifest["k"] = spec.k;
  sweep_manifest["k_rule"] = spec.k_rule;
  sweep_manifest["placement"] = spec.placement;
  sweep_manifest["runs"] = spec.runs;
  sweep_manifest["seed"] = spec.seed;
  sweep_manifest["algorithm"] = spec.base.algorithm;
  sweep_manifest["b"] = spec.base.b;

  std::ostringstream table;
  table << "# " << kToolVersion << '\n';
  table << "# manifest=" << sweep_manifest.dump() << '\n';
  table << "family,n,k,runs,gathered,mean_gathering_round,max_gathering_round\n";
  int worst = kExitOk;
  std::ostringstream slopes;
  for (const std::string& family : spec.families) {
    std::vector<double> log_n, log_mean;
    for (int n : spec.sizes) {
      int k = spec.k;
      if (spec.k_rule == "half-plus-one") k = n / 2 + 1;
      else if (spec.k_rule == "third-plus-one") k = n / 3 + 1;
      else if (!spec.k_rule.empty()) {
        std::cerr << "sweep: unknown k rule '" << spec.k_rule << "'\n";
        return kExitValidation;
      }
      long max_round = -1;
      double sum_rounds = 0;
      int gathered = 0;
      for (int run = 0; run < spec.runs; ++run) {
        RunManifest m = spec.base;
        m.family = family;
        m.n = n;
        m.k = k;
        m.placement = spec.placement;
        m.placement_seed = spec.seed + static_cast<uint64_t>(run);
        const RunOutcome out = run_manifest(m);
        if (out.exit_code != kExitOk) {
          worst = std::max(worst, out.exit_code);
          std::cerr << "sweep run failed (" << family << " n=" << n << " run=" << run
                    << "): " << out.message << "\n";
          continue;
        }
        long ground = -1;
        for (long t : out.stats.termination_round) ground = std::max(ground, t);
        gathered += out.gathered ? 1 : 0;
        sum_rounds += static_cast<double>(ground);
        max_round = std::max(max_round, ground);
      }
      const double mean = gathered > 0 ? sum_rounds / spec.runs : -1.0;
      char mean_text[32];
      std::snprintf(mean_text, sizeof mean_text, "%.3f", mean);
      table << family << ',' << n << ',' << k << ',' << spec.runs << ',' << gathered << ','
            << mean_text << ',' << max_round << '\n';
      if (mean > 0) {
        log_n.push_back(std::log(static_cast<double>(n)));
        log_mean.push_back(std::log(mean));
      }
    }
    if (log_n.size() >= 2) {
      double sx = 0, sy = 0, sxx = 0, sxy = 0;
      for (size_t i = 0; i < log_n.size(); ++i) {
        sx += log_n[i];
        sy += log_mean[i];
        sxx += log_n[i] * log_n[i];
        sxy += log_n[i] * log_mean[i];
      }
      const double m = static_cast<double>(log_n.size());
      const double slope = (m * sxy - sx * sy) / (m * sxx - sx * sx);
      char slope_text[32];
      std::snprintf(slope_text, sizeof slope_text, "%.3f", slope);
      slopes << "# slope family=" << family << " value=" << slope_text << '\n';
    }
  }
  table << slopes.str();
  if (spec.out.empty()) {
    std::cout << table.str();
  } else {
    std::ofstream f(spec.out, std::ios::binary);
    f << table.str();
    std::cout << "sweep written to " << spec.out << "\n";
  }
  return worst;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"gathersim: deterministic gathering of labeled robots on anonymous "
               "port-labeled graphs"};
  app.require_subcommand(1);

  // simulate
  RunManifest m;
  std::string manifest_file;
  auto* simulate = app.add_subcommand("simulate", "run one simulation");
  add_graph_flags(simulate, m);
  add_run_flags(simulate, m);
  simulate->add_option("--trace-out", m.trace_out, "trace output file");
  simulate->add_option("--metrics-out", m.metrics_out, "metrics output file");
  simulate->add_option("--manifest", manifest_file, "load a run manifest (json)");

  // sweep
  SweepSpec sweep;
  auto* sweep_cmd = app.add_subcommand("sweep", "run a corpus of simulations");
  sweep_cmd->add_option("--family", sweep.families, "families to sweep (repeatable)");
  sweep_cmd->add_option("--sizes", sweep.sizes, "graph sizes (repeatable or comma list)")
      ->delimiter(',');
  sweep_cmd->add_option("--k", sweep.k, "fixed robot count");
  sweep_cmd->add_option("--k-rule", sweep.k_rule, "half-plus-one | third-plus-one");
  sweep_cmd->add_option("--placement", sweep.placement, "placement scheme");
  sweep_cmd->add_option("--runs", sweep.runs, "runs per configuration");
  sweep_cmd->add_option("--seed", sweep.seed, "base placement seed");
  sweep_cmd->add_option("--algorithm", sweep.base.algorithm, "algorithm for every run");
  sweep_cmd->add_option("--b", sweep.base.b, "ID-range exponent");
  sweep_cmd->add_option("--uxs-provider", sweep.base.uxs_provider, "sequence provider");
  sweep_cmd->add_option("--uxs-seed", sweep.base.uxs_seed, "heuristic sequence seed");
  sweep_cmd->add_option("--cache-dir", sweep.base.cache_dir, "sequence cache directory");
  sweep_cmd->add_option("--out", sweep.out, "table output file");

  // lemma
  int lemma_n_max = 8, lemma_c = 2, lemma_bound = -1;
  std::string lemma_out;
  auto* lemma = app.add_subcommand("lemma", "exhaustive hop-distance lemma check");
  lemma->add_option("--n-max", lemma_n_max, "largest structure size (<= 8)");
  lemma->add_option("--c", lemma_c, "density parameter, k = floor(n/c)+1");
  lemma->add_option("--bound", lemma_bound, "assert this bound instead of 2c-2");
  lemma->add_option("--out", lemma_out, "report output file");

  // uxs
  int uxs_n = 0;
  std::string uxs_provider = "brute-force", uxs_cache, uxs_save;
  uint64_t uxs_seed = 0;
  bool uxs_verify = false;
  auto* uxs = app.add_subcommand(
      "uxs", "provide or verify exploration sequences (exhaustive verification is "
             "capped at scope 4; scope 5 runs long)");
  uxs->add_option("--n", uxs_n, "universality scope")->required();
  uxs->add_option("--provider", uxs_provider, "brute-force | heuristic");
  uxs->add_option("--seed", uxs_seed, "heuristic seed");
  uxs->add_option("--cache-dir", uxs_cache, "cache directory");
  uxs->add_option("--save", uxs_save, "write the sequence to this file");
  uxs->add_flag("--verify", uxs_verify, "run the exhaustive verifier on the result");

  // graph
  RunManifest graph_m;
  std::string graph_out, graph_validate;
  auto* graph = app.add_subcommand("graph", "generate or validate graph files");
  add_graph_flags(graph, graph_m);
  graph->add_option("--validate", graph_validate, "parse and validate this file");
  graph->add_option("--out", graph_out, "output file (default stdout)");

  // enumerate
  int enum_n = 0;
  std::string enum_mode = "structures";
  bool enum_count_only = false;
  auto* enumerate = app.add_subcommand(
      "enumerate", "connected graphs up to isomorphism (structures: n <= 8; "
                   "all-port-labelings: n <= 4, the count is the product of per-node "
                   "degree factorials)");
  enumerate->add_option("--n", enum_n, "node count")->required();
  enumerate->add_option("--mode", enum_mode, "structures | all-port-labelings");
  enumerate->add_flag("--count-only", enum_count_only, "print only the count");

  CLI11_PARSE(app, argc, argv);

  try {
    if (simulate->parsed()) {
      if (!manifest_file.empty()) {
        std::ifstream f(manifest_file);
        if (!f) {
          std::cerr << "cannot open manifest " << manifest_file << "\n";
          return kExitValidation;
        }
        nlohmann::json j;
        f >> j;
        RunManifest loaded = RunManifest::from_json(j);
        loaded.trace_out = m.trace_out.empty() ? loaded.trace_out : m.trace_out;
        loaded.metrics_out = m.metrics_out.empty() ? loaded.metrics_out : m.metrics_out;
        return cmd_simulate(loaded);
      }
      return cmd_simulate(m);
    }
    if (sweep_cmd->parsed()) return cmd_sweep(sweep);
    if (lemma->parsed()) {
      const LemmaReport report = check_hop_lemma(lemma_n_max, lemma_c, lemma_bound);
      const std::string text = render(report);
      if (lemma_out.empty()) {
        std::cout << text;
      } else {
        std::ofstream f(lemma_out, std::ios::binary);
        f << text;
      }
      return report.pass ? kExitOk : kExitOracle;
    }
    if (uxs->parsed()) {
      const auto provider = provider_from_name(uxs_provider);
      if (!provider) {
        std::cerr << "unknown provider '" << uxs_provider << "'\n";
        return kExitValidation;
      }
      const ExplorationSequence seq = provide_sequence(uxs_n, *provider, uxs_seed, uxs_cache);
      std::cout << "scope_n=" << seq.scope_n << " length=" << seq.length()
                << " provenance=" << provenance_name(seq.provenance)
                << " stored_bytes=" << seq.stored_bytes() << "\n";
      if (!uxs_save.empty()) save_sequence(uxs_save, seq);
      if (uxs_verify) {
        const bool ok = verify_universal(seq, uxs_n);
        std::cout << "verify_universal(" << uxs_n << ")=" << (ok ? "true" : "false") << "\n";
        if (!ok) return kExitOracle;
      }
      return kExitOk;
    }
    if (graph->parsed()) {
      if (!graph_validate.empty()) {
        std::ifstream f(graph_validate, std::ios::binary);
        if (!f) {
          std::cerr << "cannot open " << graph_validate << "\n";
          return kExitValidation;
        }
        const PortGraph g = read_graph(f);
        const GraphStats stats = compute_stats(g);
        std::cout << "valid: n=" << g.node_count() << " m=" << g.edge_count()
                  << " diameter=" << stats.diameter << " max_degree=" << stats.max_degree
                  << "\n";
        return kExitOk;
      }
      const PortGraph g = detail::load_graph(graph_m);
      if (graph_out.empty()) {
        write_graph(std::cout, g);
      } else {
        std::ofstream f(graph_out, std::ios::binary);
        write_graph(f, g);
      }
      return kExitOk;
    }
    if (enumerate->parsed()) {
      const EnumMode mode = enum_mode == "all-port-labelings" ? EnumMode::all_port_labelings
                                                              : EnumMode::structures;
      const auto graphs = enumerate_connected(enum_n, mode);
      std::cout << "count=" << graphs.size() << "\n";
      if (!enum_count_only)
        for (const PortGraph& g : graphs) std::cout << to_text(g);
      return kExitOk;
    }
  } catch (const GraphError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitValidation;
  } catch (const SequenceError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitValidation;
  } catch (const OracleError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitValidation;
  } catch (const SimError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return e.kind == SimError::Kind::RoundLimitExceeded ? kExitRoundLimit : kExitValidation;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitValidation;
  }
  return kExitOk;
}
