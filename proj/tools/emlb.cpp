// Command-line driver: simulate, sweep, fairness, mixing and verify.

#include "emlb/emlb.hpp"

#include <CLI11.hpp>

#include <cstdio>
#include <fstream>
#include <iostream>
#include <string>
#include <vector>

namespace {

using namespace emlb;

struct RunOptions {
  std::size_t n = 64;
  double p = 0.5;
  double q = 0.5;
  std::string matcher = "lr";
  std::string init_graph = "empty";
  std::string init_load = "point:1024";
  std::uint64_t trials = 10;
  std::uint64_t seed = 1;
  std::uint64_t cap = 0;
  bool ledger = false;
  double eps = 0.25;
  double theta = 0.0;
  unsigned threads = 0;
  std::string out;
  std::string format = "csv";
  bool no_timing = false;
};

void add_run_flags(CLI::App& cmd, RunOptions& o, bool scalar_grid) {
  if (scalar_grid) {
    cmd.add_option("--n", o.n, "vertex count")->check(CLI::PositiveNumber);
    cmd.add_option("--p", o.p, "edge birth probability in (0,1]");
    cmd.add_option("--q", o.q, "edge death probability in [0,1)");
    cmd.add_option("--matcher", o.matcher, "simple, uniform-edge, lr or ds");
    cmd.add_option("--init-load", o.init_load, "point:K, two-level:LO,HI,COUNT, uniform:K[,SEED], file:PATH");
  }
  cmd.add_option("--init-graph", o.init_graph, "empty, complete, stationary or file:PATH");
  cmd.add_option("--trials", o.trials, "trials per experiment")->check(CLI::PositiveNumber);
  cmd.add_option("--seed", o.seed, "master seed");
  cmd.add_option("--cap", o.cap, "step cap per trial (default 10x the theorem bound)");
  cmd.add_flag("--ledger", o.ledger, "co-advance and check the token ledger");
  cmd.add_option("--eps", o.eps, "failure probability used for the reported bound");
  cmd.add_option("--theta", o.theta, "theta for the bound (default min(1, n max{p,1-q}))");
  cmd.add_option("--threads", o.threads, "worker threads (0: all cores)");
  cmd.add_option("--out", o.out, "write per-trial results to PATH");
  cmd.add_option("--format", o.format, "csv or json")->check(CLI::IsMember({"csv", "json"}));
  cmd.add_flag("--no-timing", o.no_timing, "write wall_ms as 0 for reproducible output");
}

ExperimentConfig make_config(const RunOptions& o, std::size_t n, double p, double q,
                             MatcherKind matcher, const std::string& load_spec) {
  ExperimentConfig cfg;
  cfg.n = n;
  cfg.p = p;
  cfg.q = q;
  cfg.matcher = matcher;
  cfg.graph_init = parse_graph_init(o.init_graph, p, q);
  cfg.graph_label = o.init_graph;
  cfg.load_init = parse_load_init(load_spec);
  cfg.load_label = load_spec;
  cfg.trials = o.trials;
  cfg.master_seed = o.seed;
  if (o.cap > 0) cfg.max_steps = o.cap;
  cfg.ledger = o.ledger;
  cfg.eps = o.eps;
  if (o.theta > 0.0) cfg.theta = o.theta;
  cfg.threads = o.threads;
  return cfg;
}

void print_summary(const ExperimentSummary& s) {
  const auto& c = s.config;
  std::printf("n=%zu p=%g q=%g matcher=%s init-graph=%s init-load=%s trials=%llu\n", c.n, c.p,
              c.q, std::string(to_string(c.matcher)).c_str(), c.graph_label.c_str(),
              c.load_label.c_str(), static_cast<unsigned long long>(c.trials));
  std::printf("  delta0=%lld cap=%llu finished=%zu censored=%zu\n",
              static_cast<long long>(s.trials.front().delta0),
              static_cast<unsigned long long>(s.cap), s.stats.finished, s.stats.censored);
  if (s.stats.finished > 0) {
    std::printf("  T_bal: median=%g mean=%.2f q10=%g q90=%g min=%g max=%g\n", s.stats.median,
                s.stats.mean, s.stats.q10, s.stats.q90, s.stats.min, s.stats.max);
  }
  if (s.bound) {
    std::printf("  bound (eps=%g, theta=%g, r=%g, c*=%.5f): T1=%llu T2=%llu total=%llu\n", c.eps,
                s.bound->theta, s.bound->r, s.bound->c,
                static_cast<unsigned long long>(s.bound->phase1),
                static_cast<unsigned long long>(s.bound->phase2),
                static_cast<unsigned long long>(s.bound->total));
  } else {
    std::printf("  bound: undefined (needs delta0 >= 2 and theta <= n max{p,1-q})\n");
  }
}

void write_out(const RunOptions& o, const std::vector<ExperimentSummary>& results) {
  if (o.out.empty()) return;
  emit(results, o.out, parse_output_format(o.format), EmitOptions{!o.no_timing});
}

int run_simulate(const RunOptions& o, const std::string& trace_path) {
  auto cfg = make_config(o, o.n, o.p, o.q, parse_matcher_kind(o.matcher), o.init_load);
  if (!trace_path.empty()) {
    // Token trace of trial 0, written before the full experiment.
    cfg.ledger = true;
    std::ofstream trace(trace_path);
    if (!trace) throw std::runtime_error("cannot open '" + trace_path + "' for writing");
    TokenLedger initial(initial_config(cfg.load_init, cfg.n));
    initial.dump_csv(trace, 0, true);
    run_trial(cfg, 0, [&](const StepView& view) { view.ledger->dump_csv(trace, view.step + 1); });
  }
  auto summary = run_experiment(cfg);
  print_summary(summary);
  write_out(o, {summary});
  return 0;
}

int run_sweep(const RunOptions& o, const std::vector<std::size_t>& ns,
              const std::vector<Load>& deltas, const std::vector<std::string>& matchers,
              const std::vector<std::string>& pqs) {
  std::vector<std::pair<double, double>> params;
  for (const auto& pq : pqs) {
    const auto colon = pq.find(':');
    if (colon == std::string::npos) throw std::invalid_argument("--pq entries look like P:Q");
    params.emplace_back(std::stod(pq.substr(0, colon)), std::stod(pq.substr(colon + 1)));
  }
  std::vector<ExperimentSummary> results;
  for (auto n : ns) {
    for (auto delta : deltas) {
      for (const auto& m : matchers) {
        for (auto [p, q] : params) {
          auto cfg = make_config(o, n, p, q, parse_matcher_kind(m), "point:" + std::to_string(delta));
          results.push_back(run_experiment(cfg));
          print_summary(results.back());
        }
      }
    }
  }
  write_out(o, results);
  return 0;
}

int run_fairness(std::uint64_t samples, std::uint64_t seed, const std::vector<std::string>& kinds,
                 bool verbose) {
  const auto corpus = fairness_corpus();
  bool all_ok = true;
  for (const auto& name : kinds) {
    const auto kind = parse_matcher_kind(name);
    std::size_t graphs_ok = 0;
    std::size_t edges = 0;
    for (const auto& report : check_fairness_corpus(kind, corpus, samples, seed)) {
      edges += report.edges.size();
      if (report.ok()) ++graphs_ok;
      for (const auto& e : report.edges) {
        if (verbose || !(e.floor_ok && e.exact_ok)) {
          std::printf("  %-6s %-8s {%u,%u} est=%.6f se=%.6f floor=%.6f", name.c_str(),
                      report.name.c_str(), e.edge.u, e.edge.v, e.estimate.estimate,
                      e.estimate.std_error, e.floor);
          if (e.exact) std::printf(" exact=%.6f", *e.exact);
          std::printf("%s\n", e.floor_ok && e.exact_ok ? "" : "  FAIL");
        }
      }
    }
    const bool ok = graphs_ok == corpus.size();
    all_ok = all_ok && ok;
    std::printf("%-12s F=%-10s graphs %zu/%zu edges %zu  %s\n", name.c_str(),
                kind == MatcherKind::simple         ? "1/n"
                : kind == MatcherKind::uniform_edge ? "1/n^2"
                : kind == MatcherKind::lr           ? "1/8"
                                                    : "1/4",
                graphs_ok, corpus.size(), edges, ok ? "PASS" : "FAIL");
  }
  return all_ok ? 0 : 1;
}

int run_mixing(std::size_t n, double p, double q, double eps, std::uint64_t runs,
               std::uint64_t seed) {
  const EdgeMarkovParams params(p, q);
  const auto r = mixing_check(params, n, eps, runs, seed);
  std::printf("p=%g q=%g n=%zu eps=%g: mixing steps=%llu stationary=%.6f\n", p, q, n, eps,
              static_cast<unsigned long long>(r.steps), r.target);
  std::printf("  density from empty=%.6f from complete=%.6f tolerance=%.6f  %s\n", r.from_empty,
              r.from_complete, r.tolerance, r.ok() ? "PASS" : "FAIL");
  return r.ok() ? 0 : 1;
}

int run_verify() {
  bool ok = true;
  for (const auto& report : run_lemma_oracles()) {
    std::printf("%-50s cases=%-8llu failures=%llu  %s\n", report.name.c_str(),
                static_cast<unsigned long long>(report.cases),
                static_cast<unsigned long long>(report.failures),
                report.passed() ? "PASS" : "FAIL");
    if (!report.passed()) {
      std::printf("  first failure: %s\n", report.first_failure.c_str());
      ok = false;
    }
  }
  return ok ? 0 : 1;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Random-matching load balancing on edge-Markovian graphs"};
  app.require_subcommand(1);
  app.fallthrough();
  app.allow_config_extras(CLI::config_extras_mode::error);
  app.set_config("--config", "", "INI/TOML file; keys go under a [subcommand] section");

  RunOptions sim;
  std::string trace_path;
  auto* simulate = app.add_subcommand("simulate", "run one experiment");
  add_run_flags(*simulate, sim, true);
  simulate->add_option("--ledger-trace", trace_path, "CSV token trace of trial 0");

  RunOptions sw;
  std::vector<std::size_t> sweep_n{64};
  std::vector<Load> sweep_delta{1024};
  std::vector<std::string> sweep_matcher{"lr"};
  std::vector<std::string> sweep_pq{"0.5:0.5"};
  auto* sweep = app.add_subcommand("sweep", "run the cross product of parameter lists");
  add_run_flags(*sweep, sw, false);
  sweep->add_option("--n", sweep_n, "vertex counts")->delimiter(',');
  sweep->add_option("--delta", sweep_delta, "point-mass discrepancies")->delimiter(',');
  sweep->add_option("--matcher", sweep_matcher, "matcher kinds")->delimiter(',');
  sweep->add_option("--pq", sweep_pq, "P:Q pairs")->delimiter(',');

  std::uint64_t fair_samples = 1'000'000;
  std::uint64_t fair_seed = 1;
  bool fair_verbose = false;
  std::vector<std::string> fair_kinds{"simple", "uniform-edge", "lr", "ds"};
  auto* fairness = app.add_subcommand("fairness", "estimate edge inclusion over the graph corpus");
  fairness->add_option("--samples", fair_samples, "matchings per graph")->check(CLI::PositiveNumber);
  fairness->add_option("--seed", fair_seed, "master seed");
  fairness->add_option("--matcher", fair_kinds, "matcher kinds")->delimiter(',');
  fairness->add_flag("--verbose", fair_verbose, "print every edge");

  std::size_t mix_n = 256;
  double mix_p = 0.5;
  double mix_q = 0.5;
  double mix_eps = 0.01;
  std::uint64_t mix_runs = 20;
  std::uint64_t mix_seed = 1;
  auto* mixing = app.add_subcommand("mixing", "check edge density after the mixing time");
  mixing->add_option("--n", mix_n, "vertex count")->check(CLI::Range(2, 1 << 16));
  mixing->add_option("--p", mix_p, "edge birth probability");
  mixing->add_option("--q", mix_q, "edge death probability");
  mixing->add_option("--eps", mix_eps, "total-variation target");
  mixing->add_option("--runs", mix_runs, "independent chains per start")->check(CLI::PositiveNumber);
  mixing->add_option("--seed", mix_seed, "master seed");

  auto* verify = app.add_subcommand("verify", "run the exhaustive lemma oracles");

  CLI11_PARSE(app, argc, argv);

  try {
    if (simulate->parsed()) return run_simulate(sim, trace_path);
    if (sweep->parsed()) return run_sweep(sw, sweep_n, sweep_delta, sweep_matcher, sweep_pq);
    if (fairness->parsed()) return run_fairness(fair_samples, fair_seed, fair_kinds, fair_verbose);
    if (mixing->parsed()) return run_mixing(mix_n, mix_p, mix_q, mix_eps, mix_runs, mix_seed);
    if (verify->parsed()) return run_verify();
  } catch (const std::exception& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return 2;
  }
  return 0;
}
