#pragma once

#include "emlb/balance.hpp"
#include "emlb/evolving_graph.hpp"
#include "emlb/matchers.hpp"
#include "emlb/rng.hpp"
#include "emlb/theory.hpp"
#include "emlb/token_ledger.hpp"

#include <json.hpp>

#include <algorithm>
#include <atomic>
#include <charconv>
#include <chrono>
#include <cmath>
#include <cstdint>
#include <exception>
#include <fstream>
#include <functional>
#include <istream>
#include <mutex>
#include <optional>
#include <ostream>
#include <sstream>
#include <stdexcept>
#include <string>
#include <system_error>
#include <thread>
#include <vector>

namespace emlb {

/// Raised when a per-step invariant fails; carries the step index.
class InvariantViolation : public std::runtime_error {
 public:
  InvariantViolation(std::uint64_t trial, std::uint64_t step, const std::string& what)
      : std::runtime_error("trial " + std::to_string(trial) + ", step " + std::to_string(step) +
                           ": " + what),
        step_(step) {}

  std::uint64_t step() const noexcept { return step_; }

 private:
  std::uint64_t step_;
};

struct ExperimentConfig {
  std::size_t n = 64;
  double p = 0.5;
  double q = 0.5;
  MatcherKind matcher = MatcherKind::lr;
  GraphInit graph_init = EmptyGraph{};
  LoadInit load_init = PointMass{1024};
  std::uint64_t trials = 1;
  std::uint64_t master_seed = 1;
  std::optional<std::uint64_t> max_steps;  // default: 10 × theorem bound
  bool ledger = false;
  double eps = 0.25;
  std::optional<double> theta;
  unsigned threads = 0;  // 0: hardware concurrency
  std::string graph_label = "empty";
  std::string load_label = "point:1024";

  EdgeMarkovParams params() const { return {p, q}; }

  void validate() const {
    if (n == 0) throw std::invalid_argument("n must be positive");
    (void)params();
    if (trials == 0) throw std::invalid_argument("trial count must be at least 1");
    if (max_steps && *max_steps == 0) throw std::invalid_argument("step cap must be at least 1");
  }
};

struct TrialResult {
  std::uint64_t trial = 0;
  std::uint64_t seed = 0;
  std::size_t n = 0;
  double p = 0.0;
  double q = 0.0;
  MatcherKind matcher = MatcherKind::lr;
  Load delta0 = 0;
  std::uint64_t t_bal = 0;  // steps taken; equals the cap when censored
  bool censored = false;
  Load final_min = 0;
  Load final_max = 0;
  double mu = 0.0;
  std::uint64_t violations = 0;
  double wall_ms = 0.0;

  friend bool operator==(const TrialResult&, const TrialResult&) = default;
};

/// Hook called once per executed step with G_t, M_t, Γ_t and Γ_{t+1}.
struct StepView {
  std::uint64_t step;
  const Graph& graph;
  const Matching& matching;
  const TokenConfig& before;
  const TokenConfig& after;
  const TokenLedger* ledger;  // post-step ledger when instrumented
};
using StepObserver = std::function<void(const StepView&)>;

inline std::optional<BalancingBound> bound_for(const ExperimentConfig& cfg, Load delta0) {
  try {
    BoundInputs in;
    in.n = cfg.n;
    in.delta = delta0;
    in.eps = cfg.eps;
    in.p = cfg.p;
    in.q = cfg.q;
    in.theta = cfg.theta;
    in.fairness = fairness_floor(cfg.matcher, cfg.n);
    return theorem_bound(in);
  } catch (const std::invalid_argument&) {
    return std::nullopt;
  }
}

inline std::uint64_t step_cap(const ExperimentConfig& cfg, Load delta0) {
  if (cfg.max_steps) return *cfg.max_steps;
  if (const auto b = bound_for(cfg, delta0)) return 10 * b->total;
  return 1'000'000;
}

/// Runs one trial: match on G_t, average the matched pairs, then move the
/// graph to G_{t+1}, until the configuration is balanced or the cap is hit.
inline TrialResult run_trial(const ExperimentConfig& cfg, std::uint64_t index,
                             const StepObserver& observer = {}) {
  const auto started = std::chrono::steady_clock::now();
  const auto params = cfg.params();
  TrialResult res;
  res.trial = index;
  res.seed = derive_seed(cfg.master_seed, index);
  res.n = cfg.n;
  res.p = cfg.p;
  res.q = cfg.q;
  res.matcher = cfg.matcher;

  Rng rng{res.seed};
  GraphInit graph_init = cfg.graph_init;
  if (auto* st = std::get_if<StationaryGraph>(&graph_init)) st->seed = rng();
  Graph graph = new_graph(cfg.n, graph_init);
  Graph next_graph(cfg.n);
  TokenConfig config = initial_config(cfg.load_init, cfg.n);
  res.delta0 = discrepancy(config);
  const auto cap = step_cap(cfg, res.delta0);

  std::optional<TokenLedger> ledger;
  if (cfg.ledger) {
    ledger.emplace(config);
    if (auto bad = ledger->violations(config); !bad.empty()) {
      throw InvariantViolation(index, 0, "ledger: " + bad.front());
    }
  }

  std::uint64_t t = 0;
  while (!is_balanced(config) && t < cap) {
    auto matching = draw_matching(cfg.matcher, graph, rng);
    if (!is_valid_matching(graph, matching)) {
      throw InvariantViolation(index, t, "matching is not a matching of G_t");
    }
    auto [next, choices] = apply_matching(config, matching, rng);
    if (next.total() != config.total()) throw InvariantViolation(index, t, "token total changed");
    if (next.min_load() < config.min_load()) throw InvariantViolation(index, t, "minimum load fell");
    if (next.max_load() > config.max_load()) throw InvariantViolation(index, t, "maximum load rose");

    if (ledger) {
      auto before = *ledger;
      ledger->advance(config, matching, choices);
      auto bad = transition_violations(before, *ledger, config, matching);
      auto shape = ledger->violations(next);
      bad.insert(bad.end(), shape.begin(), shape.end());
      if (!bad.empty()) throw InvariantViolation(index, t, "ledger: " + bad.front());
    }
    if (observer) observer(StepView{t, graph, matching, config, next, ledger ? &*ledger : nullptr});

    config = std::move(next);
    evolve_into(graph, params, rng, next_graph);
    std::swap(graph, next_graph);
    ++t;
  }

  res.t_bal = t;
  res.censored = !is_balanced(config);
  res.final_min = config.min_load();
  res.final_max = config.max_load();
  res.mu = static_cast<double>(config.total()) / static_cast<double>(cfg.n);
  res.wall_ms =
      std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - started).count();
  return res;
}

/// Linear-interpolated quantile of sorted data.
inline double quantile(const std::vector<double>& sorted, double prob) {
  if (sorted.empty()) throw std::invalid_argument("quantile of empty sample");
  const double pos = prob * static_cast<double>(sorted.size() - 1);
  const auto lo = static_cast<std::size_t>(std::floor(pos));
  const auto hi = std::min(lo + 1, sorted.size() - 1);
  return sorted[lo] + (pos - static_cast<double>(lo)) * (sorted[hi] - sorted[lo]);
}

struct TbalStats {
  std::size_t finished = 0;
  std::size_t censored = 0;
  double mean = 0.0;
  double median = 0.0;
  double q10 = 0.0;
  double q90 = 0.0;
  double min = 0.0;
  double max = 0.0;
};

/// Statistics over uncensored trials only.
inline TbalStats summarize(const std::vector<TrialResult>& trials) {
  TbalStats s;
  std::vector<double> finished;
  for (const auto& t : trials) {
    if (t.censored) {
      ++s.censored;
    } else {
      finished.push_back(static_cast<double>(t.t_bal));
    }
  }
  s.finished = finished.size();
  if (finished.empty()) return s;
  std::sort(finished.begin(), finished.end());
  double total = 0.0;
  for (auto v : finished) total += v;
  s.mean = total / static_cast<double>(finished.size());
  s.median = quantile(finished, 0.5);
  s.q10 = quantile(finished, 0.1);
  s.q90 = quantile(finished, 0.9);
  s.min = finished.front();
  s.max = finished.back();
  return s;
}

struct ExperimentSummary {
  ExperimentConfig config;
  std::vector<TrialResult> trials;
  TbalStats stats;
  std::optional<BalancingBound> bound;
  std::uint64_t cap = 0;
};

/// Runs cfg.trials independent trials on a worker pool; results are ordered
/// by trial index regardless of scheduling.
inline ExperimentSummary run_experiment(const ExperimentConfig& cfg) {
  cfg.validate();
  ExperimentSummary out;
  out.config = cfg;
  out.trials.resize(cfg.trials);

  unsigned workers = cfg.threads != 0 ? cfg.threads : std::thread::hardware_concurrency();
  workers = std::max(1U, std::min<unsigned>(workers, static_cast<unsigned>(cfg.trials)));
  std::atomic<std::uint64_t> next{0};
  std::exception_ptr failure;
  std::mutex failure_mutex;
  auto work = [&] {
    for (auto i = next++; i < cfg.trials; i = next++) {
      try {
        out.trials[i] = run_trial(cfg, i);
      } catch (...) {
        std::lock_guard lock(failure_mutex);
        if (!failure) failure = std::current_exception();
        next = cfg.trials;
      }
    }
  };
  if (workers == 1) {
    work();
  } else {
    std::vector<std::jthread> pool;
    for (unsigned w = 0; w < workers; ++w) pool.emplace_back(work);
  }
  if (failure) std::rethrow_exception(failure);

  out.stats = summarize(out.trials);
  const auto delta0 = out.trials.front().delta0;
  out.bound = bound_for(cfg, delta0);
  out.cap = step_cap(cfg, delta0);
  return out;
}

// ---------------------------------------------------------------------------
// Output

struct EmitOptions {
  bool timing = true;  // false writes wall_ms as 0 for byte-reproducible files
};

inline constexpr const char* csv_header = "trial,seed,n,p,q,matcher,delta0,t_bal,censored,wall_ms";

inline std::string format_double(double v) {
  char buf[64];
  const auto res = std::to_chars(buf, buf + sizeof buf, v);
  return std::string(buf, res.ptr);
}

inline void emit_csv(const std::vector<TrialResult>& trials, std::ostream& os,
                     const EmitOptions& opts = {}) {
  os << csv_header << '\n';
  for (const auto& t : trials) {
    os << t.trial << ',' << t.seed << ',' << t.n << ',' << format_double(t.p) << ','
       << format_double(t.q) << ',' << to_string(t.matcher) << ',' << t.delta0 << ',' << t.t_bal
       << ',' << (t.censored ? 1 : 0) << ','
       << format_double(opts.timing ? t.wall_ms : 0.0) << '\n';
  }
}

namespace detail {

template <typename T>
T parse_number(const std::string& field, const char* name) {
  T value{};
  const auto* end = field.data() + field.size();
  const auto res = std::from_chars(field.data(), end, value);
  if (res.ec != std::errc{} || res.ptr != end) {
    throw std::invalid_argument(std::string("bad ") + name + " field '" + field + "'");
  }
  return value;
}

}  // namespace detail

/// Reads rows written by emit_csv.
inline std::vector<TrialResult> parse_csv(std::istream& in) {
  std::string line;
  if (!std::getline(in, line) || line != csv_header) {
    throw std::invalid_argument("missing or unexpected CSV header");
  }
  std::vector<TrialResult> out;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    std::vector<std::string> f;
    std::stringstream ss(line);
    for (std::string cell; std::getline(ss, cell, ',');) f.push_back(cell);
    if (f.size() != 10) throw std::invalid_argument("CSV row has " + std::to_string(f.size()) + " fields");
    TrialResult t;
    t.trial = detail::parse_number<std::uint64_t>(f[0], "trial");
    t.seed = detail::parse_number<std::uint64_t>(f[1], "seed");
    t.n = detail::parse_number<std::size_t>(f[2], "n");
    t.p = detail::parse_number<double>(f[3], "p");
    t.q = detail::parse_number<double>(f[4], "q");
    t.matcher = parse_matcher_kind(f[5]);
    t.delta0 = detail::parse_number<Load>(f[6], "delta0");
    t.t_bal = detail::parse_number<std::uint64_t>(f[7], "t_bal");
    t.censored = detail::parse_number<int>(f[8], "censored") != 0;
    t.wall_ms = detail::parse_number<double>(f[9], "wall_ms");
    out.push_back(t);
  }
  return out;
}

inline nlohmann::json to_json(const ExperimentSummary& s, const EmitOptions& opts = {}) {
  using nlohmann::json;
  const auto& c = s.config;
  json config = {{"n", c.n},
                 {"p", c.p},
                 {"q", c.q},
                 {"matcher", to_string(c.matcher)},
                 {"init_graph", c.graph_label},
                 {"init_load", c.load_label},
                 {"trials", c.trials},
                 {"seed", c.master_seed},
                 {"cap", s.cap},
                 {"ledger", c.ledger},
                 {"eps", c.eps}};
  json trials = json::array();
  for (const auto& t : s.trials) {
    trials.push_back({{"trial", t.trial},
                      {"seed", t.seed},
                      {"n", t.n},
                      {"p", t.p},
                      {"q", t.q},
                      {"matcher", to_string(t.matcher)},
                      {"delta0", t.delta0},
                      {"t_bal", t.t_bal},
                      {"censored", t.censored},
                      {"wall_ms", opts.timing ? t.wall_ms : 0.0}});
  }
  json stats = {{"finished", s.stats.finished}, {"censored", s.stats.censored}};
  if (s.stats.finished > 0) {
    stats["mean"] = s.stats.mean;
    stats["median"] = s.stats.median;
    stats["q10"] = s.stats.q10;
    stats["q90"] = s.stats.q90;
    stats["min"] = s.stats.min;
    stats["max"] = s.stats.max;
  }
  json out = {{"config", config}, {"trials", trials}, {"stats", stats}};
  if (s.bound) {
    out["bound"] = {{"theta", s.bound->theta}, {"r", s.bound->r},         {"c_star", s.bound->c},
                    {"phase1", s.bound->phase1}, {"phase2", s.bound->phase2}, {"total", s.bound->total}};
  } else {
    out["bound"] = nullptr;
  }
  return out;
}

enum class OutputFormat { csv, json };

inline OutputFormat parse_output_format(const std::string& name) {
  if (name == "csv") return OutputFormat::csv;
  if (name == "json") return OutputFormat::json;
  throw std::invalid_argument("unknown format '" + name + "' (expected csv or json)");
}

/// Writes one or more experiments to `path`. CSV rows are concatenated under a
/// single header; JSON is an object for one experiment, an array otherwise.
inline void emit(const std::vector<ExperimentSummary>& summaries, const std::string& path,
                 OutputFormat format, const EmitOptions& opts = {}) {
  std::ofstream os(path, std::ios::binary);
  if (!os) throw std::runtime_error("cannot open '" + path + "' for writing");
  if (format == OutputFormat::csv) {
    std::vector<TrialResult> rows;
    for (const auto& s : summaries) rows.insert(rows.end(), s.trials.begin(), s.trials.end());
    emit_csv(rows, os, opts);
  } else if (summaries.size() == 1) {
    os << to_json(summaries.front(), opts).dump(2) << '\n';
  } else {
    auto arr = nlohmann::json::array();
    for (const auto& s : summaries) arr.push_back(to_json(s, opts));
    os << arr.dump(2) << '\n';
  }
  if (!os) throw std::runtime_error("failed writing '" + path + "'");
}

// ---------------------------------------------------------------------------
// Specification strings used by the CLI and config files.

inline GraphInit parse_graph_init(const std::string& spec, double p, double q) {
  if (spec == "empty") return EmptyGraph{};
  if (spec == "complete") return CompleteGraph{};
  if (spec == "stationary") return StationaryGraph{EdgeMarkovParams(p, q), 0};
  if (spec.rfind("file:", 0) == 0) {
    const auto path = spec.substr(5);
    std::ifstream in(path);
    if (!in) throw std::invalid_argument("cannot read edge list '" + path + "'");
    return read_edge_list(in);
  }
  throw std::invalid_argument("unknown initial graph '" + spec +
                              "' (expected empty, complete, stationary or file:PATH)");
}

namespace detail {

inline std::vector<std::string> split(const std::string& s, char sep) {
  std::vector<std::string> out;
  std::stringstream ss(s);
  for (std::string part; std::getline(ss, part, sep);) out.push_back(part);
  return out;
}

}  // namespace detail

inline LoadInit parse_load_init(const std::string& spec) {
  const auto colon = spec.find(':');
  const auto kind = spec.substr(0, colon);
  const auto args = colon == std::string::npos ? std::string{} : spec.substr(colon + 1);
  const auto parts = detail::split(args, ',');
  if (kind == "point" && parts.size() == 1) {
    return PointMass{detail::parse_number<Load>(parts[0], "point mass")};
  }
  if (kind == "two-level" && parts.size() == 3) {
    return TwoLevel{detail::parse_number<Load>(parts[0], "low"),
                    detail::parse_number<Load>(parts[1], "high"),
                    detail::parse_number<std::size_t>(parts[2], "count")};
  }
  if (kind == "uniform" && (parts.size() == 1 || parts.size() == 2)) {
    return UniformRandomLoad{detail::parse_number<Load>(parts[0], "total"),
                             parts.size() == 2 ? detail::parse_number<std::uint64_t>(parts[1], "seed")
                                               : 0};
  }
  if (kind == "file" && !args.empty()) {
    std::ifstream in(args);
    if (!in) throw std::invalid_argument("cannot read load file '" + args + "'");
    return read_load_file(in);
  }
  throw std::invalid_argument("unknown initial load '" + spec +
                              "' (expected point:K, two-level:LO,HI,COUNT, uniform:K[,SEED] or "
                              "file:PATH)");
}

}  // namespace emlb
