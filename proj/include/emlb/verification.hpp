#pragma once

#include "emlb/balance.hpp"
#include "emlb/corpus.hpp"
#include "emlb/evolving_graph.hpp"
#include "emlb/matchers.hpp"
#include "emlb/theory.hpp"
#include "emlb/token_ledger.hpp"

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <optional>
#include <functional>
#include <string>
#include <vector>

namespace emlb {

struct OracleReport {
  std::string name;
  std::uint64_t cases = 0;
  std::uint64_t failures = 0;
  std::string first_failure;

  bool passed() const noexcept { return failures == 0 && cases > 0; }

  void fail(std::string what) {
    if (failures++ == 0) first_failure = std::move(what);
  }
};

/// Calls `fn` with every vector of `n` non-negative loads summing to `total`.
inline void for_each_composition(std::size_t n, Load total,
                                 const std::function<void(const std::vector<Load>&)>& fn) {
  std::vector<Load> loads(n, 0);
  std::function<void(std::size_t, Load)> rec = [&](std::size_t v, Load left) {
    if (v + 1 == n) {
      loads[v] = left;
      fn(loads);
      return;
    }
    for (Load l = 0; l <= left; ++l) {
      loads[v] = l;
      rec(v + 1, left - l);
    }
  };
  if (n > 0) rec(0, total);
}

/// Halving lemma on two-vertex ledgers, for integer and half-integer
/// thresholds x = twice_x/2 <= max_twice_x/2, every partner load <= x and
/// every height h in [x, max_h], both rounding cases. Part (i) follows a real
/// token, part (ii) a complementary token.
inline OracleReport verify_halved_lemma(Height max_h = 50, Load max_twice_x = 50) {
  OracleReport report{"halving lemma (tokens and complementary tokens)", 0, 0, {}};
  for (Load twice_x = 0; twice_x <= max_twice_x; ++twice_x) {
    const double x = static_cast<double>(twice_x) / 2.0;
    for (Load partner = 0; 2 * partner <= twice_x; ++partner) {
      for (Height h = std::max<Height>(1, (twice_x + 1) / 2); h <= max_h; ++h) {
        for (const bool first_ceil : {true, false}) {
          const RoundingChoices choice{{first_ceil}};
          const Matching m{{Edge{0, 1}}};

          // (i): token at the top of vertex 0, whose pile is h tall.
          const TokenConfig tokens({h, partner});
          auto ledger = init_ledger(tokens);
          const auto id = static_cast<TokenId>(h - 1);
          ledger.advance(tokens, m, choice);
          ++report.cases;
          if (!verify_halved_bound(h, x, partner, ledger.tokens()[id].height)) {
            report.fail("token: h=" + std::to_string(h) + " x=" + std::to_string(x) +
                        " partner=" + std::to_string(partner));
          }

          // (ii): complementary pile of vertex 0 is h tall, partner's is `partner`.
          const TokenConfig comp({partner, h});
          auto comp_ledger = init_ledger(comp);
          comp_ledger.advance(comp, m, choice);
          ++report.cases;
          if (!verify_halved_bound(h, x, partner, comp_ledger.complementary()[id].height)) {
            report.fail("complementary: h=" + std::to_string(h) + " x=" + std::to_string(x) +
                        " partner=" + std::to_string(partner));
          }
        }
      }
    }
  }
  return report;
}

/// |S'| >= n/3 on every configuration meeting min Γ >= μ-1.
inline OracleReport verify_low_side_lemma(std::size_t max_n = 6, Load max_total = 18) {
  OracleReport report{"low-side count lemma", 0, 0, {}};
  for (std::size_t n = 1; n <= max_n; ++n) {
    for (Load k = 0; k <= max_total; ++k) {
      for_each_composition(n, k, [&](const std::vector<Load>& loads) {
        const TokenConfig c(loads);
        const auto verdict = low_side_count_ok(c);
        if (verdict == LowSideCheck::hypothesis_not_met) return;
        ++report.cases;
        if (verdict == LowSideCheck::violated) {
          std::string s = "loads";
          for (auto l : loads) s += " " + std::to_string(l);
          report.fail(s);
        }
      });
    }
  }
  return report;
}

/// φ1 ∨ φ2 implies the load lies in {m-1, m, m+1}, m the rounded mean. The
/// band centre is found by scanning for m with m - 1/2 < K/n <= m + 1/2.
inline OracleReport verify_logic_lemma(std::size_t max_n = 6, Load max_total = 24) {
  OracleReport report{"near-balance logic lemma", 0, 0, {}};
  for (std::size_t n = 1; n <= max_n; ++n) {
    const auto ni = static_cast<Load>(n);
    for (Load k = 0; k <= max_total; ++k) {
      Load centre = 0;
      while (!(2 * ni * centre - ni < 2 * k && 2 * k <= 2 * ni * centre + ni)) ++centre;
      for (Load load = 0; load <= k; ++load) {
        ++report.cases;
        if (near_balanced(load, k, n) && (load < centre - 1 || load > centre + 1)) {
          report.fail("n=" + std::to_string(n) + " K=" + std::to_string(k) +
                      " load=" + std::to_string(load));
        }
      }
    }
  }
  return report;
}

struct EdgeFairness {
  Edge edge;
  InclusionEstimate estimate;
  double floor = 0.0;                // F / max{deg u, deg v}
  std::optional<double> exact;       // closed form where one is known
  bool floor_ok = false;             // estimate - 3 se >= floor
  bool exact_ok = true;              // |estimate - exact| <= 3 se (or exact hit when se = 0)
};

struct GraphFairness {
  std::string name;
  MatcherKind kind = MatcherKind::simple;
  std::vector<EdgeFairness> edges;

  bool ok() const {
    return std::all_of(edges.begin(), edges.end(),
                       [](const EdgeFairness& e) { return e.floor_ok && e.exact_ok; });
  }
};

/// Exact inclusion probability where a closed form is available.
inline std::optional<double> exact_inclusion(MatcherKind kind, const Graph& g, Edge e) {
  const auto n = static_cast<double>(g.size());
  const auto du = static_cast<double>(g.degree(e.u));
  const auto dv = static_cast<double>(g.degree(e.v));
  switch (kind) {
    case MatcherKind::simple: return (1.0 / n) * (1.0 / du + 1.0 / dv);
    case MatcherKind::uniform_edge: return 1.0 / static_cast<double>(g.edge_count());
    case MatcherKind::lr:
      if (g.size() == 2) return 15.0 / 64.0;
      return std::nullopt;
    case MatcherKind::distributed_sync:
      if (g.size() == 2) return 0.5;
      return std::nullopt;
  }
  return std::nullopt;
}

inline bool within_sigmas(const InclusionEstimate& est, double target, double sigmas = 3.0) {
  const double diff = std::abs(est.estimate - target);
  if (est.std_error == 0.0) return diff < 1e-12;
  return diff <= sigmas * est.std_error;
}

inline GraphFairness check_fairness(MatcherKind kind, const NamedGraph& named,
                                    std::uint64_t samples, Rng& rng) {
  GraphFairness out{named.name, kind, {}};
  const auto& g = named.graph;
  if (g.edge_count() == 0) return out;
  const auto edges = g.edges();
  const auto estimates = estimate_all_edge_inclusions(kind, g, samples, rng);
  const double f = fairness_floor(kind, g.size());
  for (std::size_t i = 0; i < edges.size(); ++i) {
    EdgeFairness ef;
    ef.edge = edges[i];
    ef.estimate = estimates[i];
    ef.floor = f / static_cast<double>(std::max(g.degree(edges[i].u), g.degree(edges[i].v)));
    ef.floor_ok = ef.estimate.estimate - 3.0 * ef.estimate.std_error >= ef.floor;
    // Closed forms are compared for the simple matcher everywhere and for
    // every matcher on K2.
    if (kind == MatcherKind::simple || g.size() == 2) ef.exact = exact_inclusion(kind, g, edges[i]);
    if (ef.exact) ef.exact_ok = within_sigmas(ef.estimate, *ef.exact);
    out.edges.push_back(ef);
  }
  return out;
}

/// check_fairness over every corpus graph. Graph i of matcher kind k draws
/// from stream 4i + k of `seed`, so each (graph, kind) pair is reproducible on
/// its own.
inline std::vector<GraphFairness> check_fairness_corpus(MatcherKind kind,
                                                        const std::vector<NamedGraph>& corpus,
                                                        std::uint64_t samples,
                                                        std::uint64_t seed) {
  std::vector<GraphFairness> out;
  out.reserve(corpus.size());
  for (std::size_t i = 0; i < corpus.size(); ++i) {
    Rng rng = make_stream(seed, 4 * i + static_cast<std::size_t>(kind));
    out.push_back(check_fairness(kind, corpus[i], samples, rng));
  }
  return out;
}

struct MixingReport {
  std::uint64_t steps = 0;
  double target = 0.0;         // p/(p+q)
  double from_empty = 0.0;     // mean density after `steps` steps
  double from_complete = 0.0;
  double sigma = 0.0;          // binomial standard error of each mean density
  double tolerance = 0.0;      // eps + 3 sigma

  bool ok() const {
    return std::abs(from_empty - target) <= tolerance &&
           std::abs(from_complete - target) <= tolerance;
  }
};

/// Evolves `runs` independent graphs from the empty and the complete graph for
/// mixing_steps(params, eps) steps and compares edge densities with p/(p+q).
inline MixingReport mixing_check(const EdgeMarkovParams& params, std::size_t n, double eps,
                                 std::uint64_t runs, std::uint64_t seed) {
  MixingReport r;
  r.steps = mixing_steps(params, eps);
  r.target = stationary_edge_probability(params);
  const double pairs = static_cast<double>(n) * static_cast<double>(n - 1) / 2.0;
  for (std::uint64_t run = 0; run < runs; ++run) {
    Rng rng = make_stream(seed, run);
    Graph empty(n);
    Graph full = Graph::complete(n);
    for (std::uint64_t t = 0; t < r.steps; ++t) {
      empty = evolve(empty, params, rng);
      full = evolve(full, params, rng);
    }
    r.from_empty += edge_density(empty);
    r.from_complete += edge_density(full);
  }
  r.from_empty /= static_cast<double>(runs);
  r.from_complete /= static_cast<double>(runs);
  r.sigma = std::sqrt(r.target * (1.0 - r.target) / (pairs * static_cast<double>(runs)));
  r.tolerance = eps + 3.0 * r.sigma;
  return r;
}

inline std::vector<OracleReport> run_lemma_oracles() {
  return {verify_halved_lemma(), verify_low_side_lemma(), verify_logic_lemma()};
}

}  // namespace emlb
