#pragma once

#include "emlb/evolving_graph.hpp"
#include "emlb/rng.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdint>
#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

namespace emlb {

/// Pairwise vertex-disjoint edges, kept in ascending order.
struct Matching {
  std::vector<Edge> edges;

  bool empty() const noexcept { return edges.empty(); }
  std::size_t size() const noexcept { return edges.size(); }
  bool contains(Edge e) const { return std::binary_search(edges.begin(), edges.end(), e); }

  friend bool operator==(const Matching&, const Matching&) = default;
};

enum class MatcherKind : std::uint8_t { simple, uniform_edge, lr, distributed_sync };

inline constexpr std::array<MatcherKind, 4> all_matcher_kinds{
    MatcherKind::simple, MatcherKind::uniform_edge, MatcherKind::lr,
    MatcherKind::distributed_sync};

constexpr std::string_view to_string(MatcherKind kind) noexcept {
  switch (kind) {
    case MatcherKind::simple: return "simple";
    case MatcherKind::uniform_edge: return "uniform-edge";
    case MatcherKind::lr: return "lr";
    case MatcherKind::distributed_sync: return "ds";
  }
  return "?";
}

inline MatcherKind parse_matcher_kind(std::string_view name) {
  for (auto kind : all_matcher_kinds) {
    if (to_string(kind) == name) return kind;
  }
  throw std::invalid_argument("unknown matcher '" + std::string(name) +
                              "' (expected simple, uniform-edge, lr or ds)");
}

/// Checks M ⊆ E(g) and vertex-disjointness.
inline bool is_valid_matching(const Graph& g, const Matching& m) {
  std::vector<bool> used(g.size(), false);
  for (const auto& e : m.edges) {
    if (e.u >= g.size() || e.v >= g.size() || e.u == e.v || !g.has_edge(e.u, e.v)) return false;
    if (used[e.u] || used[e.v]) return false;
    used[e.u] = used[e.v] = true;
  }
  return true;
}

/// Pick v uniformly; if N(v) is non-empty, match it to a uniform neighbour.
inline Matching simple_matching(const Graph& g, Rng& rng) {
  Matching m;
  const auto v = uniform_below<Vertex>(rng, static_cast<Vertex>(g.size()));
  const auto deg = g.degree(v);
  if (deg == 0) return m;
  const auto u = g.nth_neighbor(v, uniform_below<std::size_t>(rng, deg));
  m.edges.emplace_back(u, v);
  return m;
}

/// A single edge drawn uniformly from E, or nothing when E is empty.
inline Matching uniform_edge_matching(const Graph& g, Rng& rng) {
  Matching m;
  if (g.edge_count() == 0) return m;
  auto k = uniform_below<std::size_t>(rng, g.edge_count());
  for (Vertex u = 0; u < g.size(); ++u) {
    // Neighbours above u, in order; locate the k-th upper-triangle edge.
    std::size_t upper = 0;
    g.for_each_neighbor(u, [&](Vertex v) { upper += v > u; });
    if (k < upper) {
      const auto below = g.degree(u) - upper;
      m.edges.emplace_back(u, g.nth_neighbor(u, below + k));
      return m;
    }
    k -= upper;
  }
  throw std::logic_error("edge count out of sync with adjacency");
}

/// Local randomized matching: each ordered pair (v,u) proposes with probability
/// 1/(8 max{deg v, deg u}); vertices with several outgoing proposals drop them
/// all, then vertices with several incoming proposals drop those. A surviving
/// (v,u) is kept when v has no incoming proposal left, or when (u,v) survived too.
inline Matching lr_matching(const Graph& g, Rng& rng) {
  constexpr Vertex none = ~Vertex{0};
  const auto n = g.size();
  const auto deg = g.degrees();

  std::vector<Vertex> out_target(n, none);
  std::vector<std::uint32_t> out_count(n, 0);
  // Ascending (v,u), one coin per ordered pair.
  for (Vertex v = 0; v < n; ++v) {
    g.for_each_neighbor(v, [&](Vertex u) {
      const auto bound = 8 * std::max(deg[v], deg[u]);
      if (uniform_below<std::size_t>(rng, bound) == 0) {
        out_target[v] = u;
        ++out_count[v];
      }
    });
  }
  for (Vertex v = 0; v < n; ++v) {
    if (out_count[v] > 1) out_target[v] = none;
  }

  std::vector<std::uint32_t> in_count(n, 0);
  for (Vertex v = 0; v < n; ++v) {
    if (out_target[v] != none) ++in_count[out_target[v]];
  }
  for (Vertex v = 0; v < n; ++v) {
    if (out_target[v] != none && in_count[out_target[v]] > 1) out_target[v] = none;
  }

  std::fill(in_count.begin(), in_count.end(), 0);
  for (Vertex v = 0; v < n; ++v) {
    if (out_target[v] != none) ++in_count[out_target[v]];
  }

  Matching m;
  for (Vertex v = 0; v < n; ++v) {
    const auto u = out_target[v];
    if (u == none) continue;
    if (in_count[v] == 0) {
      m.edges.emplace_back(v, u);
    } else if (out_target[u] == v && v < u) {
      m.edges.emplace_back(v, u);
    }
  }
  std::sort(m.edges.begin(), m.edges.end());
  return m;
}

/// Localized distributed synchronous matching: each vertex becomes an initiator
/// with probability 1/2; an initiator v proposes to a uniform neighbour u, kept
/// with the Metropolis-Hastings acceptance min{deg u, deg v}/deg u. The edge
/// {v,u} survives when u is not an initiator and received exactly one proposal.
inline Matching ds_matching(const Graph& g, Rng& rng) {
  constexpr Vertex none = ~Vertex{0};
  const auto n = g.size();
  const auto deg = g.degrees();

  std::vector<bool> initiator(n);
  for (Vertex v = 0; v < n; ++v) initiator[v] = uniform_below<int>(rng, 2) == 1;

  std::vector<Vertex> proposal(n, none);
  std::vector<std::uint32_t> in_count(n, 0);
  for (Vertex v = 0; v < n; ++v) {
    if (!initiator[v] || deg[v] == 0) continue;
    const auto u = g.nth_neighbor(v, uniform_below<std::size_t>(rng, deg[v]));
    if (uniform_below<std::size_t>(rng, deg[u]) < std::min(deg[u], deg[v])) {
      proposal[v] = u;
      ++in_count[u];
    }
  }

  Matching m;
  for (Vertex v = 0; v < n; ++v) {
    const auto u = proposal[v];
    if (u != none && !initiator[u] && in_count[u] == 1) m.edges.emplace_back(v, u);
  }
  std::sort(m.edges.begin(), m.edges.end());
  return m;
}

inline Matching draw_matching(MatcherKind kind, const Graph& g, Rng& rng) {
  switch (kind) {
    case MatcherKind::simple: return simple_matching(g, rng);
    case MatcherKind::uniform_edge: return uniform_edge_matching(g, rng);
    case MatcherKind::lr: return lr_matching(g, rng);
    case MatcherKind::distributed_sync: return ds_matching(g, rng);
  }
  throw std::invalid_argument("unknown matcher kind");
}

/// F such that every edge joins the matching with probability at least
/// F / max{deg u, deg v}.
inline double fairness_floor(MatcherKind kind, std::size_t n) {
  if (n == 0) throw std::invalid_argument("n must be positive");
  const auto nd = static_cast<double>(n);
  switch (kind) {
    case MatcherKind::simple: return 1.0 / nd;
    case MatcherKind::uniform_edge: return 1.0 / (nd * nd);
    case MatcherKind::lr: return 0.125;
    case MatcherKind::distributed_sync: return 0.25;
  }
  throw std::invalid_argument("unknown matcher kind");
}

struct InclusionEstimate {
  double estimate = 0.0;
  double std_error = 0.0;
  std::uint64_t hits = 0;
  std::uint64_t samples = 0;
};

inline InclusionEstimate make_estimate(std::uint64_t hits, std::uint64_t samples) {
  InclusionEstimate est;
  est.hits = hits;
  est.samples = samples;
  est.estimate = static_cast<double>(hits) / static_cast<double>(samples);
  est.std_error = std::sqrt(est.estimate * (1.0 - est.estimate) / static_cast<double>(samples));
  return est;
}

/// Per-edge inclusion frequencies over `samples` independent matchings, indexed
/// like g.edges().
inline std::vector<InclusionEstimate> estimate_all_edge_inclusions(MatcherKind kind,
                                                                   const Graph& g,
                                                                   std::uint64_t samples,
                                                                   Rng& rng) {
  if (samples == 0) throw std::invalid_argument("samples must be positive");
  const auto edges = g.edges();
  std::vector<std::uint64_t> hits(edges.size(), 0);
  for (std::uint64_t s = 0; s < samples; ++s) {
    const auto m = draw_matching(kind, g, rng);
    for (const auto& e : m.edges) {
      const auto it = std::lower_bound(edges.begin(), edges.end(), e);
      ++hits[static_cast<std::size_t>(it - edges.begin())];
    }
  }
  std::vector<InclusionEstimate> out;
  out.reserve(edges.size());
  for (auto h : hits) out.push_back(make_estimate(h, samples));
  return out;
}

inline InclusionEstimate estimate_edge_inclusion(MatcherKind kind, const Graph& g, Edge edge,
                                                 std::uint64_t samples, Rng& rng) {
  if (edge.v >= g.size() || edge.u == edge.v || !g.has_edge(edge.u, edge.v)) {
    throw std::invalid_argument("edge (" + std::to_string(edge.u) + "," +
                                std::to_string(edge.v) + ") is not in the graph");
  }
  if (samples == 0) throw std::invalid_argument("samples must be positive");
  std::uint64_t hits = 0;
  for (std::uint64_t s = 0; s < samples; ++s) {
    hits += draw_matching(kind, g, rng).contains(edge) ? 1 : 0;
  }
  return make_estimate(hits, samples);
}

}  // namespace emlb
