#include "support.hpp"

#include <gtest/gtest.h>

#include <functional>
#include <algorithm>
#include <map>
#include <set>

using namespace emlb;
using emlb::testing::random_graph;

namespace {

using EdgeProbabilities = std::map<Edge, double>;

// Exact inclusion probabilities of the LR matcher by enumerating every subset
// of ordered-pair proposals.
EdgeProbabilities lr_exact(const Graph& g) {
  const auto n = g.size();
  std::vector<std::pair<Vertex, Vertex>> arcs;
  std::vector<double> prob;
  for (Vertex v = 0; v < n; ++v) {
    for (Vertex u = 0; u < n; ++u) {
      if (g.has_edge(v, u)) {
        arcs.emplace_back(v, u);
        prob.push_back(1.0 / (8.0 * static_cast<double>(std::max(g.degree(v), g.degree(u)))));
      }
    }
  }
  EdgeProbabilities out;
  for (std::uint64_t mask = 0; mask < (std::uint64_t{1} << arcs.size()); ++mask) {
    double weight = 1.0;
    std::vector<std::pair<Vertex, Vertex>> chosen;
    for (std::size_t i = 0; i < arcs.size(); ++i) {
      if ((mask >> i) & 1U) {
        weight *= prob[i];
        chosen.push_back(arcs[i]);
      } else {
        weight *= 1.0 - prob[i];
      }
    }
    std::vector<int> outdeg(n, 0), indeg(n, 0);
    for (auto [v, u] : chosen) ++outdeg[v];
    std::erase_if(chosen, [&](auto a) { return outdeg[a.first] > 1; });
    for (auto [v, u] : chosen) ++indeg[u];
    std::erase_if(chosen, [&](auto a) { return indeg[a.second] > 1; });
    std::fill(indeg.begin(), indeg.end(), 0);
    for (auto [v, u] : chosen) ++indeg[u];
    std::set<Edge> kept;
    for (auto [v, u] : chosen) {
      const bool mutual = std::find(chosen.begin(), chosen.end(), std::pair{u, v}) != chosen.end();
      if (indeg[v] == 0 || mutual) kept.insert(Edge(v, u));
    }
    for (const auto& e : kept) out[e] += weight;
  }
  return out;
}

// Exact inclusion probabilities of the distributed synchronous matcher: every
// initiator set, then every (target, accepted) outcome of each initiator.
EdgeProbabilities ds_exact(const Graph& g) {
  const auto n = g.size();
  EdgeProbabilities out;
  for (std::uint32_t init = 0; init < (1U << n); ++init) {
    const double set_weight = std::ldexp(1.0, -static_cast<int>(n));
    std::vector<int> proposal(n, -1);
    std::function<void(Vertex, double)> rec = [&](Vertex v, double weight) {
      if (v == n) {
        std::vector<int> indeg(n, 0);
        for (Vertex w = 0; w < n; ++w) {
          if (proposal[w] >= 0) ++indeg[proposal[w]];
        }
        for (Vertex w = 0; w < n; ++w) {
          const int u = proposal[w];
          if (u >= 0 && !((init >> u) & 1U) && indeg[u] == 1) out[Edge(w, u)] += weight;
        }
        return;
      }
      const auto dv = static_cast<double>(g.degree(v));
      if (!((init >> v) & 1U) || dv == 0) {
        rec(v + 1, weight);
        return;
      }
      double rejected = 1.0;
      for (Vertex u : g.neighbors(v)) {
        const auto du = static_cast<double>(g.degree(u));
        const double accept = std::min(du, dv) / du;
        proposal[v] = static_cast<int>(u);
        rec(v + 1, weight * accept / dv);
        rejected -= accept / dv;
      }
      proposal[v] = -1;
      rec(v + 1, weight * rejected);
    };
    rec(0, set_weight);
  }
  return out;
}

Graph star(std::size_t leaves) { return star_graph(leaves); }

}  // namespace

TEST(Matchers, NamesRoundTrip) {
  for (auto kind : all_matcher_kinds) EXPECT_EQ(parse_matcher_kind(to_string(kind)), kind);
  EXPECT_THROW(parse_matcher_kind("greedy"), std::invalid_argument);
}

TEST(Matchers, FairnessFloors) {
  EXPECT_DOUBLE_EQ(fairness_floor(MatcherKind::lr, 17), 0.125);
  EXPECT_DOUBLE_EQ(fairness_floor(MatcherKind::distributed_sync, 3), 0.25);
  EXPECT_DOUBLE_EQ(fairness_floor(MatcherKind::simple, 100), 0.01);
  EXPECT_DOUBLE_EQ(fairness_floor(MatcherKind::uniform_edge, 10), 0.01);
}

TEST(Matchers, EmptyGraphGivesEmptyMatching) {
  Rng rng{1};
  const Graph g(6);
  for (auto kind : all_matcher_kinds) {
    for (int i = 0; i < 50; ++i) EXPECT_TRUE(draw_matching(kind, g, rng).empty());
  }
}

TEST(Matchers, K2Deterministic) {
  Rng rng{2};
  const auto k2 = Graph::complete(2);
  for (auto kind : {MatcherKind::simple, MatcherKind::uniform_edge}) {
    const auto est = estimate_edge_inclusion(kind, k2, {0, 1}, 10'000, rng);
    EXPECT_EQ(est.estimate, 1.0);
  }
}

TEST(Matchers, EnumerationOraclesOnK2) {
  const auto k2 = Graph::complete(2);
  EXPECT_NEAR(lr_exact(k2).at({0, 1}), 15.0 / 64.0, 1e-15);
  EXPECT_NEAR(ds_exact(k2).at({0, 1}), 0.5, 1e-15);
}

TEST(Matchers, K2MonteCarlo) {
  Rng rng{3};
  const auto k2 = Graph::complete(2);
  EXPECT_TRUE(within_sigmas(estimate_edge_inclusion(MatcherKind::lr, k2, {0, 1}, 1'000'000, rng),
                            15.0 / 64.0));
  EXPECT_TRUE(within_sigmas(
      estimate_edge_inclusion(MatcherKind::distributed_sync, k2, {0, 1}, 1'000'000, rng), 0.5));
}

TEST(Matchers, SimpleOnK3) {
  Rng rng{4};
  const auto est = estimate_edge_inclusion(MatcherKind::simple, Graph::complete(3), {0, 2},
                                           1'000'000, rng);
  EXPECT_TRUE(within_sigmas(est, 1.0 / 3.0));
}

TEST(Matchers, UniformEdgeOnStar) {
  Rng rng{5};
  const auto g = star(3);
  const auto est = estimate_all_edge_inclusions(MatcherKind::uniform_edge, g, 300'000, rng);
  for (const auto& e : est) EXPECT_TRUE(within_sigmas(e, 1.0 / 3.0));
}

TEST(Matchers, LrFloorOnK3AndDsFloorOnK4) {
  Rng rng{6};
  const auto lr = estimate_edge_inclusion(MatcherKind::lr, Graph::complete(3), {0, 1}, 1'000'000,
                                          rng);
  EXPECT_GE(lr.estimate - 3 * lr.std_error, 1.0 / 16.0);
  const auto ds = estimate_edge_inclusion(MatcherKind::distributed_sync, Graph::complete(4),
                                          {1, 3}, 1'000'000, rng);
  EXPECT_GE(ds.estimate - 3 * ds.std_error, 1.0 / 12.0);
}

// Monte-Carlo against exact enumeration, at 4 sigma because each graph
// contributes several comparisons.
TEST(Matchers, LrAndDsMatchEnumeration) {
  std::vector<Graph> graphs{Graph::complete(3), Graph::complete(4), star(3), path_graph(4),
                            new_graph(4, EdgeListGraph{{{0, 1}, {1, 2}, {2, 0}, {2, 3}}})};
  std::uint64_t stream = 0;
  for (const auto& g : graphs) {
    for (auto kind : {MatcherKind::lr, MatcherKind::distributed_sync}) {
      const auto exact = kind == MatcherKind::lr ? lr_exact(g) : ds_exact(g);
      Rng rng = make_stream(77, stream++);
      const auto est = estimate_all_edge_inclusions(kind, g, 400'000, rng);
      const auto edges = g.edges();
      for (std::size_t i = 0; i < edges.size(); ++i) {
        const double p = exact.count(edges[i]) ? exact.at(edges[i]) : 0.0;
        EXPECT_TRUE(within_sigmas(est[i], p, 4.0))
            << to_string(kind) << " edge " << edges[i].u << "-" << edges[i].v << " exact " << p
            << " est " << est[i].estimate;
        // The floor holds exactly, not only statistically.
        const double floor = fairness_floor(kind, g.size()) /
                             static_cast<double>(std::max(g.degree(edges[i].u), g.degree(edges[i].v)));
        EXPECT_GE(p, floor);
      }
    }
  }
}

TEST(Matchers, ExactFormsOnWholeCorpusForSimpleAndUniform) {
  // Exact per-edge probabilities for the simple and uniform-edge matchers are
  // at least the floor on every corpus graph.
  for (const auto& named : fairness_corpus()) {
    const auto& g = named.graph;
    for (const auto& e : g.edges()) {
      const double maxdeg = static_cast<double>(std::max(g.degree(e.u), g.degree(e.v)));
      EXPECT_GE(*exact_inclusion(MatcherKind::simple, g, e),
                fairness_floor(MatcherKind::simple, g.size()) / maxdeg);
      EXPECT_GE(*exact_inclusion(MatcherKind::uniform_edge, g, e),
                fairness_floor(MatcherKind::uniform_edge, g.size()) / maxdeg);
    }
  }
}

TEST(Matchers, CorpusHasExpectedClasses) {
  // Connected graphs up to isomorphism: 1, 1, 2, 6, 21 on 1..5 vertices.
  EXPECT_EQ(connected_graphs(1).size(), 1u);
  EXPECT_EQ(connected_graphs(2).size(), 1u);
  EXPECT_EQ(connected_graphs(3).size(), 2u);
  EXPECT_EQ(connected_graphs(4).size(), 6u);
  EXPECT_EQ(connected_graphs(5).size(), 21u);
  EXPECT_EQ(fairness_corpus().size(), 34u);
}

TEST(Matchers, OutputsAreMatchingsOfRandomGraphs) {
  Rng rng{8};
  for (int trial = 0; trial < 30; ++trial) {
    const auto n = std::size_t{2} + uniform_below<std::size_t>(rng, 60);
    const double density = std::uniform_real_distribution<double>(0.0, 1.0)(rng);
    const auto g = random_graph(n, density, rng);
    for (auto kind : all_matcher_kinds) {
      for (int i = 0; i < 100; ++i) ASSERT_TRUE(is_valid_matching(g, draw_matching(kind, g, rng)));
    }
  }
}

TEST(Matchers, ValidityCheckerRejectsBadMatchings) {
  const auto g = path_graph(4);
  EXPECT_TRUE(is_valid_matching(g, Matching{{{0, 1}, {2, 3}}}));
  EXPECT_FALSE(is_valid_matching(g, Matching{{{0, 1}, {1, 2}}}));
  EXPECT_FALSE(is_valid_matching(g, Matching{{{0, 2}}}));
}

TEST(Matchers, Deterministic) {
  Rng g_rng{9};
  const auto g = random_graph(30, 0.3, g_rng);
  for (auto kind : all_matcher_kinds) {
    Rng a{42};
    Rng b{42};
    for (int i = 0; i < 100; ++i) {
      EXPECT_EQ(draw_matching(kind, g, a).edges, draw_matching(kind, g, b).edges);
    }
  }
}

TEST(Matchers, EstimateRejectsMissingEdge) {
  Rng rng{1};
  EXPECT_THROW(estimate_edge_inclusion(MatcherKind::lr, path_graph(3), {0, 2}, 10, rng),
               std::invalid_argument);
  EXPECT_THROW(estimate_edge_inclusion(MatcherKind::lr, path_graph(3), {0, 1}, 0, rng),
               std::invalid_argument);
}
