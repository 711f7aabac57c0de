#pragma once

#include "emlb/emlb.hpp"

#include <cmath>
#include <cstdint>
#include <vector>

namespace emlb::testing {

// Random G(n, density) for property tests.
inline Graph random_graph(std::size_t n, double density, Rng& rng) {
  Graph g(n);
  std::bernoulli_distribution coin(density);
  for (Vertex u = 0; u < n; ++u) {
    for (Vertex v = u + 1; v < n; ++v) {
      if (coin(rng)) g.add_edge(u, v);
    }
  }
  return g;
}

inline std::vector<Load> random_loads(std::size_t n, Load max_load, Rng& rng) {
  std::uniform_int_distribution<Load> dist(0, max_load);
  std::vector<Load> loads(n);
  for (auto& l : loads) l = dist(rng);
  return loads;
}

// Bernoulli(prob) frequency `hits/trials` within `sigmas` binomial standard errors.
inline bool binomial_close(std::uint64_t hits, std::uint64_t trials, double prob,
                           double sigmas = 3.0) {
  const double n = static_cast<double>(trials);
  const double se = std::sqrt(prob * (1.0 - prob) / n);
  return std::abs(static_cast<double>(hits) / n - prob) <= sigmas * se + 1e-12;
}

}  // namespace emlb::testing
