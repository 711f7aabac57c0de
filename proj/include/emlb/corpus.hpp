#pragma once

#include "emlb/evolving_graph.hpp"

#include <algorithm>
#include <cstdint>
#include <numeric>
#include <string>
#include <vector>

namespace emlb {

struct NamedGraph {
  std::string name;
  Graph graph;
};

namespace detail {

inline bool connected(const Graph& g) {
  std::vector<bool> seen(g.size(), false);
  std::vector<Vertex> stack{0};
  seen[0] = true;
  std::size_t reached = 1;
  while (!stack.empty()) {
    const auto v = stack.back();
    stack.pop_back();
    g.for_each_neighbor(v, [&](Vertex u) {
      if (!seen[u]) {
        seen[u] = true;
        ++reached;
        stack.push_back(u);
      }
    });
  }
  return reached == g.size();
}

// Pair index of {u,v}, u < v, in lexicographic order over n vertices.
inline std::size_t pair_index(std::size_t n, Vertex u, Vertex v) {
  return u * n - u * (u + 1) / 2 + (v - u - 1);
}

inline Graph from_mask(std::size_t n, std::uint32_t mask) {
  Graph g(n);
  std::size_t bit = 0;
  for (Vertex u = 0; u < n; ++u) {
    for (Vertex v = u + 1; v < n; ++v, ++bit) {
      if ((mask >> bit) & 1U) g.add_edge(u, v);
    }
  }
  return g;
}

// Smallest pair mask over all relabellings.
inline std::uint32_t canonical_mask(std::size_t n, std::uint32_t mask) {
  std::vector<Vertex> perm(n);
  std::iota(perm.begin(), perm.end(), Vertex{0});
  auto best = mask;
  do {
    std::uint32_t image = 0;
    std::size_t bit = 0;
    for (Vertex u = 0; u < n; ++u) {
      for (Vertex v = u + 1; v < n; ++v, ++bit) {
        if ((mask >> bit) & 1U) {
          const auto a = std::min(perm[u], perm[v]);
          const auto b = std::max(perm[u], perm[v]);
          image |= std::uint32_t{1} << pair_index(n, a, b);
        }
      }
    }
    best = std::min(best, image);
  } while (std::next_permutation(perm.begin(), perm.end()));
  return best;
}

}  // namespace detail

/// One representative per isomorphism class of connected graphs on n vertices
/// (n <= 6).
inline std::vector<Graph> connected_graphs(std::size_t n) {
  const auto pairs = n * (n - 1) / 2;
  std::vector<std::uint32_t> canon;
  std::vector<Graph> out;
  for (std::uint32_t mask = 0; mask < (std::uint32_t{1} << pairs); ++mask) {
    auto g = detail::from_mask(n, mask);
    if (!detail::connected(g)) continue;
    const auto c = detail::canonical_mask(n, mask);
    if (std::find(canon.begin(), canon.end(), c) != canon.end()) continue;
    canon.push_back(c);
    out.push_back(std::move(g));
  }
  return out;
}

inline Graph star_graph(std::size_t leaves) {
  Graph g(leaves + 1);
  for (Vertex v = 1; v <= leaves; ++v) g.add_edge(0, v);
  return g;
}

inline Graph path_graph(std::size_t n) {
  Graph g(n);
  for (Vertex v = 1; v < n; ++v) g.add_edge(v - 1, v);
  return g;
}

/// Connected graphs on up to five vertices, plus K8, the star K1,7 and P8.
inline std::vector<NamedGraph> fairness_corpus() {
  std::vector<NamedGraph> out;
  for (std::size_t n = 1; n <= 5; ++n) {
    std::size_t index = 0;
    for (auto& g : connected_graphs(n)) {
      out.push_back({"C" + std::to_string(n) + "." + std::to_string(index++), std::move(g)});
    }
  }
  out.push_back({"K8", Graph::complete(8)});
  out.push_back({"K1,7", star_graph(7)});
  out.push_back({"P8", path_graph(8)});
  return out;
}

}  // namespace emlb
