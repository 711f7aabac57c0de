#pragma once

#include "emlb/rng.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <compare>
#include <cstddef>
#include <cstdint>
#include <istream>
#include <sstream>
#include <stdexcept>
#include <string>
#include <utility>
#include <variant>
#include <vector>

namespace emlb {

using Vertex = std::uint32_t;

/// Unordered vertex pair, stored with `u < v`.
struct Edge {
  Vertex u = 0;
  Vertex v = 0;

  constexpr Edge() = default;
  constexpr Edge(Vertex a, Vertex b) : u(a < b ? a : b), v(a < b ? b : a) {}

  constexpr bool touches(Vertex w) const noexcept { return u == w || v == w; }
  constexpr Vertex other(Vertex w) const noexcept { return w == u ? v : u; }

  friend constexpr auto operator<=>(const Edge&, const Edge&) = default;
};

/// Simple undirected graph on vertices 0..n-1, held as a symmetric bit matrix.
/// Row v is the neighbourhood N(v); bit (v,v) is never set.
class Graph {
 public:
  explicit Graph(std::size_t n) : n_(n), stride_((n + 63) / 64), bits_(n * stride_, 0) {
    if (n == 0) throw std::invalid_argument("graph needs at least one vertex");
  }

  static Graph complete(std::size_t n) {
    Graph g(n);
    for (Vertex v = 0; v < n; ++v) {
      auto* row = g.row_ptr(v);
      for (std::size_t w = 0; w < g.stride_; ++w) row[w] = ~std::uint64_t{0};
      if (n % 64 != 0) row[g.stride_ - 1] = (std::uint64_t{1} << (n % 64)) - 1;
      row[v / 64] &= ~(std::uint64_t{1} << (v % 64));
    }
    g.edges_ = n * (n - 1) / 2;
    return g;
  }

  std::size_t size() const noexcept { return n_; }
  std::size_t edge_count() const noexcept { return edges_; }

  bool has_edge(Vertex a, Vertex b) const noexcept {
    return (row_ptr(a)[b / 64] >> (b % 64)) & 1U;
  }

  /// Inserts or removes {a,b}. Self-loops are rejected.
  void set_edge(Vertex a, Vertex b, bool present) {
    check_vertex(a);
    check_vertex(b);
    if (a == b) throw std::invalid_argument("self-loop on vertex " + std::to_string(a));
    if (has_edge(a, b) == present) return;
    flip(a, b);
    flip(b, a);
    if (present) {
      ++edges_;
    } else {
      --edges_;
    }
  }

  void add_edge(Vertex a, Vertex b) { set_edge(a, b, true); }
  void remove_edge(Vertex a, Vertex b) { set_edge(a, b, false); }

  std::size_t degree(Vertex v) const {
    check_vertex(v);
    std::size_t d = 0;
    const auto* row = row_ptr(v);
    for (std::size_t w = 0; w < stride_; ++w) d += static_cast<std::size_t>(std::popcount(row[w]));
    return d;
  }

  std::vector<std::size_t> degrees() const {
    std::vector<std::size_t> out(n_);
    for (Vertex v = 0; v < n_; ++v) out[v] = degree(v);
    return out;
  }

  /// The k-th neighbour of v in ascending order; k < degree(v).
  Vertex nth_neighbor(Vertex v, std::size_t k) const {
    const auto* row = row_ptr(v);
    for (std::size_t w = 0; w < stride_; ++w) {
      auto word = row[w];
      const auto count = static_cast<std::size_t>(std::popcount(word));
      if (k < count) {
        for (; k > 0; --k) word &= word - 1;
        return static_cast<Vertex>(w * 64 + static_cast<std::size_t>(std::countr_zero(word)));
      }
      k -= count;
    }
    throw std::out_of_range("neighbour index beyond degree");
  }

  template <typename Fn>
  void for_each_neighbor(Vertex v, Fn&& fn) const {
    const auto* row = row_ptr(v);
    for (std::size_t w = 0; w < stride_; ++w) {
      for (auto word = row[w]; word != 0; word &= word - 1) {
        fn(static_cast<Vertex>(w * 64 + static_cast<std::size_t>(std::countr_zero(word))));
      }
    }
  }

  std::vector<Vertex> neighbors(Vertex v) const {
    check_vertex(v);
    std::vector<Vertex> out;
    for_each_neighbor(v, [&](Vertex u) { out.push_back(u); });
    return out;
  }

  /// Edges in ascending (u,v) order.
  std::vector<Edge> edges() const {
    std::vector<Edge> out;
    out.reserve(edges_);
    for (Vertex u = 0; u < n_; ++u) {
      for_each_neighbor(u, [&](Vertex v) {
        if (u < v) out.emplace_back(u, v);
      });
    }
    return out;
  }

  void check_vertex(Vertex v) const {
    if (v >= n_) {
      throw std::out_of_range("vertex " + std::to_string(v) + " out of range for n=" +
                              std::to_string(n_));
    }
  }

  friend bool operator==(const Graph& a, const Graph& b) noexcept {
    return a.n_ == b.n_ && a.bits_ == b.bits_;
  }

 private:
  std::uint64_t* row_ptr(Vertex v) noexcept { return bits_.data() + v * stride_; }
  const std::uint64_t* row_ptr(Vertex v) const noexcept { return bits_.data() + v * stride_; }
  void flip(Vertex a, Vertex b) noexcept { row_ptr(a)[b / 64] ^= std::uint64_t{1} << (b % 64); }

  std::size_t n_;
  std::size_t stride_;
  std::vector<std::uint64_t> bits_;
  std::size_t edges_ = 0;
};

inline std::size_t degree(const Graph& g, Vertex v) { return g.degree(v); }

/// Birth probability p and death probability q of the per-pair two-state chain.
class EdgeMarkovParams {
 public:
  EdgeMarkovParams(double p, double q) : p_(p), q_(q) {
    if (!(p > 0.0 && p <= 1.0)) throw std::invalid_argument("p must lie in (0,1]");
    if (!(q >= 0.0 && q < 1.0)) throw std::invalid_argument("q must lie in [0,1)");
  }

  double p() const noexcept { return p_; }
  double q() const noexcept { return q_; }

 private:
  double p_;
  double q_;
};

/// Limit of Pr[{u,v} in E_t].
inline double stationary_edge_probability(const EdgeMarkovParams& params) {
  return params.p() / (params.p() + params.q());
}

/// Steps after which the per-pair law is within total variation `eps` of
/// stationarity from any start: ceil(log eps / log|1-p-q|). When p+q=1 one
/// step already lands exactly on the stationary law (G_0 itself is arbitrary).
inline std::uint64_t mixing_steps(const EdgeMarkovParams& params, double eps) {
  if (!(eps > 0.0 && eps < 1.0)) throw std::invalid_argument("eps must lie in (0,1)");
  const double lambda = std::abs(1.0 - params.p() - params.q());
  if (lambda < 1e-12) return 1;
  const double t = std::log(eps) / std::log(lambda);
  // Guard against t landing a hair above an integer through rounding.
  const double rounded = std::round(t);
  if (std::abs(t - rounded) < 1e-9) return static_cast<std::uint64_t>(std::max(0.0, rounded));
  return static_cast<std::uint64_t>(std::ceil(t));
}

/// One transition of the edge-Markovian chain into `out` (resized to match).
/// Exactly one decision per unordered pair; decisions with probability 0 or 1
/// consume no randomness.
inline void evolve_into(const Graph& g, const EdgeMarkovParams& params, Rng& rng, Graph& out) {
  const auto n = g.size();
  if (params.p() >= 1.0 && params.q() <= 0.0) {
    out = Graph::complete(n);
    return;
  }
  out = Graph(n);
  const Coin birth(params.p());
  const Coin survive(1.0 - params.q());
  for (Vertex u = 0; u < n; ++u) {
    for (Vertex v = u + 1; v < n; ++v) {
      const bool next = g.has_edge(u, v) ? survive(rng) : birth(rng);
      if (next) out.add_edge(u, v);
    }
  }
}

inline Graph evolve(const Graph& g, const EdgeMarkovParams& params, Rng& rng) {
  Graph out(g.size());
  evolve_into(g, params, rng, out);
  return out;
}

// Initial-graph specifications.
struct EmptyGraph {};
struct CompleteGraph {};
struct StationaryGraph {
  EdgeMarkovParams params;
  std::uint64_t seed = 0;
};
struct EdgeListGraph {
  std::vector<std::pair<Vertex, Vertex>> edges;
};

using GraphInit = std::variant<EmptyGraph, CompleteGraph, StationaryGraph, EdgeListGraph>;

inline Graph new_graph(std::size_t n, const GraphInit& init) {
  if (n == 0) throw std::invalid_argument("graph needs at least one vertex");
  return std::visit(
      [n](const auto& spec) -> Graph {
        using Spec = std::decay_t<decltype(spec)>;
        if constexpr (std::is_same_v<Spec, EmptyGraph>) {
          return Graph(n);
        } else if constexpr (std::is_same_v<Spec, CompleteGraph>) {
          return Graph::complete(n);
        } else if constexpr (std::is_same_v<Spec, StationaryGraph>) {
          Graph g(n);
          Rng rng{spec.seed};
          const Coin present(stationary_edge_probability(spec.params));
          for (Vertex u = 0; u < n; ++u) {
            for (Vertex v = u + 1; v < n; ++v) {
              if (present(rng)) g.add_edge(u, v);
            }
          }
          return g;
        } else {
          Graph g(n);
          for (const auto& [a, b] : spec.edges) {
            if (a >= n || b >= n) {
              throw std::invalid_argument("edge (" + std::to_string(a) + "," + std::to_string(b) +
                                          ") references a vertex >= n=" + std::to_string(n));
            }
            if (a == b) throw std::invalid_argument("self-loop on vertex " + std::to_string(a));
            if (g.has_edge(a, b)) {
              throw std::invalid_argument("duplicate edge (" + std::to_string(a) + "," +
                                          std::to_string(b) + ")");
            }
            g.add_edge(a, b);
          }
          return g;
        }
      },
      init);
}

/// Reads `u v` pairs, one per line. Blank lines and `#` comments are skipped.
inline EdgeListGraph read_edge_list(std::istream& in) {
  EdgeListGraph out;
  std::string line;
  std::size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (const auto hash = line.find('#'); hash != std::string::npos) line.erase(hash);
    if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
    std::istringstream fields(line);
    long long a = -1;
    long long b = -1;
    std::string extra;
    if (!(fields >> a >> b) || (fields >> extra) || a < 0 || b < 0) {
      throw std::invalid_argument("edge list line " + std::to_string(lineno) +
                                  ": expected two non-negative vertex ids");
    }
    out.edges.emplace_back(static_cast<Vertex>(a), static_cast<Vertex>(b));
  }
  return out;
}

inline double edge_density(const Graph& g) {
  const auto n = g.size();
  if (n < 2) return 0.0;
  return static_cast<double>(g.edge_count()) / (static_cast<double>(n) * (n - 1) / 2.0);
}

}  // namespace emlb
