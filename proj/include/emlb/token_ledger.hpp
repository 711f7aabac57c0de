#pragma once

#include "emlb/balance.hpp"
#include "emlb/matchers.hpp"

#include <cmath>
#include <cstdint>
#include <ostream>
#include <stdexcept>
#include <string>
#include <vector>

namespace emlb {

using Height = std::int64_t;
using TokenId = std::uint32_t;

/// Vertex a token sits on and its height in that vertex's pile (1-based).
struct TokenPlace {
  Vertex vertex = 0;
  Height height = 0;

  friend bool operator==(const TokenPlace&, const TokenPlace&) = default;
};

struct PileMove {
  bool to_partner = false;
  Height height = 0;
};

/// Reallocation of one pile token across a matched edge. The token sits on the
/// heavier pile, `lighter` is the partner pile's height, and
/// `heavier_gets_ceil` selects rounding case (i). Tokens at or below `lighter`
/// stay; above it, d = height - lighter maps to lighter + ceil(d/2), odd d
/// staying in case (i) and even d staying in case (ii).
constexpr PileMove pile_move(Height height, Load lighter, bool heavier_gets_ceil) noexcept {
  if (height <= lighter) return {false, height};
  const Height d = height - lighter;
  const bool odd = (d % 2) == 1;
  return {odd != heavier_gets_ceil, lighter + (d + 1) / 2};
}

/// True iff h_next - x <= ceil((h - x)/2).
inline bool verify_halved_bound(Height h, double x, Load gamma_v, Height h_next) {
  (void)gamma_v;  // only constrains which h_next are reachable
  return static_cast<double>(h_next) - x <= std::ceil((static_cast<double>(h) - x) / 2.0);
}

/// Labelled tokens and complementary tokens of one execution. Token a_i has
/// id i-1; ids are assigned vertex by vertex, bottom to top. Complementary
/// tokens carry inverted heights H̄ in 1..K-Γ(v); H(b) = K+1-H̄(b).
class TokenLedger {
 public:
  explicit TokenLedger(const TokenConfig& c)
      : total_(c.total()), piles_(c.size()), comp_piles_(c.size()) {
    for (Vertex v = 0; v < c.size(); ++v) {
      for (Height h = 1; h <= c[v]; ++h) {
        piles_[v].push_back(static_cast<TokenId>(tokens_.size()));
        tokens_.push_back({v, h});
      }
    }
    for (Vertex v = 0; v < c.size(); ++v) {
      for (Height h = 1; h <= c.complement(v); ++h) {
        comp_piles_[v].push_back(static_cast<TokenId>(comp_.size()));
        comp_.push_back({v, h});
      }
    }
  }

  std::size_t vertex_count() const noexcept { return piles_.size(); }
  Load total() const noexcept { return total_; }

  const std::vector<TokenPlace>& tokens() const noexcept { return tokens_; }
  /// Complementary tokens; `height` is the inverted height H̄.
  const std::vector<TokenPlace>& complementary() const noexcept { return comp_; }

  Height complementary_height(TokenId b) const { return total_ + 1 - comp_.at(b).height; }

  /// Reallocates tokens for one step. `before` is the configuration the
  /// matching was applied to and `choices` the coins used by apply_matching.
  void advance(const TokenConfig& before, const Matching& m, const RoundingChoices& choices) {
    require_consistent(before);
    if (choices.first_gets_ceil.size() != m.size()) {
      throw std::invalid_argument("one rounding choice per matched edge required");
    }
    for (std::size_t i = 0; i < m.size(); ++i) {
      const auto& e = m.edges[i];
      // Heavier endpoint plays v; ties go to the lower index.
      const Vertex heavy = before[e.u] >= before[e.v] ? e.u : e.v;
      const Vertex light = e.other(heavy);
      const bool case_i = (heavy == e.u) == static_cast<bool>(choices.first_gets_ceil[i]);
      reallocate(tokens_, piles_, heavy, light, before[light], case_i);
      // Complementary piles are mirrored: the lighter vertex holds the taller one.
      reallocate(comp_, comp_piles_, light, heavy, before.complement(heavy), case_i);
    }
  }

  /// Ledger well-formedness against `c`: height sets, complementary height
  /// sets, the bounds Γ(v)+1 <= H(b) <= K and token counts.
  std::vector<std::string> violations(const TokenConfig& c) const {
    std::vector<std::string> out;
    if (c.size() != vertex_count() || c.total() != total_) {
      out.push_back("ledger shape does not match configuration");
      return out;
    }
    const auto n = static_cast<Vertex>(c.size());
    check_height_sets(tokens_, n, [&](Vertex v) { return c[v]; }, "token", out);
    check_height_sets(comp_, n, [&](Vertex v) { return c.complement(v); }, "complementary token",
                      out);
    for (TokenId b = 0; b < comp_.size(); ++b) {
      const auto hb = complementary_height(b);
      if (hb < c[comp_[b].vertex] + 1 || hb > total_) {
        out.push_back("complementary token " + std::to_string(b) + " height " +
                      std::to_string(hb) + " outside [Γ+1, K]");
      }
    }
    return out;
  }

  /// CSV rows `step,kind,id,vertex,height` (kind: token or complement).
  void dump_csv(std::ostream& os, std::uint64_t step, bool header = false) const {
    if (header) os << "step,kind,id,vertex,height\n";
    for (TokenId a = 0; a < tokens_.size(); ++a) {
      os << step << ",token," << a << ',' << tokens_[a].vertex << ',' << tokens_[a].height << '\n';
    }
    for (TokenId b = 0; b < comp_.size(); ++b) {
      os << step << ",complement," << b << ',' << comp_[b].vertex << ',' << comp_[b].height << '\n';
    }
  }

 private:
  using Piles = std::vector<std::vector<TokenId>>;

  void require_consistent(const TokenConfig& c) const {
    if (c.size() != vertex_count() || c.total() != total_) {
      throw std::invalid_argument("ledger and configuration disagree on n or K");
    }
    for (Vertex v = 0; v < c.size(); ++v) {
      if (static_cast<Load>(piles_[v].size()) != c[v] ||
          static_cast<Load>(comp_piles_[v].size()) != c.complement(v)) {
        throw std::invalid_argument("ledger pile on vertex " + std::to_string(v) +
                                    " does not match the configuration");
      }
    }
  }

  static void reallocate(std::vector<TokenPlace>& places, Piles& piles, Vertex heavy, Vertex light,
                         Load lighter, bool heavier_gets_ceil) {
    auto& from = piles[heavy];
    auto& to = piles[light];
    std::vector<TokenId> stay(from.begin(), from.begin() + lighter);
    for (Height h = lighter + 1; h <= static_cast<Height>(from.size()); ++h) {
      const TokenId id = from[static_cast<std::size_t>(h - 1)];
      const auto mv = pile_move(h, lighter, heavier_gets_ceil);
      auto& dest = mv.to_partner ? to : stay;
      if (static_cast<Height>(dest.size()) + 1 != mv.height) {
        throw std::logic_error("pile reallocation produced a gap");
      }
      dest.push_back(id);
      places[id] = {mv.to_partner ? light : heavy, mv.height};
    }
    from = std::move(stay);
  }

  template <typename LoadOf>
  static void check_height_sets(const std::vector<TokenPlace>& places, Vertex vertices,
                                LoadOf load_of, const char* what, std::vector<std::string>& out) {
    // seen[offset[v] + h - 1] marks height h on v.
    std::vector<std::size_t> offset(vertices);
    std::vector<Load> loads(vertices);
    std::size_t running = 0;
    for (Vertex v = 0; v < vertices; ++v) {
      offset[v] = running;
      loads[v] = load_of(v);
      running += static_cast<std::size_t>(loads[v]);
    }
    if (running != places.size()) {
      out.push_back(std::string(what) + " count " + std::to_string(places.size()) +
                    " differs from configured total " + std::to_string(running));
      return;
    }
    std::vector<bool> seen(running, false);
    for (std::size_t id = 0; id < places.size(); ++id) {
      const auto& p = places[id];
      if (p.vertex >= vertices || p.height < 1 || p.height > loads[p.vertex]) {
        out.push_back(std::string(what) + " " + std::to_string(id) + " at (" +
                      std::to_string(p.vertex) + "," + std::to_string(p.height) +
                      ") outside its pile");
        continue;
      }
      const auto slot = offset[p.vertex] + static_cast<std::size_t>(p.height - 1);
      if (seen[slot]) {
        out.push_back(std::string(what) + " height " + std::to_string(p.height) +
                      " repeated on vertex " + std::to_string(p.vertex));
      }
      seen[slot] = true;
    }
  }

  Load total_ = 0;
  std::vector<TokenPlace> tokens_;
  std::vector<TokenPlace> comp_;
  Piles piles_;
  Piles comp_piles_;
};

/// Checks one ledger step against the monotonicity (A1/B1) and averaging
/// (A2/B2) properties. `before_config` is the configuration `m` was applied to.
inline std::vector<std::string> transition_violations(const TokenLedger& before,
                                                      const TokenLedger& after,
                                                      const TokenConfig& before_config,
                                                      const Matching& m) {
  std::vector<std::string> out;
  const auto& a0 = before.tokens();
  const auto& a1 = after.tokens();
  const auto& b0 = before.complementary();
  const auto& b1 = after.complementary();
  if (a0.size() != a1.size() || b0.size() != b1.size()) {
    out.push_back("token sets differ between steps");
    return out;
  }
  for (TokenId a = 0; a < a0.size(); ++a) {
    if (a1[a].height > a0[a].height) {
      out.push_back("A1: token " + std::to_string(a) + " rose from " +
                    std::to_string(a0[a].height) + " to " + std::to_string(a1[a].height));
    }
  }
  for (TokenId b = 0; b < b0.size(); ++b) {
    if (b1[b].height > b0[b].height) {
      out.push_back("B1: complementary token " + std::to_string(b) + " rose from " +
                    std::to_string(b0[b].height) + " to " + std::to_string(b1[b].height));
    }
  }

  constexpr Vertex unmatched = ~Vertex{0};
  std::vector<Vertex> partner(before_config.size(), unmatched);
  for (const auto& e : m.edges) {
    partner[e.u] = e.v;
    partner[e.v] = e.u;
  }
  const auto halved = [](Height h, Load floor_load) {
    const Height d = h - floor_load;
    return floor_load + (d + 1) / 2;
  };
  for (TokenId a = 0; a < a0.size(); ++a) {
    const Vertex v = a0[a].vertex;
    const Vertex u = partner[v];
    if (u == unmatched || before_config[v] < before_config[u]) continue;
    if (a0[a].height >= before_config[u] && a1[a].height != halved(a0[a].height, before_config[u])) {
      out.push_back("A2: token " + std::to_string(a) + " did not halve its excess over " +
                    std::to_string(before_config[u]));
    }
  }
  for (TokenId b = 0; b < b0.size(); ++b) {
    const Vertex v = b0[b].vertex;
    const Vertex u = partner[v];
    if (u == unmatched || before_config.complement(v) < before_config.complement(u)) continue;
    const Load floor_load = before_config.complement(u);
    if (b0[b].height >= floor_load && b1[b].height != halved(b0[b].height, floor_load)) {
      out.push_back("B2: complementary token " + std::to_string(b) +
                    " did not halve its excess over " + std::to_string(floor_load));
    }
  }
  return out;
}

inline TokenLedger init_ledger(const TokenConfig& c) { return TokenLedger(c); }

inline TokenLedger advance_ledger(TokenLedger ledger, const TokenConfig& c, const Matching& m,
                                  const RoundingChoices& choices) {
  ledger.advance(c, m, choices);
  return ledger;
}

}  // namespace emlb
