#pragma once

#include "emlb/matchers.hpp"
#include "emlb/rng.hpp"

#include <algorithm>
#include <cstdint>
#include <istream>
#include <numeric>
#include <span>
#include <sstream>
#include <stdexcept>
#include <string>
#include <utility>
#include <variant>
#include <vector>

namespace emlb {

using Load = std::int64_t;

/// One coin per matched edge, in the matching's edge order: true means the
/// lower-indexed endpoint receives the ceiling of the pair average.
struct RoundingChoices {
  std::vector<bool> first_gets_ceil;

  friend bool operator==(const RoundingChoices&, const RoundingChoices&) = default;
};

/// Per-vertex token counts. Loads are non-negative; the total is cached.
class TokenConfig {
 public:
  TokenConfig() = default;

  explicit TokenConfig(std::vector<Load> loads) : loads_(std::move(loads)) {
    for (std::size_t v = 0; v < loads_.size(); ++v) {
      if (loads_[v] < 0) {
        throw std::invalid_argument("negative load " + std::to_string(loads_[v]) + " on vertex " +
                                    std::to_string(v));
      }
    }
    total_ = std::accumulate(loads_.begin(), loads_.end(), Load{0});
  }

  std::size_t size() const noexcept { return loads_.size(); }
  Load total() const noexcept { return total_; }
  Load operator[](std::size_t v) const { return loads_[v]; }
  std::span<const Load> loads() const noexcept { return loads_; }

  Load min_load() const { return loads_.empty() ? 0 : *std::min_element(loads_.begin(), loads_.end()); }
  Load max_load() const { return loads_.empty() ? 0 : *std::max_element(loads_.begin(), loads_.end()); }

  /// Complementary load K - Γ(v).
  Load complement(std::size_t v) const { return total_ - loads_[v]; }

  friend bool operator==(const TokenConfig&, const TokenConfig&) = default;

 private:
  friend TokenConfig apply_matching(const TokenConfig&, const Matching&,
                                    const RoundingChoices&);
  std::vector<Load> loads_;
  Load total_ = 0;
};

/// floor(a/b) for b > 0.
constexpr std::int64_t floor_div(std::int64_t a, std::int64_t b) noexcept {
  return a / b - ((a % b != 0) && (a < 0));
}

/// ceil(a/b) for b > 0.
constexpr std::int64_t ceil_div(std::int64_t a, std::int64_t b) noexcept {
  return a / b + ((a % b != 0) && (a > 0));
}

/// Nearest integer to num/den with halves rounded down: ceil(x - 1/2).
constexpr std::int64_t nearest_int(std::int64_t num, std::int64_t den) {
  if (den <= 0) throw std::invalid_argument("denominator must be positive");
  return ceil_div(2 * num - den, 2 * den);
}

inline Load discrepancy(const TokenConfig& c) { return c.max_load() - c.min_load(); }

/// Every load lies in {m-1, m, m+1} where m is the rounded mean.
inline bool is_balanced(const TokenConfig& c) {
  if (c.size() == 0) return true;
  const auto m = nearest_int(c.total(), static_cast<std::int64_t>(c.size()));
  return c.min_load() >= m - 1 && c.max_load() <= m + 1;
}

/// Averages each matched pair with the given rounding choices.
inline TokenConfig apply_matching(const TokenConfig& c, const Matching& m,
                                  const RoundingChoices& choices) {
  if (choices.first_gets_ceil.size() != m.size()) {
    throw std::invalid_argument("one rounding choice per matched edge required");
  }
  TokenConfig next = c;
  for (std::size_t i = 0; i < m.size(); ++i) {
    const auto& e = m.edges[i];
    if (e.v >= c.size()) throw std::out_of_range("matching references a vertex outside the config");
    const Load sum = c.loads_[e.u] + c.loads_[e.v];
    const Load hi = sum - sum / 2;
    const Load lo = sum / 2;
    if (choices.first_gets_ceil[i]) {
      next.loads_[e.u] = hi;
      next.loads_[e.v] = lo;
    } else {
      next.loads_[e.u] = lo;
      next.loads_[e.v] = hi;
    }
  }
  return next;
}

inline std::pair<TokenConfig, RoundingChoices> apply_matching(const TokenConfig& c,
                                                              const Matching& m, Rng& rng) {
  RoundingChoices choices;
  choices.first_gets_ceil.reserve(m.size());
  for (std::size_t i = 0; i < m.size(); ++i) {
    choices.first_gets_ceil.push_back(uniform_below<int>(rng, 2) == 1);
  }
  auto next = apply_matching(c, m, choices);
  return {std::move(next), std::move(choices)};
}

// Initial-load specifications.
struct PointMass {
  Load total = 0;
};
struct TwoLevel {
  Load low = 0;
  Load high = 0;
  std::size_t count_high = 0;
};
struct UniformRandomLoad {
  Load total = 0;
  std::uint64_t seed = 0;
};
struct LoadList {
  std::vector<Load> loads;
};

using LoadInit = std::variant<PointMass, TwoLevel, UniformRandomLoad, LoadList>;

inline TokenConfig initial_config(const LoadInit& spec, std::size_t n) {
  if (n == 0) throw std::invalid_argument("n must be positive");
  return std::visit(
      [n](const auto& s) -> TokenConfig {
        using Spec = std::decay_t<decltype(s)>;
        if constexpr (std::is_same_v<Spec, PointMass>) {
          if (s.total < 0) throw std::invalid_argument("point mass must be non-negative");
          std::vector<Load> loads(n, 0);
          loads[0] = s.total;
          return TokenConfig(std::move(loads));
        } else if constexpr (std::is_same_v<Spec, TwoLevel>) {
          if (s.count_high > n) throw std::invalid_argument("two-level count exceeds n");
          std::vector<Load> loads(n, s.low);
          std::fill_n(loads.begin(), s.count_high, s.high);
          return TokenConfig(std::move(loads));
        } else if constexpr (std::is_same_v<Spec, UniformRandomLoad>) {
          if (s.total < 0) throw std::invalid_argument("token total must be non-negative");
          std::vector<Load> loads(n, 0);
          Rng rng{s.seed};
          for (Load k = 0; k < s.total; ++k) ++loads[uniform_below<std::size_t>(rng, n)];
          return TokenConfig(std::move(loads));
        } else {
          if (s.loads.size() != n) {
            throw std::invalid_argument("load list has " + std::to_string(s.loads.size()) +
                                        " entries, expected " + std::to_string(n));
          }
          return TokenConfig(s.loads);
        }
      },
      spec);
}

/// One integer per line, vertex order. Blank lines and `#` comments are skipped.
inline LoadList read_load_file(std::istream& in) {
  LoadList out;
  std::string line;
  std::size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (const auto hash = line.find('#'); hash != std::string::npos) line.erase(hash);
    if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
    std::istringstream fields(line);
    long long value = 0;
    std::string extra;
    if (!(fields >> value) || (fields >> extra)) {
      throw std::invalid_argument("load file line " + std::to_string(lineno) +
                                  ": expected one integer");
    }
    if (value < 0) {
      throw std::invalid_argument("load file line " + std::to_string(lineno) + ": negative load");
    }
    out.loads.push_back(static_cast<Load>(value));
  }
  return out;
}

}  // namespace emlb
