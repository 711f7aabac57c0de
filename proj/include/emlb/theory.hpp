#pragma once

#include "emlb/balance.hpp"

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <optional>
#include <stdexcept>

namespace emlb {

/// max{p/(1-q), (1-q)/p}; equals 1 for independent graph sequences (p = 1-q).
inline double r_factor(double p, double q) {
  if (!(p > 0.0 && p <= 1.0)) throw std::invalid_argument("p must lie in (0,1]");
  if (!(q >= 0.0 && q < 1.0)) throw std::invalid_argument("q must lie in [0,1)");
  const double stay = 1.0 - q;
  return std::max(p / stay, stay / p);
}

/// (1 - exp(-θ/3))^2 / (2 + 1/θ); increases from 0 towards 1/2.
inline double c_star(double theta) {
  if (!(theta > 0.0)) throw std::invalid_argument("theta must be positive");
  const double gap = -std::expm1(-theta / 3.0);
  return gap * gap / (2.0 + 1.0 / theta);
}

/// Largest θ <= 1 admissible for (n, p, q): min(1, n max{p, 1-q}).
inline double default_theta(std::size_t n, double p, double q) {
  return std::min(1.0, static_cast<double>(n) * std::max(p, 1.0 - q));
}

struct BoundInputs {
  std::size_t n = 1;
  Load delta = 0;
  double eps = 0.25;
  double p = 0.5;
  double q = 0.5;
  std::optional<double> theta;  // defaults to default_theta(n, p, q)
  double fairness = 1.0;        // F

  double resolved_theta() const { return theta.value_or(default_theta(n, p, q)); }
};

/// Step counts sufficient for the two phases and their sum.
struct BalancingBound {
  double theta = 0.0;
  double r = 0.0;
  double c = 0.0;           // c_*(θ)
  double log_term = 0.0;    // ln(Δn/ε)
  double scale = 0.0;       // r/(c_* F) · ln(Δn/ε)
  std::uint64_t phase1 = 0; // ceil(36 · scale)
  std::uint64_t phase2 = 0; // ceil(54 · scale)
  std::uint64_t total = 0;  // phase1 + phase2 + 2
};

inline BalancingBound theorem_bound(const BoundInputs& in) {
  if (in.n == 0) throw std::invalid_argument("n must be positive");
  if (in.delta < 2) throw std::invalid_argument("bound requires discrepancy >= 2");
  // ε = 1/4 is admitted; the expression is continuous there.
  if (!(in.eps > 0.0 && in.eps <= 0.25)) throw std::invalid_argument("eps must lie in (0, 1/4]");
  if (!(in.fairness > 0.0 && in.fairness <= 1.0)) {
    throw std::invalid_argument("fairness F must lie in (0,1]");
  }
  const double theta = in.resolved_theta();
  if (!(theta > 0.0)) throw std::invalid_argument("theta must be positive");
  if (theta > static_cast<double>(in.n) * std::max(in.p, 1.0 - in.q) * (1.0 + 1e-12)) {
    throw std::invalid_argument("theta exceeds n max{p, 1-q}");
  }

  BalancingBound b;
  b.theta = theta;
  b.r = r_factor(in.p, in.q);
  b.c = c_star(theta);
  b.log_term = std::log(static_cast<double>(in.delta) * static_cast<double>(in.n) / in.eps);
  b.scale = b.r / (b.c * in.fairness) * b.log_term;
  b.phase1 = static_cast<std::uint64_t>(std::ceil(36.0 * b.scale));
  b.phase2 = static_cast<std::uint64_t>(std::ceil(54.0 * b.scale));
  b.total = b.phase1 + b.phase2 + 2;
  return b;
}

enum class LowSideCheck { holds, violated, hypothesis_not_met };

/// With min Γ >= μ - 1, at least n/3 vertices carry at most round(μ) tokens.
inline LowSideCheck low_side_count_ok(const TokenConfig& c) {
  const auto n = static_cast<std::int64_t>(c.size());
  if (n == 0) return LowSideCheck::holds;
  const auto k = c.total();
  // min >= K/n - 1  <=>  n·min >= K - n
  if (n * c.min_load() < k - n) return LowSideCheck::hypothesis_not_met;
  const auto m = nearest_int(k, n);
  const auto low = std::count_if(c.loads().begin(), c.loads().end(), [m](Load l) { return l <= m; });
  return 3 * static_cast<std::int64_t>(low) >= n ? LowSideCheck::holds : LowSideCheck::violated;
}

/// φ1 := μ-1 <= load <= round(μ)+1, φ2 := μ̄-1 <= K-load <= round(μ̄)+1 with
/// μ = K/n and μ̄ = K(n-1)/n, evaluated exactly. Returns φ1 ∨ φ2.
inline bool near_balanced(Load load, Load total, std::size_t vertices) {
  if (vertices == 0) throw std::invalid_argument("n must be positive");
  if (load < 0 || load > total) throw std::invalid_argument("load must lie in [0, K]");
  const auto n = static_cast<std::int64_t>(vertices);
  const bool phi1 = n * load >= total - n && load <= nearest_int(total, n) + 1;
  const auto comp = total - load;
  const auto comp_total = total * (n - 1);
  const bool phi2 = n * comp >= comp_total - n && comp <= nearest_int(comp_total, n) + 1;
  return phi1 || phi2;
}

}  // namespace emlb
