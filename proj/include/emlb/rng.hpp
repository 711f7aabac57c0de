#pragma once

#include <cmath>
#include <cstdint>
#include <limits>
#include <random>

namespace emlb {

/// Engine used for every random decision in the library.
using Rng = std::mt19937_64;

/// SplitMix64 finalizer; a bijection on 64-bit words with good avalanche.
constexpr std::uint64_t mix64(std::uint64_t x) noexcept {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

/// Seed of stream `index` under `master`. Distinct indices give unrelated streams.
constexpr std::uint64_t derive_seed(std::uint64_t master, std::uint64_t index) noexcept {
  return mix64(mix64(master) ^ mix64(index + 0x632be59bd9b4e019ULL));
}

inline Rng make_stream(std::uint64_t master, std::uint64_t index) {
  return Rng{derive_seed(master, index)};
}

/// Uniform integer in [0, bound). `bound` must be positive.
template <typename Int>
Int uniform_below(Rng& rng, Int bound) {
  return std::uniform_int_distribution<Int>{0, bound - 1}(rng);
}

/// Bernoulli trial with a precomputed 64-bit threshold. Probabilities 0 and 1
/// are decided without touching the engine.
class Coin {
 public:
  explicit Coin(double probability) noexcept {
    if (!(probability > 0.0)) {
      mode_ = Mode::never;
    } else if (probability >= 1.0) {
      mode_ = Mode::always;
    } else {
      mode_ = Mode::random;
      // 2^64 * p, p in (0,1), fits since p < 1.
      threshold_ = static_cast<std::uint64_t>(std::ldexp(probability, 64));
    }
  }

  bool operator()(Rng& rng) const {
    switch (mode_) {
      case Mode::never: return false;
      case Mode::always: return true;
      case Mode::random: break;
    }
    return rng() < threshold_;
  }

  bool degenerate() const noexcept { return mode_ != Mode::random; }

 private:
  enum class Mode : std::uint8_t { never, always, random };
  Mode mode_ = Mode::never;
  std::uint64_t threshold_ = 0;
};

}  // namespace emlb
