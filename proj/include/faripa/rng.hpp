#ifndef FARIPA_RNG_HPP
#define FARIPA_RNG_HPP

#include <cmath>
#include <cstdint>
#include <limits>
#include <random>

namespace faripa {

/**
 * Seeded random generator with a fully pinned-down mapping from raw engine
 * output to doubles, so that every sampled value is reproducible from the
 * seed alone and independent re-derivations are possible:
 *
 *   - engine: std::mt19937_64 seeded directly with the 64-bit seed
 *   - uniform():  (engine() >> 11) * 2^-53, i.e. 53-bit doubles in [0, 1)
 *   - gaussian(): Box-Muller on two uniform() draws,
 *                 r = sqrt(-2 ln u1), returns r cos(2 pi u2) first and
 *                 caches r sin(2 pi u2) for the next call
 *   - uniform_int(n): rejection sampling on raw engine draws, then modulo
 *
 * Identical seeds therefore give bit-identical streams.
 */
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : engine_(seed) {}

  std::uint64_t raw() { return engine_(); }

  /// Uniform double in [0, 1) with 53 random bits.
  double uniform() {
    return static_cast<double>(engine_() >> 11) * 0x1.0p-53;
  }

  double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }

  /// Standard normal draw (Box-Muller, spare value cached).
  double gaussian() {
    if (has_spare_) {
      has_spare_ = false;
      return spare_;
    }
    double u1 = uniform();
    while (u1 <= 0.0) u1 = uniform();
    const double u2 = uniform();
    const double r = std::sqrt(-2.0 * std::log(u1));
    const double a = 2.0 * M_PI * u2;
    spare_ = r * std::sin(a);
    has_spare_ = true;
    return r * std::cos(a);
  }

  /// Uniform integer in [0, n). Unbiased via rejection; n <= 1 consumes
  /// no engine output.
  std::uint64_t uniform_int(std::uint64_t n) {
    if (n <= 1) return 0;
    const std::uint64_t max = std::numeric_limits<std::uint64_t>::max();
    const std::uint64_t limit = max - max % n;
    std::uint64_t x = engine_();
    while (x >= limit) x = engine_();
    return x % n;
  }

  /**
   * Derives an independent stream seed from a base seed and a stream id
   * (splitmix64 finalizer applied to base + (id+1) * golden-gamma).
   * Used to give every run / stage its own generator.
   */
  static std::uint64_t derive(std::uint64_t base, std::uint64_t stream) {
    std::uint64_t z = base + (stream + 1) * 0x9E3779B97F4A7C15ULL;
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
    z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
    return z ^ (z >> 31);
  }

 private:
  std::mt19937_64 engine_;
  bool has_spare_ = false;
  double spare_ = 0.0;
};

}  // namespace faripa

#endif  // FARIPA_RNG_HPP
