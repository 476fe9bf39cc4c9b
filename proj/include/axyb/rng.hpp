#ifndef AXYB_RNG_HPP
#define AXYB_RNG_HPP

#include <cmath>
#include <cstdint>

namespace axyb {

/// Small counter-based generator (splitmix64 core) so that per-item streams
/// can be derived from (seed, index) and parallel generation matches the
/// serial order exactly. Bit-identical across platforms, unlike the
/// standard-library distributions.
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : state_(seed) {}

  /// Substream for item `index`; independent of how many items exist.
  static Rng stream(std::uint64_t seed, std::uint64_t index) {
    Rng mix(seed + 0x9E3779B97F4A7C15ULL * (index + 1));
    Rng out(mix.next_u64());
    return out;
  }

  std::uint64_t next_u64() {
    std::uint64_t z = (state_ += 0x9E3779B97F4A7C15ULL);
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
    z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
    return z ^ (z >> 31);
  }

  /// Uniform in [0, 1).
  double uniform() { return static_cast<double>(next_u64() >> 11) * 0x1.0p-53; }

  /// Uniform in [lo, hi).
  double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }

  /// Standard normal via Box-Muller (one value per call, cached pair unused
  /// to keep the draw count predictable).
  double normal() {
    double u1 = uniform();
    double u2 = uniform();
    while (u1 <= 0.0) u1 = uniform();
    return std::sqrt(-2.0 * std::log(u1)) * std::cos(6.283185307179586476925286766559 * u2);
  }

  double normal(double mean, double sigma) { return mean + sigma * normal(); }

 private:
  std::uint64_t state_;
};

}  // namespace axyb

#endif  // AXYB_RNG_HPP
