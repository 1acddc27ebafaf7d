#pragma once

#include <cstdint>

namespace emi::rng {

/// SplitMix64: a 64-bit counter-based generator. State advances by a fixed
/// odd increment and the output is a bijective mix of the counter, so
/// independent streams are obtained by deriving independent seeds.
class SplitMix64 {
 public:
  explicit SplitMix64(std::uint64_t seed) : state_(seed) {}

  std::uint64_t next() {
    std::uint64_t z = (state_ += 0x9E3779B97F4A7C15ULL);
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
    z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
    return z ^ (z >> 31);
  }

  /// Uniform on the open interval (0, 1); never returns 0 or 1.
  double uniform() {
    return (static_cast<double>(next() >> 11) + 0.5) * 0x1.0p-53;
  }

  /// Standard normal via Box-Muller; consumes two uniforms per draw.
  double normal();

  /// Gamma(shape, scale 1) via Marsaglia-Tsang, boosted for shape < 1.
  double gamma(double shape);

  /// Student t with (possibly non-integer) degrees of freedom dof > 0,
  /// via normal / sqrt(chi-square/dof).
  double student_t(double dof);

  /// Generalized Pareto with given location, scale > 0 and shape, by
  /// inverting the survival function.
  double gpd(double location, double scale, double shape);

 private:
  std::uint64_t state_;
};

/// Finalizer-chained seed derivation: fold `word` into `seed` through the
/// SplitMix64 output mix. Used to carve independent named streams out of a
/// single user seed.
std::uint64_t mix(std::uint64_t seed, std::uint64_t word);

inline constexpr const char* kGeneratorName = "splitmix64";

}  // namespace emi::rng
