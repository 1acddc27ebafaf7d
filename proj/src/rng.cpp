#include "emi/rng.hpp"

#include <cmath>

#include "emi/errors.hpp"

namespace emi::rng {

double SplitMix64::normal() {
  const double u1 = uniform();
  const double u2 = uniform();
  return std::sqrt(-2.0 * std::log(u1)) * std::cos(6.283185307179586476925286766559 * u2);
}

double SplitMix64::gamma(double shape) {
  if (!(shape > 0.0)) {
    throw DomainError("gamma shape must be positive");
  }
  if (shape < 1.0) {
    // G(a) = G(a+1) * U^{1/a}
    const double g = gamma(shape + 1.0);
    return g * std::pow(uniform(), 1.0 / shape);
  }
  const double d = shape - 1.0 / 3.0;
  const double c = 1.0 / std::sqrt(9.0 * d);
  for (;;) {
    double x;
    double v;
    do {
      x = normal();
      v = 1.0 + c * x;
    } while (v <= 0.0);
    v = v * v * v;
    const double u = uniform();
    if (u < 1.0 - 0.0331 * x * x * x * x) {
      return d * v;
    }
    if (std::log(u) < 0.5 * x * x + d * (1.0 - v + std::log(v))) {
      return d * v;
    }
  }
}

double SplitMix64::student_t(double dof) {
  if (!(dof > 0.0)) {
    throw DomainError("t degrees of freedom must be positive");
  }
  const double z = normal();
  const double chi2 = 2.0 * gamma(0.5 * dof);
  return z / std::sqrt(chi2 / dof);
}

double SplitMix64::gpd(double location, double scale, double shape) {
  if (!(scale > 0.0)) {
    throw DomainError("gpd scale must be positive");
  }
  const double u = uniform();
  if (std::abs(shape) < 1e-12) {
    return location - scale * std::log(u);
  }
  return location + scale * std::expm1(-shape * std::log(u)) / shape;
}

std::uint64_t mix(std::uint64_t seed, std::uint64_t word) {
  std::uint64_t z = seed + 0x9E3779B97F4A7C15ULL * (word + 1);
  z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
  z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
  return z ^ (z >> 31);
}

}  // namespace emi::rng
