#pragma once

#include <Eigen/Core>
#include <vector>

#include "emi/rng.hpp"
#include "emi/types.hpp"

namespace testutil {

/// N observations with uniform covariates and y = alpha + beta'x + noise,
/// noise standard normal scaled by `noise_scale`.
inline std::vector<emi::Observation> linear_gaussian(
    std::size_t n, int p, double alpha, double beta, double noise_scale,
    std::uint64_t seed) {
  emi::rng::SplitMix64 gen(seed);
  std::vector<emi::Observation> data(n);
  for (auto& obs : data) {
    obs.x.resize(p);
    for (int k = 0; k < p; ++k) {
      obs.x(k) = gen.uniform();
    }
    obs.y = alpha + beta * obs.x.sum() + noise_scale * gen.normal();
  }
  return data;
}

/// y = alpha + beta'x + Exp(mean) noise: independent of x, always positive.
inline std::vector<emi::Observation> linear_exponential(
    std::size_t n, int p, double alpha, double beta, double mean,
    std::uint64_t seed) {
  emi::rng::SplitMix64 gen(seed);
  std::vector<emi::Observation> data(n);
  for (auto& obs : data) {
    obs.x.resize(p);
    for (int k = 0; k < p; ++k) {
      obs.x(k) = gen.uniform();
    }
    obs.y = alpha + beta * obs.x.sum() - mean * std::log(gen.uniform());
  }
  return data;
}

inline Eigen::VectorXd constant_vector(int p, double v) {
  return Eigen::VectorXd::Constant(p, v);
}

}  // namespace testutil
