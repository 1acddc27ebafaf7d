#pragma once

#include <cstddef>
#include <vector>

#include "emi/errors.hpp"

namespace emi::gpd {

/// Shape (extreme value index) and scale of a generalized Pareto tail.
struct GpdParams {
  double gamma = 0.0;
  double sigma = 1.0;
};

/// Threshold exceedances z_i = (y_i - u)+ of a whole sample, order
/// preserved; censored entries are stored as exact zeros.
struct Exceedances {
  std::vector<double> z;
  std::size_t n_positive = 0;
};

/// Profile-likelihood fit settings. The shape search stays inside
/// [gamma_lo, gamma_hi]; the lower bound keeps the MLE in its regular
/// regime.
struct FitConfig {
  std::size_t min_exceedances = 30;
  double gamma_lo = -0.45;
  double gamma_hi = 5.0;
  int coarse_grid_points = 64;
  double tol_gamma = 1e-9;
  double tol_log_sigma = 1e-10;
  int max_line_search_iterations = 200;
};

/// Below this magnitude the shape is treated as zero and the exponential
/// branch formulas apply.
inline constexpr double kGammaZeroTol = 1e-8;

/// P(Y - u > z | Y > u): (1 + gamma z / sigma)+^(-1/gamma), exp(-z/sigma)
/// when the shape vanishes. Returns 0 beyond a finite endpoint.
double survival(const GpdParams& params, double z);

/// Per-observation GPD log-likelihood l(gamma, sigma | z). Returns
/// -infinity when z falls outside the support for gamma != 0.
double log_likelihood(const GpdParams& params, double z);

/// z_i = max(y_i - threshold, 0) for every response, order preserved.
Exceedances exceedances(const std::vector<double>& ys, double threshold);

/// Censored log-likelihood: sum of l over strictly positive exceedances.
double censored_log_likelihood(const GpdParams& params, const Exceedances& exc);

/// Maximizes the censored log-likelihood over the feasible region by a
/// 1-D profile over gamma (coarse grid plus golden-section refinement)
/// with an inner derivative-free search over log sigma.
GpdParams fit_mle(const Exceedances& exc, const FitConfig& cfg = {});

/// Inner profile solve: the sigma maximizing the censored log-likelihood
/// at a fixed shape. Closed form (mean of positive exceedances) when the
/// shape is zero.
double fit_sigma_given_gamma(const Exceedances& exc, double gamma,
                             const FitConfig& cfg = {});

/// Quantile extrapolation: lifts the intermediate quantile q_tau0 to the
/// extreme level tauN through the fitted tail.
double extrapolate(double q_tau0, const GpdParams& params, double tau0,
                   double tau_n);

}  // namespace emi::gpd
