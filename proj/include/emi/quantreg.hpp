#pragma once

#include <Eigen/Core>
#include <vector>

#include "emi/types.hpp"

namespace emi::quantreg {

/// Interior-point tolerances for the quantile-regression linear program.
struct SolverConfig {
  double tol_primal = 1e-9;
  double tol_dual = 1e-9;
  double tol_complementarity = 1e-9;
  int max_iterations = 200;
};

/// Fitted linear quantile model: Q(tau | x) = alpha + beta' x.
struct QuantileFit {
  double tau = 0.5;
  double alpha = 0.0;
  Eigen::VectorXd beta;
};

/// Optimal primal-dual pair of the quantile-regression LP. lambda_plus and
/// lambda_minus split each residual into its positive and negative parts,
/// u holds the equality multipliers, t_plus/t_minus the multipliers of the
/// nonnegativity bounds.
struct LpSolution {
  QuantileFit fit;
  Eigen::VectorXd lambda_plus;
  Eigen::VectorXd lambda_minus;
  Eigen::VectorXd u;
  Eigen::VectorXd t_plus;
  Eigen::VectorXd t_minus;
  double objective = 0.0;
  int iterations = 0;
};

/// Worst violation per optimality-condition family, all recomputed from
/// scratch (independent of the solver's internal residuals).
struct KktReport {
  double primal_equality = 0.0;    // max_i |y_i - a - b'x_i - l+_i + l-_i|
  double complementarity_plus = 0.0;   // max_i |l+_i t+_i|
  double complementarity_minus = 0.0;  // max_i |l-_i t-_i|
  double dual_intercept = 0.0;     // |sum_i u_i|
  double dual_slope = 0.0;         // ||sum_i u_i x_i||_inf
  double stationarity_plus = 0.0;  // max_i |tau - u_i - t+_i|
  double stationarity_minus = 0.0; // max_i |1 - tau + u_i - t-_i|

  double max_violation() const;
};

/// Check loss rho_tau(u) = (tau - 1{u <= 0}) u. Nonnegative for all u.
double check_loss(double u, double tau);

/// Fits alpha, beta minimizing the empirical check loss at level tau by
/// solving the LP reformulation with a primal-dual interior-point method.
/// Returns the full multiplier set alongside the coefficients.
LpSolution fit_qr(const std::vector<Observation>& data, double tau,
                  const SolverConfig& cfg = {});

/// alpha + beta' x.
double predict_quantile(const QuantileFit& fit, const Eigen::VectorXd& x);

KktReport kkt_residuals(const LpSolution& sol,
                        const std::vector<Observation>& data, double tau);

}  // namespace emi::quantreg
