#include "emi/quantreg.hpp"

#include <Eigen/Cholesky>
#include <Eigen/QR>
#include <algorithm>
#include <cmath>
#include <limits>

#include "emi/counters.hpp"

namespace emi::quantreg {

namespace {

constexpr double kFractionToBoundary = 0.9995;

double max_step_nonneg(const Eigen::VectorXd& v, const Eigen::VectorXd& dv) {
  // Largest a with v + a*dv >= 0, given v > 0.
  double a = std::numeric_limits<double>::infinity();
  for (Eigen::Index i = 0; i < v.size(); ++i) {
    if (dv(i) < 0.0) {
      a = std::min(a, -v(i) / dv(i));
    }
  }
  return a;
}

}  // namespace

double KktReport::max_violation() const {
  return std::max({primal_equality, complementarity_plus, complementarity_minus,
                   dual_intercept, dual_slope, stationarity_plus,
                   stationarity_minus});
}

double check_loss(double u, double tau) {
  if (!(tau > 0.0 && tau < 1.0)) {
    throw DomainError("quantile level must lie in (0,1)");
  }
  return (u <= 0.0 ? tau - 1.0 : tau) * u;
}

double predict_quantile(const QuantileFit& fit, const Eigen::VectorXd& x) {
  if (x.size() != fit.beta.size()) {
    throw DomainError("covariate dimension does not match fitted model");
  }
  return fit.alpha + fit.beta.dot(x);
}

LpSolution fit_qr(const std::vector<Observation>& data, double tau,
                  const SolverConfig& cfg) {
  if (!(tau > 0.0 && tau < 1.0)) {
    throw DomainError("quantile level must lie in (0,1)");
  }
  const Eigen::Index p = check_dataset(data);
  const Eigen::Index n = static_cast<Eigen::Index>(data.size());
  const Eigen::Index m = p + 1;
  if (n < m) {
    throw InsufficientDataError("need at least p+1 observations to fit");
  }

  Eigen::MatrixXd a;
  Eigen::VectorXd y;
  assemble_design(data, a, y);

  Eigen::ColPivHouseholderQR<Eigen::MatrixXd> aqr(a);
  if (aqr.rank() < m) {
    throw RankDeficientError("design matrix [1, x] is rank deficient");
  }

  counters::record_lp_solve();

  // Infeasible-start primal-dual interior point on
  //   min  tau 1'l+ + (1-tau) 1'l-   s.t.  A theta + l+ - l- = y,  l+-, >= 0
  // with dual u constrained to tau - 1 < u_i < tau through the implicit
  // bound multipliers t+ = tau - u, t- = 1 - tau + u.
  Eigen::VectorXd theta = aqr.solve(y);
  Eigen::VectorXd r0 = y - a * theta;
  const double s0 = std::max(1.0, 0.1 * r0.cwiseAbs().mean());
  Eigen::VectorXd lam_p = r0.cwiseMax(0.0).array() + s0;
  Eigen::VectorXd lam_m = (-r0).cwiseMax(0.0).array() + s0;
  Eigen::VectorXd u = Eigen::VectorXd::Constant(n, tau - 0.5);

  Eigen::VectorXd t_p(n), t_m(n), rp(n), rd(m), w(n), d(n);
  Eigen::VectorXd rc_p(n), rc_m(n), h(n), rhs(m);
  Eigen::VectorXd dtheta(m), du(n), dlam_p(n), dlam_m(n);
  Eigen::VectorXd dtheta_aff(m), du_aff(n), dlam_p_aff(n), dlam_m_aff(n);
  Eigen::MatrixXd normal(m, m);

  bool converged = false;
  int iterations = 0;
  for (int it = 0; it < cfg.max_iterations; ++it) {
    iterations = it;
    t_p = (tau - u.array()).matrix();
    t_m = (1.0 - tau + u.array()).matrix();
    rp = y - a * theta - lam_p + lam_m;
    rd = -(a.transpose() * u);

    const double compl_max =
        std::max(lam_p.cwiseProduct(t_p).maxCoeff(),
                 lam_m.cwiseProduct(t_m).maxCoeff());
    if (rp.lpNorm<Eigen::Infinity>() <= cfg.tol_primal &&
        rd.lpNorm<Eigen::Infinity>() <= cfg.tol_dual &&
        compl_max <= cfg.tol_complementarity) {
      converged = true;
      break;
    }

    const double mu = (lam_p.dot(t_p) + lam_m.dot(t_m)) / (2.0 * n);
    w = lam_p.cwiseQuotient(t_p) + lam_m.cwiseQuotient(t_m);
    d = w.cwiseMax(1e-300).cwiseInverse();

    normal.noalias() = a.transpose() * d.asDiagonal() * a;
    Eigen::LDLT<Eigen::MatrixXd> ldlt(normal);
    if (ldlt.info() != Eigen::Success) {
      // Regularize just enough to factor.
      double ridge = 1e-12 * normal.diagonal().maxCoeff();
      for (int k = 0; k < 8 && ldlt.info() != Eigen::Success; ++k) {
        ldlt.compute(normal + ridge * Eigen::MatrixXd::Identity(m, m));
        ridge *= 10.0;
      }
    }

    // Affine (predictor) direction: plain Newton on the KKT system.
    rc_p = -lam_p.cwiseProduct(t_p);
    rc_m = -lam_m.cwiseProduct(t_m);
    h = rp - rc_p.cwiseQuotient(t_p) + rc_m.cwiseQuotient(t_m);
    rhs.noalias() = a.transpose() * d.cwiseProduct(h) - rd;
    dtheta_aff = ldlt.solve(rhs);
    du_aff = d.cwiseProduct(h - a * dtheta_aff);
    dlam_p_aff = (rc_p + lam_p.cwiseProduct(du_aff)).cwiseQuotient(t_p);
    dlam_m_aff = (rc_m - lam_m.cwiseProduct(du_aff)).cwiseQuotient(t_m);

    const double ap_aff =
        std::min(1.0, std::min(max_step_nonneg(lam_p, dlam_p_aff),
                               max_step_nonneg(lam_m, dlam_m_aff)));
    const double ad_aff =
        std::min(1.0, std::min(max_step_nonneg(t_p, -du_aff),
                               max_step_nonneg(t_m, du_aff)));

    const double mu_aff =
        ((lam_p + ap_aff * dlam_p_aff).dot(t_p - ad_aff * du_aff) +
         (lam_m + ap_aff * dlam_m_aff).dot(t_m + ad_aff * du_aff)) /
        (2.0 * n);
    double sigma = 0.0;
    if (mu > 0.0) {
      sigma = std::pow(std::clamp(mu_aff / mu, 0.0, 1.0), 3);
    }

    // Corrector: recenter and absorb the second-order complementarity terms.
    rc_p = (sigma * mu - (lam_p.array() * t_p.array()) +
            dlam_p_aff.array() * du_aff.array())
               .matrix();
    rc_m = (sigma * mu - (lam_m.array() * t_m.array()) -
            dlam_m_aff.array() * du_aff.array())
               .matrix();
    h = rp - rc_p.cwiseQuotient(t_p) + rc_m.cwiseQuotient(t_m);
    rhs.noalias() = a.transpose() * d.cwiseProduct(h) - rd;
    dtheta = ldlt.solve(rhs);
    du = d.cwiseProduct(h - a * dtheta);
    dlam_p = (rc_p + lam_p.cwiseProduct(du)).cwiseQuotient(t_p);
    dlam_m = (rc_m - lam_m.cwiseProduct(du)).cwiseQuotient(t_m);

    const double ap =
        std::min(1.0, kFractionToBoundary *
                          std::min(max_step_nonneg(lam_p, dlam_p),
                                   max_step_nonneg(lam_m, dlam_m)));
    const double ad =
        std::min(1.0, kFractionToBoundary *
                          std::min(max_step_nonneg(t_p, -du),
                                   max_step_nonneg(t_m, du)));

    theta += ap * dtheta;
    lam_p += ap * dlam_p;
    lam_m += ap * dlam_m;
    u += ad * du;
  }

  if (!converged) {
    throw ConvergenceFailureError(
        "quantile-regression interior point did not converge within " +
        std::to_string(cfg.max_iterations) + " iterations");
  }

  LpSolution sol;
  sol.fit.tau = tau;
  sol.fit.alpha = theta(0);
  sol.fit.beta = theta.tail(p);
  sol.lambda_plus = lam_p;
  sol.lambda_minus = lam_m;
  sol.u = u;
  sol.t_plus = (tau - u.array()).matrix();
  sol.t_minus = (1.0 - tau + u.array()).matrix();
  sol.iterations = iterations;

  double obj = 0.0;
  for (Eigen::Index i = 0; i < n; ++i) {
    obj += check_loss(y(i) - theta.dot(a.row(i)), tau);
  }
  sol.objective = obj;
  return sol;
}

KktReport kkt_residuals(const LpSolution& sol,
                        const std::vector<Observation>& data, double tau) {
  const Eigen::Index p = check_dataset(data);
  if (sol.fit.beta.size() != p) {
    throw DomainError("solution dimension does not match data");
  }
  const Eigen::Index n = static_cast<Eigen::Index>(data.size());

  KktReport rep;
  double sum_u = 0.0;
  Eigen::VectorXd sum_ux = Eigen::VectorXd::Zero(p);
  for (Eigen::Index i = 0; i < n; ++i) {
    const auto& obs = data[static_cast<std::size_t>(i)];
    const double fitted = sol.fit.alpha + sol.fit.beta.dot(obs.x);
    rep.primal_equality = std::max(
        rep.primal_equality,
        std::abs(obs.y - fitted - sol.lambda_plus(i) + sol.lambda_minus(i)));
    rep.complementarity_plus =
        std::max(rep.complementarity_plus,
                 std::abs(sol.lambda_plus(i) * sol.t_plus(i)));
    rep.complementarity_minus =
        std::max(rep.complementarity_minus,
                 std::abs(sol.lambda_minus(i) * sol.t_minus(i)));
    rep.stationarity_plus = std::max(
        rep.stationarity_plus, std::abs(tau - sol.u(i) - sol.t_plus(i)));
    rep.stationarity_minus = std::max(
        rep.stationarity_minus,
        std::abs(1.0 - tau + sol.u(i) - sol.t_minus(i)));
    sum_u += sol.u(i);
    sum_ux += sol.u(i) * obs.x;
  }
  rep.dual_intercept = std::abs(sum_u);
  rep.dual_slope = sum_ux.lpNorm<Eigen::Infinity>();
  return rep;
}

}  // namespace emi::quantreg
