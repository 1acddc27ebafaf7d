#include "emi/bilevel.hpp"

#include <cmath>
#include <utility>

namespace emi::bilevel {

gpd::Exceedances tail_exceedances(const std::vector<Observation>& data,
                                  const quantreg::QuantileFit& fit,
                                  const Eigen::VectorXd& query_x,
                                  ExceedanceMode mode, double floor) {
  const double query_threshold = quantreg::predict_quantile(fit, query_x);
  gpd::Exceedances out;
  out.z.reserve(data.size());
  for (const auto& obs : data) {
    const double threshold =
        mode == ExceedanceMode::query_threshold
            ? query_threshold
            : quantreg::predict_quantile(fit, obs.x);
    double zi = obs.y - threshold;
    if (zi <= floor) {
      zi = 0.0;
    }
    out.z.push_back(zi);
    if (zi > 0.0) {
      ++out.n_positive;
    }
  }
  return out;
}

MpecProblem assemble(std::vector<Observation> data, Eigen::VectorXd query_x,
                     double tau0) {
  const Eigen::Index p = check_dataset(data);
  if (query_x.size() != p) {
    throw DomainError("query covariate dimension does not match data");
  }
  if (!query_x.allFinite()) {
    throw DomainError("query covariates must be finite");
  }
  if (!(tau0 > 0.0 && tau0 < 1.0)) {
    throw DomainError("quantile level must lie in (0,1)");
  }
  return MpecProblem{std::move(data), std::move(query_x), tau0};
}

SequentialSolver::SequentialSolver(std::vector<Observation> data, double tau0,
                                   BilevelConfig cfg)
    : data_(std::move(data)), tau0_(tau0), cfg_(std::move(cfg)) {
  qr_ = quantreg::fit_qr(data_, tau0_, cfg_.solver);
}

MpecSolution SequentialSolver::solve(const Eigen::VectorXd& query_x) const {
  const gpd::Exceedances exc =
      tail_exceedances(data_, qr_.fit, query_x, cfg_.exceedance_mode,
                       cfg_.exceedance_floor);
  MpecSolution sol;
  sol.qr = qr_;
  sol.threshold = quantreg::predict_quantile(qr_.fit, query_x);
  sol.n_exceedances = exc.n_positive;
  sol.tail = gpd::fit_mle(exc, cfg_.tail);
  return sol;
}

MpecSolution solve_sequential(const MpecProblem& prob,
                              const BilevelConfig& cfg) {
  return SequentialSolver(prob.data, prob.tau0, cfg).solve(prob.query_x);
}

VerificationReport verify(const MpecSolution& sol, const MpecProblem& prob,
                          const BilevelConfig& cfg) {
  VerificationReport rep;
  rep.kkt = quantreg::kkt_residuals(sol.qr, prob.data, prob.tau0);

  const gpd::Exceedances exc =
      tail_exceedances(prob.data, sol.qr.fit, prob.query_x,
                       cfg.exceedance_mode, cfg.exceedance_floor);

  for (double zi : exc.z) {
    if (zi > 0.0 &&
        1.0 + sol.tail.gamma * zi / sol.tail.sigma <= 0.0) {
      rep.tail_feasible = false;
    }
  }

  const double boundary_tol = 1e-6;
  rep.gamma_at_boundary =
      std::abs(sol.tail.gamma - cfg.tail.gamma_lo) < boundary_tol ||
      std::abs(sol.tail.gamma - cfg.tail.gamma_hi) < boundary_tol;

  // Central differences of the censored log-likelihood in (gamma, log sigma).
  const double h = 1e-6;
  const double s = std::log(sol.tail.sigma);
  const auto ll = [&](double g, double log_sigma) {
    return gpd::censored_log_likelihood({g, std::exp(log_sigma)}, exc);
  };
  const double d_gamma =
      (ll(sol.tail.gamma + h, s) - ll(sol.tail.gamma - h, s)) / (2.0 * h);
  const double d_log_sigma =
      (ll(sol.tail.gamma, s + h) - ll(sol.tail.gamma, s - h)) / (2.0 * h);
  rep.tail_gradient_inf = std::max(std::abs(d_gamma), std::abs(d_log_sigma));
  return rep;
}

}  // namespace emi::bilevel
