#include "emi/model.hpp"

#include <algorithm>
#include <cmath>
#include <mutex>
#include <utility>

#include "emi/parallel.hpp"

namespace emi {

EmiModel fit_offline(const std::vector<Observation>& data, double tau0,
                     const EmiConfig& cfg) {
  const Eigen::Index p = check_dataset(data);
  const std::size_t n = data.size();
  const std::size_t j = static_cast<std::size_t>(cfg.basis_count());
  if (n < std::max<std::size_t>(static_cast<std::size_t>(p) + 1, j)) {
    throw InsufficientDataError(
        "offline set smaller than max(p+1, basis count)");
  }

  bilevel::BilevelConfig bcfg{cfg.solver, cfg.tail, cfg.exceedance_mode,
                             cfg.exceedance_floor};
  const bilevel::SequentialSolver solver(data, tau0, bcfg);

  std::vector<double> gammas(n), sigmas(n);
  std::vector<char> ok(n, 0);
  std::vector<PerPointFailure> failures;
  std::mutex failures_mutex;

  const auto fit_point = [&](std::size_t i) {
    try {
      const bilevel::MpecSolution sol = solver.solve(data[i].x);
      gammas[i] = sol.tail.gamma;
      sigmas[i] = sol.tail.sigma;
      ok[i] = 1;
    } catch (const InsufficientExceedancesError& e) {
      std::lock_guard<std::mutex> lock(failures_mutex);
      failures.push_back({i, e.what()});
    } catch (const ConvergenceFailureError& e) {
      std::lock_guard<std::mutex> lock(failures_mutex);
      failures.push_back({i, e.what()});
    }
  };

  if (cfg.exceedance_mode == ExceedanceMode::residual) {
    // Residual exceedances do not depend on the query point: one tail fit
    // serves every offline point.
    fit_point(0);
    for (std::size_t i = 1; i < n; ++i) {
      gammas[i] = gammas[0];
      sigmas[i] = sigmas[0];
      ok[i] = ok[0];
    }
    if (!ok[0]) {
      const std::string reason = failures.front().reason;
      failures.clear();
      for (std::size_t i = 0; i < n; ++i) {
        failures.push_back({i, reason});
      }
    }
  } else {
    parallel_for(n, resolve_threads(cfg.threads), fit_point);
  }

  std::sort(failures.begin(), failures.end(),
            [](const PerPointFailure& a, const PerPointFailure& b) {
              return a.index < b.index;
            });

  const std::size_t n_ok =
      static_cast<std::size_t>(std::count(ok.begin(), ok.end(), 1));
  const std::size_t n_fail = n - n_ok;
  if (n_ok < j) {
    throw OfflineFitFailureError(
        "only " + std::to_string(n_ok) + " of " + std::to_string(n) +
            " per-point tail fits succeeded; need at least " +
            std::to_string(j),
        n, n_fail);
  }
  if (static_cast<double>(n_fail) >
      cfg.max_failure_fraction * static_cast<double>(n)) {
    throw OfflineFitFailureError(
        std::to_string(n_fail) + " of " + std::to_string(n) +
            " per-point tail fits failed, above the allowed fraction",
        n, n_fail);
  }

  Eigen::MatrixXd features(static_cast<Eigen::Index>(n_ok), p);
  Eigen::VectorXd gamma_targets(static_cast<Eigen::Index>(n_ok));
  Eigen::VectorXd sigma_targets(static_cast<Eigen::Index>(n_ok));
  Eigen::Index row = 0;
  for (std::size_t i = 0; i < n; ++i) {
    if (!ok[i]) {
      continue;
    }
    features.row(row) = data[i].x.transpose();
    gamma_targets(row) = gammas[i];
    sigma_targets(row) = sigmas[i];
    ++row;
  }

  bspline::InterpolatorFit gamma_fit =
      bspline::fit_interpolator(features, gamma_targets, cfg.spline_degree,
                                cfg.n_interior_knots, cfg.spline_mode);
  bspline::InterpolatorFit sigma_fit =
      bspline::fit_interpolator(features, sigma_targets, cfg.spline_degree,
                                cfg.n_interior_knots, cfg.spline_mode);

  OfflineSummary summary;
  summary.min = features.colwise().minCoeff();
  summary.max = features.colwise().maxCoeff();

  FitReport report;
  report.n_points = n;
  report.n_failures = n_fail;
  report.failures = std::move(failures);
  report.gamma_residual_norm = gamma_fit.residual_norm;
  report.sigma_residual_norm = sigma_fit.residual_norm;

  return EmiModel{solver.lower_level().fit,
                  std::move(gamma_fit.interpolator),
                  std::move(sigma_fit.interpolator),
                  tau0,
                  std::move(summary),
                  cfg,
                  std::move(report)};
}

Prediction predict(const EmiModel& model, const Eigen::VectorXd& x,
                   double tau_n) {
  if (!(tau_n >= model.tau0 && tau_n < 1.0)) {
    throw DomainError("extreme level must lie in [tau0, 1)");
  }
  Prediction pred;
  pred.q_tau0 = quantreg::predict_quantile(model.qr, x);
  pred.gamma_hat = model.gamma_itp.evaluate(x, &pred.flags.clamped_dimensions);
  const double sigma_raw = model.sigma_itp.evaluate(x);
  pred.sigma_hat = std::max(sigma_raw, model.config.sigma_floor);
  pred.flags.sigma_floored = sigma_raw < model.config.sigma_floor;
  pred.flags.gamma_zero_branch = std::abs(pred.gamma_hat) < gpd::kGammaZeroTol;
  pred.q_tau_n = gpd::extrapolate(
      pred.q_tau0, {pred.gamma_hat, pred.sigma_hat}, model.tau0, tau_n);
  return pred;
}

void predict_stream(
    const EmiModel& model, double tau_n,
    const std::function<std::optional<Eigen::VectorXd>()>& source,
    const std::function<void(const StreamRecord&)>& sink) {
  if (!(tau_n >= model.tau0 && tau_n < 1.0)) {
    throw DomainError("extreme level must lie in [tau0, 1)");
  }
  std::size_t index = 0;
  for (;;) {
    std::optional<Eigen::VectorXd> x = source();
    if (!x.has_value()) {
      return;
    }
    StreamRecord record;
    record.index = index++;
    try {
      record.prediction = predict(model, *x, tau_n);
    } catch (const Error& e) {
      record.error = e.what();
    }
    sink(record);
  }
}

}  // namespace emi
