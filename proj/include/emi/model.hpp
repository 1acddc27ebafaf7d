#pragma once

#include <Eigen/Core>
#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "emi/bilevel.hpp"
#include "emi/bspline.hpp"
#include "emi/gpd.hpp"
#include "emi/quantreg.hpp"
#include "emi/types.hpp"

namespace emi {

struct EmiConfig {
  quantreg::SolverConfig solver;
  gpd::FitConfig tail;
  int spline_degree = 3;
  int n_interior_knots = 6;
  bspline::SplineMode spline_mode = bspline::SplineMode::shared;
  ExceedanceMode exceedance_mode = ExceedanceMode::query_threshold;
  double exceedance_floor = 1e-8;
  double sigma_floor = 1e-6;
  double max_failure_fraction = 0.2;
  int threads = 0;  // 0: EMI_THREADS env var, then hardware concurrency

  int basis_count() const { return n_interior_knots + spline_degree + 1; }
};

struct PerPointFailure {
  std::size_t index = 0;
  std::string reason;
};

struct FitReport {
  std::size_t n_points = 0;
  std::size_t n_failures = 0;
  std::vector<PerPointFailure> failures;
  double gamma_residual_norm = 0.0;
  double sigma_residual_norm = 0.0;
};

/// Per-dimension training range of the spline surfaces.
struct OfflineSummary {
  Eigen::VectorXd min;
  Eigen::VectorXd max;
};

/// The frozen offline artifact: the intermediate quantile fit plus the two
/// interpolated tail surfaces. Sufficient for all online prediction;
/// immutable after construction.
struct EmiModel {
  quantreg::QuantileFit qr;
  bspline::Interpolator gamma_itp;
  bspline::Interpolator sigma_itp;
  double tau0 = 0.8;
  OfflineSummary summary;
  EmiConfig config;
  FitReport report;
};

struct PredictionFlags {
  std::vector<int> clamped_dimensions;
  bool sigma_floored = false;
  bool gamma_zero_branch = false;

  bool empty() const {
    return clamped_dimensions.empty() && !sigma_floored && !gamma_zero_branch;
  }
};

struct Prediction {
  double q_tau0 = 0.0;
  double gamma_hat = 0.0;
  double sigma_hat = 0.0;
  double q_tau_n = 0.0;
  PredictionFlags flags;
};

/// Offline stage: one shared quantile-regression fit, a tail fit per
/// offline point, and the two spline surfaces over the successful points.
/// Per-point failures are excluded from the interpolation targets and
/// recorded in the fit report.
EmiModel fit_offline(const std::vector<Observation>& data, double tau0,
                     const EmiConfig& cfg = {});

/// Online stage: pure interpolation plus extrapolation. Performs no LP or
/// MLE solve.
Prediction predict(const EmiModel& model, const Eigen::VectorXd& x,
                   double tau_n);

struct StreamRecord {
  std::size_t index = 0;
  std::optional<Prediction> prediction;
  std::string error;
};

/// Pulls covariate vectors from `source` until it returns nullopt, emitting
/// one record per item in input order. Per-item failures become error
/// records and the stream continues. Memory use is independent of stream
/// length.
void predict_stream(
    const EmiModel& model, double tau_n,
    const std::function<std::optional<Eigen::VectorXd>()>& source,
    const std::function<void(const StreamRecord&)>& sink);

}  // namespace emi
