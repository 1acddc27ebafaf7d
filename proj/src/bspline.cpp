#include "emi/bspline.hpp"

#include <Eigen/QR>
#include <algorithm>
#include <cmath>
#include <limits>

namespace emi::bspline {

namespace {

constexpr int kMaxDegree = 32;

double quantile_type7(const std::vector<double>& sorted, double f) {
  const std::size_t n = sorted.size();
  if (n == 1) {
    return sorted.front();
  }
  const double h = f * static_cast<double>(n - 1);
  const std::size_t lo = static_cast<std::size_t>(std::floor(h));
  const std::size_t hi = std::min(lo + 1, n - 1);
  const double w = h - static_cast<double>(lo);
  return sorted[lo] + w * (sorted[hi] - sorted[lo]);
}

double nearest_value(const std::vector<double>& sorted, double x) {
  const auto it = std::lower_bound(sorted.begin(), sorted.end(), x);
  if (it == sorted.begin()) {
    return sorted.front();
  }
  if (it == sorted.end()) {
    return sorted.back();
  }
  const double hi = *it;
  const double lo = *(it - 1);
  // Ties break toward the smaller value.
  return (x - lo <= hi - x) ? lo : hi;
}

}  // namespace

KnotVector::KnotVector(std::vector<double> knots, int degree)
    : knots_(std::move(knots)), degree_(degree) {
  if (degree_ < 0 || degree_ > kMaxDegree) {
    throw DomainError("spline degree out of range");
  }
  const int m = static_cast<int>(knots_.size());
  if (m < 2 * (degree_ + 1)) {
    throw DomainError("knot vector too short for a clamped spline");
  }
  for (int i = 0; i + 1 < m; ++i) {
    if (!(knots_[i] <= knots_[i + 1])) {
      throw DomainError("knots must be non-decreasing");
    }
  }
  if (!(knots_.front() < knots_.back())) {
    throw DomainError("knot range is degenerate");
  }
  if (knots_[degree_] != knots_.front() ||
      knots_[m - 1 - degree_] != knots_.back()) {
    throw DomainError("boundary knots must carry multiplicity degree+1");
  }
}

int KnotVector::find_span(double x) const {
  if (!(x >= knots_.front() && x <= knots_.back())) {
    return -1;
  }
  if (x == knots_.back()) {
    // The last knot belongs to the last nonempty interval.
    const auto it = std::lower_bound(knots_.begin(), knots_.end(), x);
    return static_cast<int>(it - knots_.begin()) - 1;
  }
  const auto it = std::upper_bound(knots_.begin(), knots_.end(), x);
  return static_cast<int>(it - knots_.begin()) - 1;
}

void KnotVector::nonzero_basis(int span, double x, double* out) const {
  double left[kMaxDegree + 1];
  double right[kMaxDegree + 1];
  out[0] = 1.0;
  for (int j = 1; j <= degree_; ++j) {
    left[j] = x - knots_[span + 1 - j];
    right[j] = knots_[span + j] - x;
    double saved = 0.0;
    for (int r = 0; r < j; ++r) {
      const double temp = out[r] / (right[r + 1] + left[j - r]);
      out[r] = saved + right[r + 1] * temp;
      saved = left[j - r] * temp;
    }
    out[j] = saved;
  }
}

double basis(int j, const KnotVector& kv, double x) {
  if (j < 0 || j >= kv.basis_count()) {
    throw DomainError("basis index out of range");
  }
  if (!std::isfinite(x)) {
    throw DomainError("basis argument must be finite");
  }
  const int span = kv.find_span(x);
  if (span < 0 || j < span - kv.degree() || j > span) {
    return 0.0;
  }
  double buf[kMaxDegree + 1];
  kv.nonzero_basis(span, x, buf);
  return buf[j - (span - kv.degree())];
}

KnotVector make_clamped_knots(std::vector<double> values, int degree,
                              int n_interior) {
  if (values.empty()) {
    throw DomainError("cannot build knots from an empty value set");
  }
  if (n_interior < 0) {
    throw DomainError("interior knot count must be nonnegative");
  }
  for (double v : values) {
    if (!std::isfinite(v)) {
      throw DomainError("knot construction requires finite values");
    }
  }
  std::sort(values.begin(), values.end());
  const double lo = values.front();
  const double hi = values.back();
  if (!(lo < hi)) {
    throw DegenerateFeatureError("feature is constant; cannot span knots");
  }
  std::vector<double> knots;
  knots.reserve(2 * (degree + 1) + n_interior);
  knots.insert(knots.end(), degree + 1, lo);
  for (int k = 1; k <= n_interior; ++k) {
    knots.push_back(
        quantile_type7(values, static_cast<double>(k) / (n_interior + 1)));
  }
  knots.insert(knots.end(), degree + 1, hi);
  return KnotVector(std::move(knots), degree);
}

Eigen::MatrixXd design_matrix(const std::vector<double>& values,
                              const KnotVector& kv) {
  const Eigen::Index n = static_cast<Eigen::Index>(values.size());
  const int d = kv.degree();
  Eigen::MatrixXd b = Eigen::MatrixXd::Zero(n, kv.basis_count());
  double buf[kMaxDegree + 1];
  for (Eigen::Index i = 0; i < n; ++i) {
    const double x = values[static_cast<std::size_t>(i)];
    const int span = kv.find_span(x);
    if (span < 0) {
      continue;
    }
    kv.nonzero_basis(span, x, buf);
    for (int r = 0; r <= d; ++r) {
      b(i, span - d + r) = buf[r];
    }
  }
  return b;
}

namespace {

void check_shared_shape(const std::vector<KnotVector>& dims) {
  if (dims.empty()) {
    throw DomainError("at least one knot vector is required");
  }
  for (const auto& kv : dims) {
    if (kv.basis_count() != dims.front().basis_count() ||
        kv.degree() != dims.front().degree()) {
      throw DomainError("knot vectors must share degree and basis count");
    }
  }
}

Eigen::MatrixXd summed_design(const Eigen::MatrixXd& features,
                              const std::vector<KnotVector>& dims) {
  const Eigen::Index n = features.rows();
  Eigen::MatrixXd s = Eigen::MatrixXd::Zero(n, dims.front().basis_count());
  std::vector<double> col(static_cast<std::size_t>(n));
  for (std::size_t i = 0; i < dims.size(); ++i) {
    Eigen::VectorXd::Map(col.data(), n) =
        features.col(static_cast<Eigen::Index>(i));
    s += design_matrix(col, dims[i]);
  }
  return s;
}

Eigen::MatrixXd stacked_design(const Eigen::MatrixXd& features,
                               const std::vector<KnotVector>& dims) {
  const Eigen::Index n = features.rows();
  const Eigen::Index j = dims.front().basis_count();
  Eigen::MatrixXd s(n, j * static_cast<Eigen::Index>(dims.size()));
  std::vector<double> col(static_cast<std::size_t>(n));
  for (std::size_t i = 0; i < dims.size(); ++i) {
    Eigen::VectorXd::Map(col.data(), n) =
        features.col(static_cast<Eigen::Index>(i));
    s.middleCols(static_cast<Eigen::Index>(i) * j, j) =
        design_matrix(col, dims[i]);
  }
  return s;
}

Eigen::VectorXd solve_least_squares(const Eigen::MatrixXd& s,
                                    const Eigen::VectorXd& targets) {
  if (s.isZero(0.0)) {
    throw SingularSystemError("summed design matrix carries no support");
  }
  Eigen::CompleteOrthogonalDecomposition<Eigen::MatrixXd> cod(s);
  return cod.solve(targets);
}

}  // namespace

Eigen::VectorXd fit_coefficients(const Eigen::MatrixXd& features,
                                 const Eigen::VectorXd& targets,
                                 const std::vector<KnotVector>& dims) {
  check_shared_shape(dims);
  if (features.cols() != static_cast<Eigen::Index>(dims.size())) {
    throw DomainError("feature columns do not match knot vector count");
  }
  if (features.rows() != targets.size() || targets.size() < 1) {
    throw DomainError("targets must match the feature rows");
  }
  return solve_least_squares(summed_design(features, dims), targets);
}

Interpolator::Interpolator(std::vector<KnotVector> dims,
                           Eigen::VectorXd coefficients,
                           std::vector<std::vector<double>> fallback_values,
                           SplineMode mode)
    : dims_(std::move(dims)),
      coefficients_(std::move(coefficients)),
      fallback_values_(std::move(fallback_values)),
      mode_(mode) {
  check_shared_shape(dims_);
  const Eigen::Index j = dims_.front().basis_count();
  const Eigen::Index expected =
      mode_ == SplineMode::shared
          ? j
          : j * static_cast<Eigen::Index>(dims_.size());
  if (coefficients_.size() != expected) {
    throw DomainError("coefficient length does not match the spline layout");
  }
  if (fallback_values_.size() != dims_.size()) {
    throw DomainError("fallback tables must cover every dimension");
  }
  for (std::size_t i = 0; i < dims_.size(); ++i) {
    const auto& fb = fallback_values_[i];
    if (fb.empty() || !std::is_sorted(fb.begin(), fb.end())) {
      throw DomainError("fallback values must be sorted and non-empty");
    }
    if (fb.front() != dims_[i].front() || fb.back() != dims_[i].back()) {
      throw DomainError("boundary knots must equal the fallback range");
    }
  }
}

double Interpolator::evaluate(const Eigen::VectorXd& x) const {
  return evaluate(x, nullptr);
}

double Interpolator::evaluate(const Eigen::VectorXd& x,
                              std::vector<int>* clamped_dims) const {
  if (x.size() != static_cast<Eigen::Index>(dims_.size())) {
    throw DomainError("covariate dimension does not match interpolator");
  }
  if (!x.allFinite()) {
    throw DomainError("covariates must be finite");
  }
  const int j = static_cast<int>(dims_.front().basis_count());
  double buf[kMaxDegree + 1];
  double total = 0.0;
  for (std::size_t i = 0; i < dims_.size(); ++i) {
    const KnotVector& kv = dims_[i];
    double arg = x(static_cast<Eigen::Index>(i));
    if (arg < kv.front() || arg > kv.back()) {
      arg = nearest_value(fallback_values_[i], arg);
      if (clamped_dims != nullptr) {
        clamped_dims->push_back(static_cast<int>(i));
      }
    }
    const int span = kv.find_span(arg);
    kv.nonzero_basis(span, arg, buf);
    const int offset =
        mode_ == SplineMode::shared ? 0 : static_cast<int>(i) * j;
    for (int r = 0; r <= kv.degree(); ++r) {
      total += buf[r] * coefficients_(offset + span - kv.degree() + r);
    }
  }
  return total;
}

InterpolatorFit fit_interpolator(const Eigen::MatrixXd& features,
                                 const Eigen::VectorXd& targets, int degree,
                                 int n_interior, SplineMode mode) {
  const Eigen::Index n = features.rows();
  const Eigen::Index p = features.cols();
  if (n < 1 || p < 1 || targets.size() != n) {
    throw DomainError("features and targets must be non-empty and aligned");
  }
  std::vector<KnotVector> dims;
  std::vector<std::vector<double>> fallback;
  dims.reserve(static_cast<std::size_t>(p));
  fallback.reserve(static_cast<std::size_t>(p));
  for (Eigen::Index i = 0; i < p; ++i) {
    std::vector<double> col(static_cast<std::size_t>(n));
    Eigen::VectorXd::Map(col.data(), n) = features.col(i);
    std::sort(col.begin(), col.end());
    dims.push_back(make_clamped_knots(col, degree, n_interior));
    fallback.push_back(std::move(col));
  }
  const Eigen::MatrixXd s = mode == SplineMode::shared
                                ? summed_design(features, dims)
                                : stacked_design(features, dims);
  Eigen::VectorXd t = solve_least_squares(s, targets);
  const double residual = (s * t - targets).norm();
  return InterpolatorFit{
      Interpolator(std::move(dims), std::move(t), std::move(fallback), mode),
      residual};
}

}  // namespace emi::bspline
