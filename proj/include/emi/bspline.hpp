#pragma once

#include <Eigen/Core>
#include <vector>

#include "emi/errors.hpp"

namespace emi::bspline {

/// Clamped non-decreasing knot sequence with its spline degree. Boundary
/// knots carry multiplicity degree+1; the number of basis functions is
/// J = M - degree - 1.
class KnotVector {
 public:
  KnotVector(std::vector<double> knots, int degree);

  int degree() const { return degree_; }
  int size() const { return static_cast<int>(knots_.size()); }
  int basis_count() const { return size() - degree_ - 1; }
  double front() const { return knots_.front(); }
  double back() const { return knots_.back(); }
  const std::vector<double>& knots() const { return knots_; }

  /// Index k with knots[k] <= x < knots[k+1]; x equal to the last knot is
  /// assigned to the last nonempty interval. Returns -1 outside the range.
  int find_span(double x) const;

  /// Values of the degree+1 basis functions that are nonzero on the span;
  /// out must hold degree()+1 entries. Entry r corresponds to basis index
  /// span - degree + r.
  void nonzero_basis(int span, double x, double* out) const;

 private:
  std::vector<double> knots_;
  int degree_;
};

/// Single Cox-de Boor basis value B_{j,d}(x), 0-based j in [0, J).
double basis(int j, const KnotVector& kv, double x);

/// Clamped knot vector over the given feature values: boundary knots at
/// min/max with multiplicity degree+1, interior knots at equally spaced
/// empirical quantiles.
KnotVector make_clamped_knots(std::vector<double> values, int degree,
                              int n_interior);

/// Collocation matrix: entry (n, j) = B_j(values[n]). Out-of-range values
/// produce zero rows.
Eigen::MatrixXd design_matrix(const std::vector<double>& values,
                              const KnotVector& kv);

/// Least-squares coefficients t minimizing ||(sum_i B^(i)) t - targets||_2
/// where B^(i) is the design matrix of feature column i over its knot
/// vector. All knot vectors must share degree and basis count.
Eigen::VectorXd fit_coefficients(const Eigen::MatrixXd& features,
                                 const Eigen::VectorXd& targets,
                                 const std::vector<KnotVector>& dims);

/// Additive surface layout: one coefficient vector shared by every
/// dimension (the default), or an independent block per dimension.
enum class SplineMode { shared, per_dim };

/// One scalar surface over covariates: per-dimension knot vectors, the
/// fitted coefficients, and the sorted offline feature values used for
/// nearest-value fallback outside the training range.
class Interpolator {
 public:
  Interpolator(std::vector<KnotVector> dims, Eigen::VectorXd coefficients,
               std::vector<std::vector<double>> fallback_values,
               SplineMode mode);

  double evaluate(const Eigen::VectorXd& x) const;
  /// As evaluate, also reporting which dimensions were replaced by their
  /// nearest offline value.
  double evaluate(const Eigen::VectorXd& x,
                  std::vector<int>* clamped_dims) const;

  int dimension() const { return static_cast<int>(dims_.size()); }
  int basis_count() const { return dims_.front().basis_count(); }
  const std::vector<KnotVector>& dims() const { return dims_; }
  const Eigen::VectorXd& coefficients() const { return coefficients_; }
  const std::vector<std::vector<double>>& fallback_values() const {
    return fallback_values_;
  }
  SplineMode mode() const { return mode_; }

 private:
  std::vector<KnotVector> dims_;
  Eigen::VectorXd coefficients_;
  std::vector<std::vector<double>> fallback_values_;
  SplineMode mode_;
};

struct InterpolatorFit {
  Interpolator interpolator;
  double residual_norm = 0.0;
};

/// Builds knots from the feature columns, fits coefficients against the
/// targets and assembles the interpolator with its fallback tables.
InterpolatorFit fit_interpolator(const Eigen::MatrixXd& features,
                                 const Eigen::VectorXd& targets, int degree,
                                 int n_interior, SplineMode mode);

}  // namespace emi::bspline
