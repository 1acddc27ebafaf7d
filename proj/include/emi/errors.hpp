#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace emi {

/// Base class for all library errors.
class Error : public std::runtime_error {
 public:
  explicit Error(const std::string& what) : std::runtime_error(what) {}
};

/// Invalid argument values (quantile levels outside (0,1), negative scales,
/// dimension mismatches, ...).
class DomainError : public Error {
 public:
  using Error::Error;
};

/// Design matrix [1, X] does not have full column rank.
class RankDeficientError : public Error {
 public:
  using Error::Error;
};

/// Fewer observations than coefficients to estimate.
class InsufficientDataError : public Error {
 public:
  using Error::Error;
};

/// Too few positive exceedances above the threshold to fit a tail.
class InsufficientExceedancesError : public Error {
 public:
  InsufficientExceedancesError(const std::string& what, std::size_t n_positive,
                               std::size_t required)
      : Error(what), n_positive(n_positive), required(required) {}

  std::size_t n_positive;
  std::size_t required;
};

/// An iterative solver hit its iteration budget. Carries the best iterate
/// found so far when the failing solver is the tail fit.
class ConvergenceFailureError : public Error {
 public:
  explicit ConvergenceFailureError(const std::string& what,
                                   double best_gamma = 0.0,
                                   double best_sigma = 0.0)
      : Error(what), best_gamma(best_gamma), best_sigma(best_sigma) {}

  double best_gamma;
  double best_sigma;
};

/// A covariate dimension is constant; no knot vector can span it.
class DegenerateFeatureError : public Error {
 public:
  using Error::Error;
};

/// The summed B-spline design matrix carries no information.
class SingularSystemError : public Error {
 public:
  using Error::Error;
};

/// Offline fitting could not produce enough per-point tail estimates.
class OfflineFitFailureError : public Error {
 public:
  OfflineFitFailureError(const std::string& what, std::size_t n_points,
                         std::size_t n_failures)
      : Error(what), n_points(n_points), n_failures(n_failures) {}

  std::size_t n_points;
  std::size_t n_failures;
};

/// CSV ingestion failure; row/column are 1-based, row 1 is the header.
class CsvParseError : public Error {
 public:
  CsvParseError(const std::string& what, std::size_t row, std::size_t column)
      : Error(what), row(row), column(column) {}

  std::size_t row;
  std::size_t column;
};

}  // namespace emi
