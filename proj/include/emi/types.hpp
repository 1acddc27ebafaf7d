#pragma once

#include <Eigen/Core>
#include <vector>

#include "emi/errors.hpp"

namespace emi {

/// One (response, covariate-vector) pair.
struct Observation {
  double y = 0.0;
  Eigen::VectorXd x;
};

/// How tail exceedances are formed from a fitted intermediate quantile.
/// `query_threshold` measures every response against the single threshold
/// at the query point; `residual` measures each response against its own
/// fitted quantile.
enum class ExceedanceMode { query_threshold, residual };

/// Validates a dataset: non-empty, shared covariate dimension, all finite.
/// Returns the covariate dimension p.
Eigen::Index check_dataset(const std::vector<Observation>& data);

/// Stacks the dataset into a design matrix [1, X] (N x p+1) and response y.
void assemble_design(const std::vector<Observation>& data, Eigen::MatrixXd& a,
                     Eigen::VectorXd& y);

}  // namespace emi
