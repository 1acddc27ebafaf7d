#pragma once

#include <Eigen/Core>
#include <iosfwd>
#include <string>
#include <vector>

#include "emi/types.hpp"

namespace emi::csv {

/// Shortest decimal representation that parses back to the identical
/// double. Used for every numeric cell the tools emit.
std::string format_double(double v);

/// Splits one CSV line on commas; trims a trailing carriage return.
std::vector<std::string> split_line(const std::string& line);

/// Strict finite-double parse of one cell; row/column (1-based) are used
/// in the error message.
double parse_cell(const std::string& cell, std::size_t row, std::size_t col);

struct Dataset {
  std::vector<Observation> observations;
  std::vector<std::string> covariate_names;
};

/// Reads a dataset file: header row, first column `y`, remaining columns
/// the covariates. Rectangular, all cells finite.
Dataset read_dataset(const std::string& path);

struct CovariateTable {
  std::vector<Eigen::VectorXd> rows;
  std::vector<std::string> names;
};

/// Reads a covariate-only file (no `y` column).
CovariateTable read_covariates(const std::string& path);

}  // namespace emi::csv
