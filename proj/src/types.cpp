#include "emi/types.hpp"

#include <cmath>

namespace emi {

Eigen::Index check_dataset(const std::vector<Observation>& data) {
  if (data.empty()) {
    throw DomainError("dataset is empty");
  }
  const Eigen::Index p = data.front().x.size();
  if (p == 0) {
    throw DomainError("observations carry no covariates");
  }
  for (const auto& obs : data) {
    if (obs.x.size() != p) {
      throw DomainError("covariate dimension differs across observations");
    }
    if (!std::isfinite(obs.y) || !obs.x.allFinite()) {
      throw DomainError("observations must be finite");
    }
  }
  return p;
}

void assemble_design(const std::vector<Observation>& data, Eigen::MatrixXd& a,
                     Eigen::VectorXd& y) {
  const Eigen::Index n = static_cast<Eigen::Index>(data.size());
  const Eigen::Index p = data.front().x.size();
  a.resize(n, p + 1);
  y.resize(n);
  for (Eigen::Index i = 0; i < n; ++i) {
    a(i, 0) = 1.0;
    a.row(i).tail(p) = data[static_cast<std::size_t>(i)].x.transpose();
    y(i) = data[static_cast<std::size_t>(i)].y;
  }
}

}  // namespace emi
