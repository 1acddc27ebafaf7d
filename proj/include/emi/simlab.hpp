#pragma once

#include <Eigen/Core>
#include <cstdint>
#include <iosfwd>
#include <string>
#include <vector>

#include "emi/model.hpp"
#include "emi/types.hpp"

namespace emi::sim {

/// Synthetic-study configuration. Model 1 draws folded-t noise whose degree
/// depends on the covariates; Model 2 draws generalized-Pareto noise whose
/// shape depends on the covariates. Defaults follow make_config.
struct SimConfig {
  int model_id = 1;
  std::size_t n_off = 1000;
  std::size_t n_on = 1000;
  int p = 10;
  double tau0 = 0.8;
  double tau_n = 0.99;
  std::size_t replications = 100;
  std::uint64_t seed = 0;
  double alpha = 0.5;
  Eigen::VectorXd beta;   // defaults to 0.5 per coordinate
  Eigen::VectorXd eta1;   // defaults to 0.2 per coordinate
  Eigen::VectorXd eta2;   // defaults to 0.6 per coordinate
  EmiConfig emi;
};

SimConfig make_config(int model_id, std::size_t n_off, std::size_t n_on,
                      int p, double tau0, double tau_n,
                      std::size_t replications, std::uint64_t seed);

void validate(const SimConfig& cfg);

enum class Which : std::uint64_t { offline = 1, online = 2 };

struct SimObservation {
  Observation obs;
  double noise_param = 0.0;  // t degree (model 1) or gpd shape (model 2)
  double noise = 0.0;
};

/// Model 1 degree psi(x) = exp(eta1' x).
double t_degree(const SimConfig& cfg, const Eigen::VectorXd& x);
/// Model 2 shape phi(x) = 1 / (eta2' x); eta2' x must be positive.
double gpd_shape(const SimConfig& cfg, const Eigen::VectorXd& x);

/// Draws one replication's stream. Streams are independent across
/// (which, replication_index) through seed derivation.
std::vector<SimObservation> generate(const SimConfig& cfg, Which which,
                                     std::size_t replication_index);

std::vector<Observation> strip(const std::vector<SimObservation>& sims);

/// Closed-form conditional quantile of the generative model.
double true_quantile(const SimConfig& cfg, const Eigen::VectorXd& x,
                     double tau);

/// Average relative prediction square error.
double arse(const std::vector<double>& predicted,
            const std::vector<double>& truth);

enum class Method { emi, linear, emi_no_interp };

const char* method_name(Method m);

/// Direct quantile regression at the extreme level on the online set.
std::vector<double> baseline_linear(const std::vector<Observation>& online,
                                    double tau_n,
                                    const quantreg::SolverConfig& solver);

/// Per-query tail refit: shares one lower-level fit over the reference
/// data, then runs a fresh censored MLE at every query point.
class NoInterpBaseline {
 public:
  NoInterpBaseline(std::vector<Observation> data, double tau0,
                   const EmiConfig& cfg);

  double estimate(const Eigen::VectorXd& query_x, double tau_n) const;

 private:
  bilevel::SequentialSolver solver_;
};

struct MethodSummary {
  double mean = 0.0;
  double median = 0.0;
  double q1 = 0.0;
  double q3 = 0.0;
};

struct ArseReport {
  std::vector<Method> methods;
  /// values[m][k] is the ARSE of methods[m] in its k-th successful
  /// replication; replication_index[m][k] names that replication.
  std::vector<std::vector<double>> values;
  std::vector<std::vector<std::size_t>> replication_index;
  std::vector<MethodSummary> summaries;
  std::vector<std::string> failures;
};

MethodSummary summarize(std::vector<double> values);

ArseReport run_replications(const SimConfig& cfg,
                            const std::vector<Method>& methods);

struct StreamingStep {
  std::size_t step = 0;  // 1-based
  Method method = Method::emi;
  double estimate = 0.0;
  double truth = 0.0;
  std::uint64_t lp_solves = 0;  // solver invocations this step
  std::uint64_t mle_fits = 0;
  double wall_ns = 0.0;
};

/// Incremental scenario: the observation set grows one point per step from
/// the offline-only initial set. Linear refits at tau_n on the accumulated
/// set, the no-interpolation baseline re-solves both levels, EMI predicts
/// from the frozen offline model.
std::vector<StreamingStep> streaming_scenario(
    const SimConfig& cfg, const std::vector<Method>& methods);

/// One row per (replication, method): replication,method,arse.
void write_arse_csv(const ArseReport& report, std::ostream& out);

/// One row per step and method; the wall_ns column is timing and is the
/// only column not reproduced bit-identically across runs.
void write_streaming_csv(const std::vector<StreamingStep>& steps,
                         std::ostream& out);

}  // namespace emi::sim
