#include "emi/simlab.hpp"

#include <algorithm>
#include <boost/math/distributions/students_t.hpp>
#include <chrono>
#include <cmath>
#include <limits>
#include <ostream>

#include "emi/counters.hpp"
#include "emi/csv.hpp"
#include "emi/rng.hpp"

namespace emi::sim {

namespace {

double quantile_type7(std::vector<double> v, double f) {
  std::sort(v.begin(), v.end());
  const double h = f * static_cast<double>(v.size() - 1);
  const std::size_t lo = static_cast<std::size_t>(std::floor(h));
  const std::size_t hi = std::min(lo + 1, v.size() - 1);
  return v[lo] + (h - static_cast<double>(lo)) * (v[hi] - v[lo]);
}

}  // namespace

SimConfig make_config(int model_id, std::size_t n_off, std::size_t n_on,
                      int p, double tau0, double tau_n,
                      std::size_t replications, std::uint64_t seed) {
  SimConfig cfg;
  cfg.model_id = model_id;
  cfg.n_off = n_off;
  cfg.n_on = n_on;
  cfg.p = p;
  cfg.tau0 = tau0;
  cfg.tau_n = tau_n;
  cfg.replications = replications;
  cfg.seed = seed;
  cfg.beta = Eigen::VectorXd::Constant(p, 0.5);
  cfg.eta1 = Eigen::VectorXd::Constant(p, 0.2);
  cfg.eta2 = Eigen::VectorXd::Constant(p, 0.6);
  validate(cfg);
  return cfg;
}

void validate(const SimConfig& cfg) {
  if (cfg.model_id != 1 && cfg.model_id != 2) {
    throw DomainError("model_id must be 1 or 2");
  }
  if (cfg.n_off < 1 || cfg.n_on < 1 || cfg.p < 1) {
    throw DomainError("sample sizes and dimension must be positive");
  }
  if (!(cfg.tau0 > 0.0 && cfg.tau0 < cfg.tau_n && cfg.tau_n < 1.0)) {
    throw DomainError("levels must satisfy 0 < tau0 < tauN < 1");
  }
  if (cfg.beta.size() != cfg.p || cfg.eta1.size() != cfg.p ||
      cfg.eta2.size() != cfg.p) {
    throw DomainError("beta/eta vectors must have dimension p");
  }
}

double t_degree(const SimConfig& cfg, const Eigen::VectorXd& x) {
  return std::exp(cfg.eta1.dot(x));
}

double gpd_shape(const SimConfig& cfg, const Eigen::VectorXd& x) {
  const double denom = cfg.eta2.dot(x);
  if (!(denom > 0.0)) {
    throw DomainError("eta2' x must be positive for model 2");
  }
  return 1.0 / denom;
}

std::vector<SimObservation> generate(const SimConfig& cfg, Which which,
                                     std::size_t replication_index) {
  validate(cfg);
  const std::size_t n = which == Which::offline ? cfg.n_off : cfg.n_on;
  rng::SplitMix64 gen(rng::mix(rng::mix(cfg.seed, static_cast<std::uint64_t>(which)),
                               replication_index));
  std::vector<SimObservation> out;
  out.reserve(n);
  for (std::size_t i = 0; i < n; ++i) {
    SimObservation so;
    so.obs.x.resize(cfg.p);
    for (int k = 0; k < cfg.p; ++k) {
      so.obs.x(k) = gen.uniform();
    }
    if (cfg.model_id == 1) {
      so.noise_param = t_degree(cfg, so.obs.x);
      so.noise = std::abs(gen.student_t(so.noise_param));
    } else {
      so.noise_param = gpd_shape(cfg, so.obs.x);
      so.noise = gen.gpd(1.0, 0.25, so.noise_param);
    }
    so.obs.y = cfg.alpha + cfg.beta.dot(so.obs.x) + so.noise;
    out.push_back(std::move(so));
  }
  return out;
}

std::vector<Observation> strip(const std::vector<SimObservation>& sims) {
  std::vector<Observation> out;
  out.reserve(sims.size());
  for (const auto& so : sims) {
    out.push_back(so.obs);
  }
  return out;
}

double true_quantile(const SimConfig& cfg, const Eigen::VectorXd& x,
                     double tau) {
  if (!(tau > 0.0 && tau < 1.0)) {
    throw DomainError("quantile level must lie in (0,1)");
  }
  const double base = cfg.alpha + cfg.beta.dot(x);
  if (cfg.model_id == 1) {
    // |T(psi)| quantile: the t quantile at level (1+tau)/2.
    const boost::math::students_t_distribution<double> dist(t_degree(cfg, x));
    return base + boost::math::quantile(dist, 0.5 * (1.0 + tau));
  }
  const double phi = gpd_shape(cfg, x);
  return base + 1.0 + 0.25 * std::expm1(-phi * std::log1p(-tau)) / phi;
}

double arse(const std::vector<double>& predicted,
            const std::vector<double>& truth) {
  if (predicted.size() != truth.size() || truth.empty()) {
    throw DomainError("predicted and truth must share a positive length");
  }
  double total = 0.0;
  for (std::size_t i = 0; i < truth.size(); ++i) {
    if (truth[i] == 0.0) {
      throw DomainError("true quantile is zero at index " +
                        std::to_string(i));
    }
    const double rel = predicted[i] / truth[i] - 1.0;
    total += rel * rel;
  }
  return total / static_cast<double>(truth.size());
}

const char* method_name(Method m) {
  switch (m) {
    case Method::emi:
      return "emi";
    case Method::linear:
      return "linear";
    case Method::emi_no_interp:
      return "emi_no_interp";
  }
  return "unknown";
}

std::vector<double> baseline_linear(const std::vector<Observation>& online,
                                    double tau_n,
                                    const quantreg::SolverConfig& solver) {
  const quantreg::LpSolution sol = quantreg::fit_qr(online, tau_n, solver);
  std::vector<double> estimates;
  estimates.reserve(online.size());
  for (const auto& obs : online) {
    estimates.push_back(quantreg::predict_quantile(sol.fit, obs.x));
  }
  return estimates;
}

NoInterpBaseline::NoInterpBaseline(std::vector<Observation> data, double tau0,
                                   const EmiConfig& cfg)
    : solver_(std::move(data), tau0,
              bilevel::BilevelConfig{cfg.solver, cfg.tail,
                                     cfg.exceedance_mode,
                                     cfg.exceedance_floor}) {}

double NoInterpBaseline::estimate(const Eigen::VectorXd& query_x,
                                  double tau_n) const {
  const bilevel::MpecSolution sol = solver_.solve(query_x);
  return gpd::extrapolate(sol.threshold, sol.tail, solver_.tau0(), tau_n);
}

MethodSummary summarize(std::vector<double> values) {
  MethodSummary s;
  if (values.empty()) {
    return s;
  }
  double total = 0.0;
  for (double v : values) {
    total += v;
  }
  s.mean = total / static_cast<double>(values.size());
  s.median = quantile_type7(values, 0.5);
  s.q1 = quantile_type7(values, 0.25);
  s.q3 = quantile_type7(values, 0.75);
  return s;
}

ArseReport run_replications(const SimConfig& cfg,
                            const std::vector<Method>& methods) {
  validate(cfg);
  ArseReport report;
  report.methods = methods;
  report.values.resize(methods.size());
  report.replication_index.resize(methods.size());

  for (std::size_t rep = 0; rep < cfg.replications; ++rep) {
    const std::vector<Observation> offline =
        strip(generate(cfg, Which::offline, rep));
    const std::vector<SimObservation> online_sim =
        generate(cfg, Which::online, rep);
    const std::vector<Observation> online = strip(online_sim);
    std::vector<double> truth;
    truth.reserve(online.size());
    for (const auto& obs : online) {
      truth.push_back(true_quantile(cfg, obs.x, cfg.tau_n));
    }

    for (std::size_t m = 0; m < methods.size(); ++m) {
      try {
        std::vector<double> estimates;
        switch (methods[m]) {
          case Method::emi: {
            const EmiModel model = fit_offline(offline, cfg.tau0, cfg.emi);
            estimates.reserve(online.size());
            for (const auto& obs : online) {
              estimates.push_back(predict(model, obs.x, cfg.tau_n).q_tau_n);
            }
            break;
          }
          case Method::linear:
            estimates = baseline_linear(online, cfg.tau_n, cfg.emi.solver);
            break;
          case Method::emi_no_interp: {
            const NoInterpBaseline baseline(offline, cfg.tau0, cfg.emi);
            estimates.reserve(online.size());
            for (const auto& obs : online) {
              estimates.push_back(baseline.estimate(obs.x, cfg.tau_n));
            }
            break;
          }
        }
        report.values[m].push_back(arse(estimates, truth));
        report.replication_index[m].push_back(rep);
      } catch (const Error& e) {
        report.failures.push_back("replication " + std::to_string(rep) +
                                  " method " + method_name(methods[m]) +
                                  ": " + e.what());
      }
    }
  }

  report.summaries.reserve(methods.size());
  for (const auto& vals : report.values) {
    report.summaries.push_back(summarize(vals));
  }
  return report;
}

std::vector<StreamingStep> streaming_scenario(
    const SimConfig& cfg, const std::vector<Method>& methods) {
  validate(cfg);
  const std::vector<Observation> offline =
      strip(generate(cfg, Which::offline, 0));
  const std::vector<Observation> online =
      strip(generate(cfg, Which::online, 0));

  const bool wants_emi =
      std::find(methods.begin(), methods.end(), Method::emi) != methods.end();
  std::optional<EmiModel> model;
  if (wants_emi) {
    model.emplace(fit_offline(offline, cfg.tau0, cfg.emi));
  }

  std::vector<Observation> accumulated = offline;
  std::vector<StreamingStep> steps;
  steps.reserve(online.size() * methods.size());
  const double nan = std::numeric_limits<double>::quiet_NaN();

  for (std::size_t t = 0; t < online.size(); ++t) {
    accumulated.push_back(online[t]);
    const Eigen::VectorXd& x = online[t].x;
    const double truth = true_quantile(cfg, x, cfg.tau_n);

    for (const Method method : methods) {
      StreamingStep step;
      step.step = t + 1;
      step.method = method;
      step.truth = truth;
      const counters::Snapshot before = counters::snapshot();
      const auto t0 = std::chrono::steady_clock::now();
      try {
        switch (method) {
          case Method::emi:
            step.estimate = predict(*model, x, cfg.tau_n).q_tau_n;
            break;
          case Method::linear: {
            const quantreg::LpSolution sol =
                quantreg::fit_qr(accumulated, cfg.tau_n, cfg.emi.solver);
            step.estimate = quantreg::predict_quantile(sol.fit, x);
            break;
          }
          case Method::emi_no_interp: {
            const NoInterpBaseline baseline(accumulated, cfg.tau0, cfg.emi);
            step.estimate = baseline.estimate(x, cfg.tau_n);
            break;
          }
        }
      } catch (const Error&) {
        step.estimate = nan;
      }
      const auto t1 = std::chrono::steady_clock::now();
      const counters::Snapshot after = counters::snapshot();
      step.lp_solves = after.lp_solves - before.lp_solves;
      step.mle_fits = after.mle_fits - before.mle_fits;
      step.wall_ns = static_cast<double>(
          std::chrono::duration_cast<std::chrono::nanoseconds>(t1 - t0)
              .count());
      steps.push_back(step);
    }
  }
  return steps;
}

void write_arse_csv(const ArseReport& report, std::ostream& out) {
  out << "replication,method,arse\n";
  for (std::size_t m = 0; m < report.methods.size(); ++m) {
    for (std::size_t k = 0; k < report.values[m].size(); ++k) {
      out << report.replication_index[m][k] << ','
          << method_name(report.methods[m]) << ','
          << csv::format_double(report.values[m][k]) << '\n';
    }
  }
}

void write_streaming_csv(const std::vector<StreamingStep>& steps,
                         std::ostream& out) {
  out << "step,method,estimate,truth,lp_solves,mle_fits,wall_ns\n";
  for (const auto& s : steps) {
    out << s.step << ',' << method_name(s.method) << ','
        << csv::format_double(s.estimate) << ',' << csv::format_double(s.truth)
        << ',' << s.lp_solves << ',' << s.mle_fits << ','
        << csv::format_double(s.wall_ns) << '\n';
  }
}

}  // namespace emi::sim
