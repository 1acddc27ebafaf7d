#include "emi/gpd.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>

#include "emi/counters.hpp"

namespace emi::gpd {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();
constexpr double kSupportFloor = 1e-12;
constexpr double kGolden = 0.61803398874989484820;

struct PositiveExceedances {
  std::vector<double> z;
  double z_max = 0.0;
};

PositiveExceedances positive_part(const Exceedances& exc) {
  PositiveExceedances out;
  out.z.reserve(exc.n_positive);
  for (double zi : exc.z) {
    if (zi > 0.0) {
      out.z.push_back(zi);
      out.z_max = std::max(out.z_max, zi);
    }
  }
  return out;
}

/// Censored log-likelihood at (gamma, sigma = exp(s)) over positive
/// exceedances; -inf outside the support slab.
double profile_objective(const PositiveExceedances& pe, double gamma,
                         double s) {
  const double sigma = std::exp(s);
  if (std::abs(gamma) < kGammaZeroTol) {
    double sum = 0.0;
    for (double zi : pe.z) {
      sum += zi;
    }
    return -(sum / sigma + static_cast<double>(pe.z.size()) * s);
  }
  if (1.0 + gamma * pe.z_max / sigma <= kSupportFloor) {
    return -kInf;
  }
  const double c = (1.0 + gamma) / gamma;
  double ll = 0.0;
  for (double zi : pe.z) {
    ll -= c * std::log1p(gamma * zi / sigma) + s;
  }
  return ll;
}

struct InnerResult {
  double s = 0.0;
  double ll = -kInf;
};

/// Maximizes the objective over s = log sigma for fixed gamma: bracket by
/// doubling steps, then golden-section. Derivative-free throughout.
InnerResult maximize_over_log_sigma(const PositiveExceedances& pe,
                                    double gamma, double s_start,
                                    const FitConfig& cfg) {
  const auto f = [&](double s) { return profile_objective(pe, gamma, s); };

  double s0 = s_start;
  if (gamma < 0.0) {
    // Feasibility demands sigma > -gamma * z_max.
    const double s_floor = std::log(-gamma * pe.z_max);
    if (!(s0 > s_floor)) {
      s0 = s_floor + 1.0;
    }
  }

  int budget = cfg.max_line_search_iterations;
  double h = 0.5;
  double sa = s0 - h, sb = s0, sc = s0 + h;
  double fa = f(sa), fb = f(sb), fc = f(sc);
  while (!(fb >= fa && fb >= fc)) {
    if (--budget <= 0) {
      throw ConvergenceFailureError("tail fit line search failed to bracket",
                                    gamma, std::exp(sb));
    }
    if (fa > fb) {
      sc = sb;
      fc = fb;
      sb = sa;
      fb = fa;
      h *= 2.0;
      sa = sb - h;
      fa = f(sa);
    } else {
      sa = sb;
      fa = fb;
      sb = sc;
      fb = fc;
      h *= 2.0;
      sc = sb + h;
      fc = f(sc);
    }
  }

  // Golden-section on [sa, sc] around the bracketed maximum.
  double x1 = sc - kGolden * (sc - sa);
  double x2 = sa + kGolden * (sc - sa);
  double f1 = f(x1), f2 = f(x2);
  while (sc - sa > cfg.tol_log_sigma && budget-- > 0) {
    if (f1 >= f2) {
      sc = x2;
      x2 = x1;
      f2 = f1;
      x1 = sc - kGolden * (sc - sa);
      f1 = f(x1);
    } else {
      sa = x1;
      x1 = x2;
      f1 = f2;
      x2 = sa + kGolden * (sc - sa);
      f2 = f(x2);
    }
  }
  InnerResult res;
  res.s = (f1 >= f2) ? x1 : x2;
  res.ll = std::max(f1, f2);
  return res;
}

InnerResult profile(const PositiveExceedances& pe, double gamma,
                    double s_start, const FitConfig& cfg) {
  if (std::abs(gamma) < kGammaZeroTol) {
    // Exponential MLE in closed form: sigma = mean of positive exceedances.
    double mean = 0.0;
    for (double zi : pe.z) {
      mean += zi;
    }
    mean /= static_cast<double>(pe.z.size());
    InnerResult res;
    res.s = std::log(mean);
    res.ll = profile_objective(pe, gamma, res.s);
    return res;
  }
  return maximize_over_log_sigma(pe, gamma, s_start, cfg);
}

}  // namespace

double survival(const GpdParams& params, double z) {
  if (!(params.sigma > 0.0)) {
    throw DomainError("gpd scale must be positive");
  }
  if (!(z >= 0.0)) {
    throw DomainError("exceedance must be nonnegative");
  }
  if (std::abs(params.gamma) < kGammaZeroTol) {
    return std::exp(-z / params.sigma);
  }
  const double base = 1.0 + params.gamma * z / params.sigma;
  if (base <= 0.0) {
    return 0.0;
  }
  return std::exp(-std::log(base) / params.gamma);
}

double log_likelihood(const GpdParams& params, double z) {
  if (!(params.sigma > 0.0)) {
    throw DomainError("gpd scale must be positive");
  }
  if (!(z >= 0.0)) {
    throw DomainError("exceedance must be nonnegative");
  }
  const double log_sigma = std::log(params.sigma);
  if (std::abs(params.gamma) < kGammaZeroTol) {
    return -(z / params.sigma + log_sigma);
  }
  const double arg = params.gamma * z / params.sigma;
  if (1.0 + arg <= 0.0) {
    return -kInf;
  }
  return -((1.0 + params.gamma) / params.gamma * std::log1p(arg) + log_sigma);
}

Exceedances exceedances(const std::vector<double>& ys, double threshold) {
  Exceedances out;
  out.z.reserve(ys.size());
  for (double y : ys) {
    const double zi = std::max(y - threshold, 0.0);
    out.z.push_back(zi);
    if (zi > 0.0) {
      ++out.n_positive;
    }
  }
  return out;
}

double censored_log_likelihood(const GpdParams& params,
                               const Exceedances& exc) {
  double total = 0.0;
  for (double zi : exc.z) {
    if (zi > 0.0) {
      total += log_likelihood(params, zi);
    }
  }
  return total;
}

double fit_sigma_given_gamma(const Exceedances& exc, double gamma,
                             const FitConfig& cfg) {
  const PositiveExceedances pe = positive_part(exc);
  if (pe.z.empty()) {
    throw InsufficientExceedancesError("no positive exceedances", 0, 1);
  }
  double mean = 0.0;
  for (double zi : pe.z) {
    mean += zi;
  }
  mean /= static_cast<double>(pe.z.size());
  if (std::abs(gamma) < kGammaZeroTol) {
    return mean;
  }
  return std::exp(maximize_over_log_sigma(pe, gamma, std::log(mean), cfg).s);
}

GpdParams fit_mle(const Exceedances& exc, const FitConfig& cfg) {
  if (exc.n_positive < cfg.min_exceedances) {
    throw InsufficientExceedancesError(
        "only " + std::to_string(exc.n_positive) +
            " positive exceedances; need " +
            std::to_string(cfg.min_exceedances),
        exc.n_positive, cfg.min_exceedances);
  }
  counters::record_mle_fit();

  const PositiveExceedances pe = positive_part(exc);
  double mean = 0.0;
  for (double zi : pe.z) {
    mean += zi;
  }
  mean /= static_cast<double>(pe.z.size());

  double best_gamma = 0.0;
  InnerResult best{std::log(mean), -kInf};

  // Coarse profile over the shape range.
  const int grid = std::max(cfg.coarse_grid_points, 2);
  const double step = (cfg.gamma_hi - cfg.gamma_lo) / (grid - 1);
  double warm = std::log(mean);
  int best_k = 0;
  for (int k = 0; k < grid; ++k) {
    const double g = cfg.gamma_lo + k * step;
    const InnerResult r = profile(pe, g, warm, cfg);
    warm = r.s;
    if (r.ll > best.ll) {
      best = r;
      best_gamma = g;
      best_k = k;
    }
  }

  // Golden-section refinement between the coarse neighbours of the best
  // grid point.
  double lo = cfg.gamma_lo + std::max(best_k - 1, 0) * step;
  double hi = cfg.gamma_lo + std::min(best_k + 1, grid - 1) * step;
  double x1 = hi - kGolden * (hi - lo);
  double x2 = lo + kGolden * (hi - lo);
  InnerResult r1 = profile(pe, x1, best.s, cfg);
  InnerResult r2 = profile(pe, x2, r1.s, cfg);
  if (r1.ll > best.ll) {
    best = r1;
    best_gamma = x1;
  }
  if (r2.ll > best.ll) {
    best = r2;
    best_gamma = x2;
  }
  while (hi - lo > cfg.tol_gamma) {
    if (r1.ll >= r2.ll) {
      hi = x2;
      x2 = x1;
      r2 = r1;
      x1 = hi - kGolden * (hi - lo);
      r1 = profile(pe, x1, r2.s, cfg);
      if (r1.ll > best.ll) {
        best = r1;
        best_gamma = x1;
      }
    } else {
      lo = x1;
      x1 = x2;
      r1 = r2;
      x2 = lo + kGolden * (hi - lo);
      r2 = profile(pe, x2, r1.s, cfg);
      if (r2.ll > best.ll) {
        best = r2;
        best_gamma = x2;
      }
    }
  }

  return GpdParams{best_gamma, std::exp(best.s)};
}

double extrapolate(double q_tau0, const GpdParams& params, double tau0,
                   double tau_n) {
  if (!(params.sigma > 0.0)) {
    throw DomainError("gpd scale must be positive");
  }
  if (!(tau0 > 0.0 && tau0 < 1.0 && tau_n < 1.0)) {
    throw DomainError("quantile levels must lie in (0,1)");
  }
  if (tau_n < tau0) {
    throw DomainError("extreme level must not fall below the threshold level");
  }
  const double ratio = (1.0 - tau0) / (1.0 - tau_n);
  const double log_ratio = std::log(ratio);
  if (std::abs(params.gamma) < kGammaZeroTol) {
    return q_tau0 + params.sigma * log_ratio;
  }
  return q_tau0 +
         params.sigma * std::expm1(params.gamma * log_ratio) / params.gamma;
}

}  // namespace emi::gpd
