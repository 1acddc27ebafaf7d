#include <catch2/catch_amalgamated.hpp>
#include <cmath>
#include <limits>

#include "emi/gpd.hpp"
#include "oracles.hpp"

using Catch::Matchers::WithinAbs;
namespace gpd = emi::gpd;

TEST_CASE("survival function branches and endpoint") {
  REQUIRE_THAT(gpd::survival({0.0, 1.0}, 2.0),
               WithinAbs(std::exp(-2.0), 1e-12));
  REQUIRE_THAT(gpd::survival({1.0, 1.0}, 1.0), WithinAbs(0.5, 1e-12));
  REQUIRE_THAT(gpd::survival({-0.5, 1.0}, 2.0), WithinAbs(0.0, 1e-12));
  REQUIRE_THROWS_AS(gpd::survival({0.1, 0.0}, 1.0), emi::DomainError);
  REQUIRE_THROWS_AS(gpd::survival({0.1, 1.0}, -1.0), emi::DomainError);
}

TEST_CASE("survival starts at one and never increases") {
  for (const double gamma : {-0.3, 0.0, 0.4, 1.5}) {
    const gpd::GpdParams params{gamma, 0.7};
    REQUIRE_THAT(gpd::survival(params, 0.0), WithinAbs(1.0, 1e-15));
    double prev = 1.0;
    for (double z = 0.05; z < 8.0; z += 0.05) {
      const double s = gpd::survival(params, z);
      REQUIRE(s <= prev + 1e-15);
      REQUIRE(s >= 0.0);
      REQUIRE(s <= 1.0);
      prev = s;
    }
  }
}

TEST_CASE("log likelihood values and support handling") {
  REQUIRE_THAT(gpd::log_likelihood({0.0, 1.0}, 2.0), WithinAbs(-2.0, 1e-12));
  REQUIRE_THAT(gpd::log_likelihood({1.0, 1.0}, 1.0),
               WithinAbs(-2.0 * std::log(2.0), 1e-12));
  REQUIRE_THAT(gpd::log_likelihood({0.0, 2.0}, 0.0),
               WithinAbs(-std::log(2.0), 1e-12));
  // Outside the support: -infinity, distinct from the domain error below.
  REQUIRE(gpd::log_likelihood({-0.5, 1.0}, 3.0) ==
          -std::numeric_limits<double>::infinity());
  REQUIRE_THROWS_AS(gpd::log_likelihood({0.0, -1.0}, 1.0), emi::DomainError);
}

TEST_CASE("density integrates to the survival complement") {
  for (const gpd::GpdParams params :
       {gpd::GpdParams{0.5, 1.0}, gpd::GpdParams{0.0, 2.0},
        gpd::GpdParams{-0.3, 1.5}}) {
    const double z_hi = params.gamma < 0.0
                            ? 0.9 * (-params.sigma / params.gamma)
                            : 3.0;
    const double mass = oracle::integrate(
        [&](double z) { return std::exp(gpd::log_likelihood(params, z)); },
        0.0, z_hi, 1e-10);
    REQUIRE_THAT(mass, WithinAbs(1.0 - gpd::survival(params, z_hi), 1e-6));
  }
}

TEST_CASE("exceedance transform keeps order and counts positives") {
  const auto exc = gpd::exceedances({1.0, 2.0, 3.0}, 1.5);
  REQUIRE(exc.z == std::vector<double>{0.0, 0.5, 1.5});
  REQUIRE(exc.n_positive == 2);

  const std::vector<double> ys{0.4, -1.0, 2.2};
  const auto none = gpd::exceedances(ys, 2.2);
  REQUIRE(none.n_positive == 0);
  for (double z : none.z) {
    REQUIRE(z == 0.0);
  }

  const auto one = gpd::exceedances({5.0}, 0.0);
  REQUIRE(one.z == std::vector<double>{5.0});
  REQUIRE(one.n_positive == 1);
}

TEST_CASE("mle recovers a heavy-tailed shape") {
  gpd::Exceedances exc;
  exc.z = oracle::gpd_inverse_cdf_sample(0.5, 1.0, 5000, 42);
  exc.n_positive = exc.z.size();
  const auto fit = gpd::fit_mle(exc);
  REQUIRE_THAT(fit.gamma, WithinAbs(0.5, 0.05));
  REQUIRE_THAT(fit.sigma, WithinAbs(1.0, 0.05));
}

TEST_CASE("mle recovers the exponential boundary case") {
  gpd::Exceedances exc;
  exc.z = oracle::gpd_inverse_cdf_sample(0.0, 2.0, 5000, 42);
  exc.n_positive = exc.z.size();
  const auto fit = gpd::fit_mle(exc);
  REQUIRE_THAT(fit.gamma, WithinAbs(0.0, 0.05));
  REQUIRE_THAT(fit.sigma, WithinAbs(2.0, 0.1));
}

TEST_CASE("profile at gamma zero is the closed-form exponential mle") {
  const auto exc = gpd::exceedances({1.0, 3.0, 0.5, 2.5, 4.0}, 0.0);
  const double mean = (1.0 + 3.0 + 0.5 + 2.5 + 4.0) / 5.0;
  REQUIRE(gpd::fit_sigma_given_gamma(exc, 0.0) == mean);
}

TEST_CASE("mle requires enough exceedances") {
  gpd::Exceedances exc;
  exc.z = oracle::gpd_inverse_cdf_sample(0.2, 1.0, 10, 1);
  exc.n_positive = exc.z.size();
  REQUIRE_THROWS_AS(gpd::fit_mle(exc), emi::InsufficientExceedancesError);
}

TEST_CASE("fitted likelihood dominates a dense parameter grid") {
  gpd::Exceedances exc;
  exc.z = oracle::gpd_inverse_cdf_sample(0.3, 1.2, 500, 7);
  exc.n_positive = exc.z.size();
  const auto fit = gpd::fit_mle(exc);
  const double fitted_ll = gpd::censored_log_likelihood(fit, exc);

  const double s_hat = std::log(fit.sigma);
  double grid_best = -std::numeric_limits<double>::infinity();
  for (int i = 0; i < 200; ++i) {
    const double gamma = -0.45 + (2.0 + 0.45) * i / 199.0;
    for (int k = 0; k < 200; ++k) {
      const double s = s_hat - 2.0 + 4.0 * k / 199.0;
      grid_best = std::max(
          grid_best,
          gpd::censored_log_likelihood({gamma, std::exp(s)}, exc));
    }
  }
  REQUIRE(fitted_ll >= grid_best - 1e-6);
}

TEST_CASE("extrapolation identities") {
  SECTION("equal levels return the intermediate quantile exactly") {
    for (const double gamma : {-0.2, 0.0, 0.7}) {
      REQUIRE(gpd::extrapolate(1.25, {gamma, 2.0}, 0.8, 0.8) == 1.25);
    }
  }
  SECTION("logarithmic branch worked value") {
    REQUIRE_THAT(gpd::extrapolate(0.0, {0.0, 1.0}, 0.8, 0.99),
                 WithinAbs(std::log(20.0), 1e-12));
  }
  SECTION("heavy-tail branch worked value") {
    REQUIRE_THAT(gpd::extrapolate(0.0, {0.5, 1.0}, 0.8, 0.99),
                 WithinAbs(2.0 * (std::sqrt(20.0) - 1.0), 1e-12));
  }
}

TEST_CASE("extrapolation branch continuity near gamma zero") {
  for (const double tau_n : {0.81, 0.99, 0.99998}) {
    const double at_zero = gpd::extrapolate(0.3, {0.0, 1.4}, 0.8, tau_n);
    for (const double gamma : {1e-10, -1e-10}) {
      REQUIRE_THAT(gpd::extrapolate(0.3, {gamma, 1.4}, 0.8, tau_n),
                   WithinAbs(at_zero, 1e-6));
    }
    // Crossing the branch tolerance itself moves the value by less than
    // sigma * tol * log(ratio)^2 / 2, well inside 1e-6 for ratio <= 1e4.
    const double just_above =
        gpd::extrapolate(0.3, {1.0000001e-8, 1.4}, 0.8, tau_n);
    const double just_below =
        gpd::extrapolate(0.3, {0.9999999e-8, 1.4}, 0.8, tau_n);
    REQUIRE_THAT(just_above, WithinAbs(just_below, 1e-6));
  }
}

TEST_CASE("extrapolation grows with the target level for nonnegative shape") {
  for (const double gamma : {0.0, 0.4, 1.1}) {
    double prev = -std::numeric_limits<double>::infinity();
    for (double tau_n = 0.8; tau_n < 0.9999; tau_n += 0.0133) {
      const double q = gpd::extrapolate(1.0, {gamma, 0.9}, 0.8, tau_n);
      REQUIRE(q >= prev);
      REQUIRE(q >= 1.0);
      prev = q;
    }
  }
}

TEST_CASE("extrapolation rejects inverted or invalid levels") {
  REQUIRE_THROWS_AS(gpd::extrapolate(0.0, {0.1, 1.0}, 0.9, 0.8),
                    emi::DomainError);
  REQUIRE_THROWS_AS(gpd::extrapolate(0.0, {0.1, 1.0}, 0.8, 1.0),
                    emi::DomainError);
  REQUIRE_THROWS_AS(gpd::extrapolate(0.0, {0.1, -1.0}, 0.8, 0.9),
                    emi::DomainError);
}
