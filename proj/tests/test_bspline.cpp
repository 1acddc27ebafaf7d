#include <catch2/catch_amalgamated.hpp>
#include <cmath>

#include "emi/bspline.hpp"
#include "emi/rng.hpp"
#include "oracles.hpp"

using Catch::Matchers::WithinAbs;
namespace bspline = emi::bspline;

namespace {

bspline::KnotVector random_clamped(int degree, int n_interior,
                                   std::uint64_t seed) {
  emi::rng::SplitMix64 gen(seed);
  std::vector<double> interior(n_interior);
  for (auto& v : interior) {
    v = gen.uniform();
  }
  std::sort(interior.begin(), interior.end());
  std::vector<double> knots(degree + 1, 0.0);
  knots.insert(knots.end(), interior.begin(), interior.end());
  knots.insert(knots.end(), degree + 1, 1.0);
  return bspline::KnotVector(std::move(knots), degree);
}

}  // namespace

TEST_CASE("order-zero basis is the interval indicator") {
  const bspline::KnotVector kv({0.0, 1.0, 2.0}, 0);
  REQUIRE(bspline::basis(0, kv, 0.5) == 1.0);
  REQUIRE(bspline::basis(0, kv, 1.5) == 0.0);
  REQUIRE(bspline::basis(1, kv, 1.5) == 1.0);
  REQUIRE_THROWS_AS(bspline::basis(2, kv, 0.5), emi::DomainError);
  REQUIRE_THROWS_AS(bspline::basis(-1, kv, 0.5), emi::DomainError);
}

TEST_CASE("clamped cubic interpolates at the boundary") {
  const bspline::KnotVector kv({0, 0, 0, 0, 1, 1, 1, 1}, 3);
  REQUIRE(kv.basis_count() == 4);
  REQUIRE(bspline::basis(0, kv, 0.0) == 1.0);
  for (int j = 1; j < 4; ++j) {
    REQUIRE(bspline::basis(j, kv, 0.0) == 0.0);
  }
  // Right-endpoint closure: the last knot belongs to the last interval.
  REQUIRE(bspline::basis(3, kv, 1.0) == 1.0);
  for (int j = 0; j < 3; ++j) {
    REQUIRE(bspline::basis(j, kv, 1.0) == 0.0);
  }
}

TEST_CASE("quadratic basis matches the naive recursion") {
  const std::vector<double> knots{0.0, 0.0, 0.0, 0.5, 1.0, 1.0, 1.0};
  const bspline::KnotVector kv(knots, 2);
  REQUIRE(kv.basis_count() == 4);
  for (int j = 0; j < 4; ++j) {
    REQUIRE_THAT(bspline::basis(j, kv, 0.25),
                 WithinAbs(oracle::bspline_naive(j, 2, knots, 0.25), 1e-15));
  }
}

TEST_CASE("clamped knot construction") {
  SECTION("no interior knots") {
    std::vector<double> values;
    for (int i = 0; i <= 20; ++i) {
      values.push_back(i / 20.0);
    }
    const auto kv = bspline::make_clamped_knots(values, 3, 0);
    REQUIRE(kv.knots() == std::vector<double>{0, 0, 0, 0, 1, 1, 1, 1});
    REQUIRE(kv.basis_count() == 4);
  }
  SECTION("single interior knot lands on the median") {
    const std::vector<double> values{1.0, 2.0, 3.0, 4.0, 5.0};
    const auto kv = bspline::make_clamped_knots(values, 2, 1);
    REQUIRE(kv.knots()[3] == 3.0);
  }
  SECTION("constant feature is rejected") {
    REQUIRE_THROWS_AS(bspline::make_clamped_knots({2.0, 2.0, 2.0}, 3, 1),
                      emi::DegenerateFeatureError);
  }
}

TEST_CASE("partition of unity on random clamped knot vectors") {
  int seed = 0;
  for (const int degree : {1, 2, 3, 1, 2}) {
    const auto kv = random_clamped(degree, 3 + (seed % 3), 100 + seed);
    ++seed;
    for (int g = 0; g <= 1000; ++g) {
      const double x = g / 1000.0;
      double total = 0.0;
      for (int j = 0; j < kv.basis_count(); ++j) {
        total += bspline::basis(j, kv, x);
      }
      REQUIRE_THAT(total, WithinAbs(1.0, 1e-12));
    }
  }
}

TEST_CASE("local support and nonnegativity hold exactly") {
  const auto kv = random_clamped(3, 4, 77);
  const auto& knots = kv.knots();
  emi::rng::SplitMix64 gen(5);
  for (int trial = 0; trial < 2000; ++trial) {
    const double x = 1.4 * gen.uniform() - 0.2;
    for (int j = 0; j < kv.basis_count(); ++j) {
      const double v = bspline::basis(j, kv, x);
      REQUIRE(v >= 0.0);
      if (x < knots[j] || x > knots[j + kv.degree() + 1]) {
        REQUIRE(v == 0.0);
      }
    }
  }
}

TEST_CASE("design matrix rows") {
  const auto kv = random_clamped(3, 5, 1234);
  SECTION("rows sum to one in range") {
    emi::rng::SplitMix64 gen(8);
    std::vector<double> values(200);
    for (auto& v : values) {
      v = gen.uniform();
    }
    const Eigen::MatrixXd b = bspline::design_matrix(values, kv);
    for (Eigen::Index i = 0; i < b.rows(); ++i) {
      REQUIRE_THAT(b.row(i).sum(), WithinAbs(1.0, 1e-12));
    }
  }
  SECTION("left boundary row is the first unit vector") {
    const Eigen::MatrixXd b = bspline::design_matrix({kv.front()}, kv);
    REQUIRE(b(0, 0) == 1.0);
    REQUIRE(b.row(0).tail(b.cols() - 1).cwiseAbs().maxCoeff() == 0.0);
  }
  SECTION("out-of-range values give zero rows") {
    const Eigen::MatrixXd b = bspline::design_matrix({-3.0, 4.0}, kv);
    REQUIRE(b.cwiseAbs().maxCoeff() == 0.0);
  }
  SECTION("entries match the naive recursion") {
    emi::rng::SplitMix64 gen(9);
    std::vector<double> values(50);
    for (auto& v : values) {
      v = gen.uniform();
    }
    values.push_back(0.0);
    values.push_back(1.0);
    const Eigen::MatrixXd b = bspline::design_matrix(values, kv);
    for (std::size_t i = 0; i < values.size(); ++i) {
      for (int j = 0; j < kv.basis_count(); ++j) {
        REQUIRE_THAT(
            b(static_cast<Eigen::Index>(i), j),
            WithinAbs(oracle::bspline_naive(j, 3, kv.knots(), values[i]),
                      1e-12));
      }
    }
  }
}

TEST_CASE("coefficient fitting") {
  emi::rng::SplitMix64 gen(21);

  SECTION("constant targets reach zero residual") {
    const int p = 3;
    const int n = 40;
    Eigen::MatrixXd features(n, p);
    for (int i = 0; i < n; ++i) {
      for (int k = 0; k < p; ++k) {
        features(i, k) = gen.uniform();
      }
    }
    std::vector<bspline::KnotVector> dims;
    for (int k = 0; k < p; ++k) {
      std::vector<double> col(n);
      Eigen::VectorXd::Map(col.data(), n) = features.col(k);
      dims.push_back(bspline::make_clamped_knots(col, 3, 2));
    }
    const double c = 4.2;
    const Eigen::VectorXd targets = Eigen::VectorXd::Constant(n, c);
    const Eigen::VectorXd t = bspline::fit_coefficients(features, targets, dims);
    // Each row of the summed design sums to p, so t = (c/p) 1 is exact.
    Eigen::MatrixXd summed = Eigen::MatrixXd::Zero(n, dims[0].basis_count());
    for (int k = 0; k < p; ++k) {
      std::vector<double> col(n);
      Eigen::VectorXd::Map(col.data(), n) = features.col(k);
      summed += bspline::design_matrix(col, dims[k]);
    }
    REQUIRE((summed * t - targets).norm() <= 1e-10);
  }

  SECTION("square interpolation system reproduces the targets") {
    const int n = 10;
    Eigen::MatrixXd features(n, 1);
    Eigen::VectorXd targets(n);
    for (int i = 0; i < n; ++i) {
      features(i, 0) = static_cast<double>(i) / (n - 1);
      targets(i) = std::sin(3.0 * features(i, 0));
    }
    std::vector<double> col(n);
    Eigen::VectorXd::Map(col.data(), n) = features.col(0);
    // J = n_interior + degree + 1 = 10 = N: square system.
    std::vector<bspline::KnotVector> dims{
        bspline::make_clamped_knots(col, 3, 6)};
    const Eigen::VectorXd t = bspline::fit_coefficients(features, targets, dims);
    const Eigen::MatrixXd b = bspline::design_matrix(col, dims[0]);
    REQUIRE((b * t - targets).lpNorm<Eigen::Infinity>() <= 1e-8);
  }

  SECTION("overdetermined fit matches the normal-equations oracle") {
    const int n = 60;
    Eigen::MatrixXd features(n, 2);
    Eigen::VectorXd targets(n);
    for (int i = 0; i < n; ++i) {
      features(i, 0) = gen.uniform();
      features(i, 1) = gen.uniform();
      targets(i) = std::cos(features(i, 0)) + features(i, 1) * features(i, 1);
    }
    std::vector<bspline::KnotVector> dims;
    Eigen::MatrixXd summed;
    for (int k = 0; k < 2; ++k) {
      std::vector<double> col(n);
      Eigen::VectorXd::Map(col.data(), n) = features.col(k);
      dims.push_back(bspline::make_clamped_knots(col, 3, 3));
    }
    summed = Eigen::MatrixXd::Zero(n, dims[0].basis_count());
    for (int k = 0; k < 2; ++k) {
      std::vector<double> col(n);
      Eigen::VectorXd::Map(col.data(), n) = features.col(k);
      summed += bspline::design_matrix(col, dims[k]);
    }
    const Eigen::VectorXd t = bspline::fit_coefficients(features, targets, dims);
    const Eigen::VectorXd t_oracle =
        oracle::normal_equation_solve(summed, targets);
    REQUIRE((t - t_oracle).lpNorm<Eigen::Infinity>() <= 1e-8);
    // Least-squares optimality: never worse than the zero vector.
    REQUIRE((summed * t - targets).norm() <= targets.norm() + 1e-12);
  }

  SECTION("all-zero design is singular") {
    Eigen::MatrixXd features(3, 1);
    features << 5.0, 6.0, 7.0;
    std::vector<bspline::KnotVector> dims{
        bspline::make_clamped_knots({0.0, 0.5, 1.0}, 1, 0)};
    REQUIRE_THROWS_AS(
        bspline::fit_coefficients(features, Eigen::VectorXd::Ones(3), dims),
        emi::SingularSystemError);
  }
}

TEST_CASE("interpolator evaluation") {
  emi::rng::SplitMix64 gen(33);
  const int n = 30;
  const int p = 2;
  Eigen::MatrixXd features(n, p);
  Eigen::VectorXd targets(n);
  for (int i = 0; i < n; ++i) {
    features(i, 0) = gen.uniform();
    features(i, 1) = 2.0 * gen.uniform() - 1.0;
    targets(i) = 1.0 + features(i, 0) - 0.5 * features(i, 1);
  }
  const auto fit = bspline::fit_interpolator(features, targets, 3, 2,
                                             bspline::SplineMode::shared);
  const bspline::Interpolator& itp = fit.interpolator;

  SECTION("constant surface returns the constant") {
    const auto cfit = bspline::fit_interpolator(
        features, Eigen::VectorXd::Constant(n, 2.5), 3, 2,
        bspline::SplineMode::shared);
    Eigen::VectorXd x(2);
    x << 0.4, 0.1;
    REQUIRE_THAT(cfit.interpolator.evaluate(x), WithinAbs(2.5, 1e-9));
  }

  SECTION("outside the range the nearest offline value is used") {
    Eigen::VectorXd below(2);
    below << features.col(0).minCoeff() - 0.7, 0.2;
    Eigen::VectorXd clamped(2);
    clamped << features.col(0).minCoeff(), 0.2;
    std::vector<int> flagged;
    REQUIRE(itp.evaluate(below, &flagged) == itp.evaluate(clamped));
    REQUIRE(flagged == std::vector<int>{0});
  }

  SECTION("constant along a ray leaving the box in one coordinate") {
    Eigen::VectorXd x(2);
    x << 0.5, 0.0;
    Eigen::VectorXd out = x;
    out(1) = features.col(1).maxCoeff() + 1.0;
    const double at_edge = itp.evaluate(out);
    out(1) += 5.0;
    REQUIRE(itp.evaluate(out) == at_edge);
    out(1) += 100.0;
    REQUIRE(itp.evaluate(out) == at_edge);
  }

  SECTION("continuous over the in-range box") {
    Eigen::VectorXd x(2);
    x << 0.5, 0.0;
    const double f0 = itp.evaluate(x);
    double h = 1e-3;
    double prev_gap = std::abs(itp.evaluate(x + Eigen::VectorXd::Constant(2, h)) - f0);
    for (int k = 0; k < 4; ++k) {
      h /= 10.0;
      const double gap =
          std::abs(itp.evaluate(x + Eigen::VectorXd::Constant(2, h)) - f0);
      REQUIRE(gap <= prev_gap + 1e-12);
      prev_gap = gap;
    }
    REQUIRE(prev_gap <= 1e-6);
  }

  SECTION("dimension mismatch is rejected") {
    REQUIRE_THROWS_AS(itp.evaluate(Eigen::VectorXd::Ones(3)),
                      emi::DomainError);
  }
}

TEST_CASE("square-system interpolator reproduces its training targets") {
  const int n = 10;
  Eigen::MatrixXd features(n, 1);
  Eigen::VectorXd targets(n);
  for (int i = 0; i < n; ++i) {
    features(i, 0) = static_cast<double>(i) / (n - 1);
    targets(i) = 0.2 + std::sin(2.0 * features(i, 0));
  }
  const auto fit = bspline::fit_interpolator(features, targets, 3, 6,
                                             bspline::SplineMode::shared);
  REQUIRE(fit.residual_norm <= 1e-8);
  for (int i = 0; i < n; ++i) {
    REQUIRE_THAT(fit.interpolator.evaluate(features.row(i).transpose()),
                 WithinAbs(targets(i), 1e-8));
  }
}

TEST_CASE("per-dimension mode fits an additive surface more tightly") {
  emi::rng::SplitMix64 gen(55);
  const int n = 80;
  Eigen::MatrixXd features(n, 2);
  Eigen::VectorXd targets(n);
  for (int i = 0; i < n; ++i) {
    features(i, 0) = gen.uniform();
    features(i, 1) = gen.uniform();
    targets(i) = std::sin(4.0 * features(i, 0)) + std::exp(features(i, 1));
  }
  const auto shared = bspline::fit_interpolator(features, targets, 3, 3,
                                                bspline::SplineMode::shared);
  const auto per_dim = bspline::fit_interpolator(features, targets, 3, 3,
                                                 bspline::SplineMode::per_dim);
  REQUIRE(per_dim.interpolator.coefficients().size() ==
          2 * shared.interpolator.coefficients().size());
  REQUIRE(per_dim.residual_norm <= shared.residual_norm + 1e-12);
}
