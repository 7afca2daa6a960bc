#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <utility>
#include <vector>

#include "syndatum/densities.hpp"
#include "syndatum/error.hpp"
#include "syndatum/estimators.hpp"

using namespace syndatum;

namespace {
Vector pt(double v) { return Vector::Constant(1, v); }
}  // namespace

TEST_CASE("default hyperparameters") {
  CHECK(default_knn_k(1000, 2) == 32);
  CHECK(default_forest_trees(1600) == 60);
  CHECK(default_forest_depth(1600) == 7);
  CHECK(default_knn_k(3, 1) >= 1);
}

TEST_CASE("OLS recovers exact linear data") {
  Matrix x(3, 1);
  x << 1, 2, 3;
  const Dataset d = make_dataset(x, Vector::LinSpaced(3, 2, 6), TaskKind::Regression);
  const FittedEstimator est = fit_estimator(EstimatorSpec::ols(), d, {1, 0});
  CHECK(std::abs(est.fitted_params()[0] - 2.0) < 1e-10);
  CHECK(est.predict_mean(pt(4)) == doctest::Approx(8.0));

  Matrix collinear(3, 2);
  collinear << 1, 2, 2, 4, 3, 6;
  CHECK_THROWS_AS(fit_estimator(EstimatorSpec::ols(), make_dataset(collinear, Vector::Ones(3), TaskKind::Regression),
                                {1, 0}),
                  Error);
}

TEST_CASE("oracle and logistic predictions") {
  const FittedEstimator oracle = oracle_estimator(truths::abs_value(), TaskKind::Regression);
  CHECK(oracle.predict_mean(pt(-0.5)) == doctest::Approx(0.5));
  const FittedEstimator step = oracle_estimator(truths::positive_indicator(), TaskKind::Classification);
  CHECK(step.predict_prob(pt(0.3)) == doctest::Approx(1.0));

  // Balanced labels on symmetric points: the MLE is 0 and the probability 1/2.
  Matrix x(4, 1);
  x << -1, -1, 1, 1;
  Vector z(4);
  z << 1, -1, 1, -1;
  const FittedEstimator lg = fit_estimator(EstimatorSpec::logistic(), make_dataset(x, z, TaskKind::Classification), {1, 0});
  CHECK(std::abs(lg.fitted_params()[0]) < 1e-8);
  CHECK(lg.predict_prob(pt(2.0)) == doctest::Approx(0.5));

  const FittedEstimator fixed = oracle_estimator(truths::logistic(pt(std::log(3.0))), TaskKind::Classification);
  CHECK(fixed.predict_prob(pt(1.0)) == doctest::Approx(0.75));
}

TEST_CASE("logistic Newton never increases the objective") {
  const auto density = DensityModel::uniform_box(BoxSupport::cube(2, -1, 1));
  const Matrix x = density.sample(500, {5, 0});
  Rng rng({5, 1});
  Vector z(500);
  for (Eigen::Index i = 0; i < 500; ++i) z[i] = rng.uniform() < 1.0 / (1.0 + std::exp(-2.0 * x(i, 0))) ? 1.0 : -1.0;
  const LogisticFit fit = logistic_newton(x, z);
  CHECK(fit.converged);
  for (std::size_t i = 1; i < fit.objective_trace.size(); ++i) {
    CHECK(fit.objective_trace[i] <= fit.objective_trace[i - 1] + 1e-12);
  }
  // Separable data: unconstrained Newton diverges, a boxed fit clips to the box.
  Matrix xs(4, 1);
  xs << -2, -1, 1, 2;
  Vector zs(4);
  zs << -1, -1, 1, 1;
  const FittedEstimator boxed = fit_estimator(EstimatorSpec::logistic(4.0), make_dataset(xs, zs, TaskKind::Classification), {1, 0});
  CHECK(boxed.fitted_params()[0] == doctest::Approx(4.0));
}

TEST_CASE("logistic Newton converges when rounding limits the gradient") {
  // Small, wide samples often end with a gradient just above the tolerance.
  const auto density = DensityModel::uniform_box(BoxSupport::cube(4, -4, 4));
  int failures = 0;
  for (std::uint64_t s = 0; s < 300; ++s) {
    const Matrix x = density.sample(100, {s, 0});
    Rng rng({s, 1});
    Vector z(100);
    for (Eigen::Index i = 0; i < 100; ++i) {
      const double m = 0.5 * (x(i, 0) - x(i, 1)) + 0.25 * (x(i, 2) - x(i, 3));
      z[i] = rng.uniform() < 1.0 / (1.0 + std::exp(-m)) ? 1.0 : -1.0;
    }
    const LogisticFit fit = logistic_newton(x, z);
    if (!fit.converged && fit.coefficients.cwiseAbs().maxCoeff() < 1e3) ++failures;
  }
  CHECK(failures == 0);
}

TEST_CASE("k nearest neighbours") {
  Matrix x(4, 1);
  x << 0, 1, 2, 3;
  Vector y(4);
  y << 1, 5, 2, 8;
  const Dataset d = make_dataset(x, y, TaskKind::Regression);
  const FittedEstimator k1 = fit_estimator(EstimatorSpec::knn(1), d, {1, 0});
  CHECK(k1.predict_mean(pt(2)) == doctest::Approx(2.0));
  const FittedEstimator kn = fit_estimator(EstimatorSpec::knn(4), d, {1, 0});
  CHECK(kn.predict_mean(pt(-10)) == doctest::Approx(4.0));
}

TEST_CASE("one-dimensional neighbour search matches a brute-force scan") {
  // Values on a coarse grid so distances tie often.
  const Eigen::Index n = 200;
  Matrix x(n, 1);
  Vector y(n);
  for (Eigen::Index i = 0; i < n; ++i) {
    x(i, 0) = static_cast<double>((i * 37) % 23) / 4.0;
    y[i] = std::sin(static_cast<double>(i));
  }
  const Dataset d = make_dataset(x, y, TaskKind::Regression);
  for (int k : {1, 3, 10, 50}) {
    const FittedEstimator est = fit_estimator(EstimatorSpec::knn(k), d, {1, 0});
    for (double q = -1.0; q <= 7.0; q += 0.125) {
      std::vector<std::pair<double, Eigen::Index>> all;
      for (Eigen::Index i = 0; i < n; ++i) all.emplace_back((x(i, 0) - q) * (x(i, 0) - q), i);
      std::sort(all.begin(), all.end());
      double sum = 0.0;
      for (int j = 0; j < k; ++j) sum += y[all[static_cast<std::size_t>(j)].second];
      CHECK(est.predict_mean(pt(q)) == doctest::Approx(sum / k).epsilon(1e-12));
    }
  }
}

TEST_CASE("random forest and MLP fit a smooth function") {
  const auto density = DensityModel::uniform_box(BoxSupport::interval(-1, 1));
  const Matrix x = density.sample(2000, {9, 0});
  Vector y(2000);
  for (Eigen::Index i = 0; i < 2000; ++i) y[i] = x(i, 0) * x(i, 0);
  const Dataset d = make_dataset(x, y, TaskKind::Regression);
  const Matrix grid = Vector::LinSpaced(41, -0.9, 0.9);
  Vector truth = grid.col(0).array().square();

  const FittedEstimator rf = fit_estimator(EstimatorSpec::random_forest(), d, {9, 1});
  CHECK((rf.predict_batch(grid) - truth).cwiseAbs().maxCoeff() < 0.1);
  // Determinism.
  const FittedEstimator rf2 = fit_estimator(EstimatorSpec::random_forest(), d, {9, 1});
  CHECK(rf.predict_batch(grid) == rf2.predict_batch(grid));

  const FittedEstimator mlp = fit_estimator(EstimatorSpec::mlp_default(), d, {9, 2});
  CHECK((mlp.predict_batch(grid) - truth).cwiseAbs().maxCoeff() < 0.15);
}

TEST_CASE("estimator specs parse and validate") {
  CHECK(parse_estimator("knn k=5").k == 5);
  CHECK(parse_estimator("rf trees=3 depth=2").trees == 3);
  CHECK(parse_estimator("logistic B=4").box == 4.0);
  CHECK_THROWS_AS(parse_estimator("oracle"), Error);
  CHECK_THROWS_AS(parse_estimator("knn k=0"), Error);
  CHECK_THROWS_AS(parse_estimator("gbm"), Error);
}
