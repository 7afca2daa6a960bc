#include <doctest.h>

#include <cmath>

#include "syndatum/synthesis.hpp"

using namespace syndatum;

TEST_CASE("feature generators") {
  Matrix one(1, 2);
  one << 0.3, -0.7;
  const Dataset d = make_dataset(one, Vector::Ones(1), TaskKind::Regression);
  const Matrix r = generate_features(FeatureGeneratorSpec::resample(), d, 5, {1, 0});
  CHECK(r.rows() == 5);
  for (Eigen::Index i = 0; i < 5; ++i) CHECK(r.row(i) == one.row(0));

  const Matrix u = generate_features(
      FeatureGeneratorSpec::from_density(DensityModel::uniform_box(BoxSupport::cube(2, -1, 1))), d, 10000, {1, 1});
  CHECK(u.cwiseAbs().maxCoeff() <= 1.0);
}

TEST_CASE("response generators") {
  Matrix f(2, 1);
  f << -0.5, 0.25;
  const FittedEstimator abs_est = oracle_estimator(truths::abs_value(), TaskKind::Regression);
  const Vector y = generate_regression_responses(abs_est, f, NoiseModel::none(), {1, 0});
  CHECK(y[0] == doctest::Approx(0.5));
  CHECK(y[1] == doctest::Approx(0.25));

  const Matrix big = Matrix::Zero(1000000, 1);
  const Vector noisy =
      generate_regression_responses(oracle_estimator(truths::zero(), TaskKind::Regression), big, NoiseModel::bounded_uniform(4), {2, 0});
  const double var = (noisy.array() - noisy.mean()).square().sum() / (noisy.size() - 1.0);
  CHECK(var >= 3.96);
  CHECK(var <= 4.04);

  const auto ones = generate_classification_responses(oracle_estimator(truths::constant(1.0), TaskKind::Classification), f, {3, 0});
  CHECK(ones.minCoeff() == 1.0);
  const auto minus = generate_classification_responses(oracle_estimator(truths::constant(0.0), TaskKind::Classification), f, {3, 0});
  CHECK(minus.maxCoeff() == -1.0);
  const auto half =
      generate_classification_responses(oracle_estimator(truths::constant(0.5), TaskKind::Classification), big, {3, 1});
  const double frac = (half.array() > 0).cast<double>().mean();
  CHECK(frac >= 0.498);
  CHECK(frac <= 0.502);
}

TEST_CASE("full synthesis with OLS follows the linear response formula") {
  const auto density = DensityModel::uniform_box(BoxSupport::cube(2, -1, 1));
  const Matrix x = density.sample(200, {4, 0});
  Vector y = x * (Vector(2) << 1.0, -1.0).finished();
  y += sample_noise(NoiseModel::gaussian(0.25), 200, {4, 1});
  const Dataset d = make_dataset(x, y, TaskKind::Regression);
  SynthesisConfig cfg{FeatureGeneratorSpec::from_density(density), EstimatorSpec::ols(), 300, NoiseModel::none()};
  const SynthesisResult s = synthesize(cfg, d, {4, 2});
  CHECK(s.synthetic.n() == 300);
  const Vector beta = s.estimator.fitted_params();
  // Normal-equation oracle.
  const Vector ne = (x.transpose() * x).ldlt().solve(x.transpose() * y);
  CHECK((beta - ne).cwiseAbs().maxCoeff() < 1e-9);
  CHECK((s.synthetic.responses() - s.synthetic.features() * beta).cwiseAbs().maxCoeff() < 1e-9);

  // Same seed, same output.
  const SynthesisResult again = synthesize(cfg, d, {4, 2});
  CHECK(again.synthetic.features() == s.synthetic.features());

  // Residual variance defaults the synthetic noise level.
  SynthesisConfig dflt{FeatureGeneratorSpec::from_density(density), EstimatorSpec::ols(), std::nullopt, std::nullopt};
  const SynthesisResult s2 = synthesize(dflt, d, {4, 3});
  CHECK(s2.noise.variance == doctest::Approx(residual_variance(s2.estimator, d)));
  CHECK(s2.synthetic.n() == 200);
}

TEST_CASE("logistic synthesis produces +-1 labels") {
  const auto density = DensityModel::uniform_box(BoxSupport::cube(2, -1, 1));
  const Matrix x = density.sample(400, {6, 0});
  Vector z(400);
  Rng rng({6, 1});
  for (Eigen::Index i = 0; i < 400; ++i) z[i] = rng.uniform() < 1.0 / (1.0 + std::exp(-x(i, 0))) ? 1.0 : -1.0;
  const Dataset d = make_dataset(x, z, TaskKind::Classification);
  const auto s = synthesize({FeatureGeneratorSpec::from_density(density), EstimatorSpec::logistic(), std::nullopt, std::nullopt}, d, {6, 2});
  CHECK(s.synthetic.task() == TaskKind::Classification);
  CHECK((s.synthetic.responses().array().abs() == 1.0).all());
}
