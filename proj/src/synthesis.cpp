#include "syndatum/synthesis.hpp"

namespace syndatum {

namespace {
// Stream tags inside one synthesis seed.
constexpr std::uint64_t kFitTag = 1;
constexpr std::uint64_t kFeatureTag = 2;
constexpr std::uint64_t kResponseTag = 3;
}  // namespace

Matrix generate_features(const FeatureGeneratorSpec& spec, const Dataset& original, Eigen::Index n,
                         const SeedSpec& seed) {
  if (n < 1) throw Error(ErrorCode::InvalidArgument, "synthetic sample size must be >= 1");
  if (const auto* density = std::get_if<DensityModel>(&spec.source)) return density->sample(n, seed);
  if (original.empty()) throw Error(ErrorCode::EmptyOriginal, "cannot resample from an empty dataset");
  Rng rng(seed);
  Matrix out(n, original.p());
  for (Eigen::Index i = 0; i < n; ++i) {
    out.row(i) = original.features().row(static_cast<Eigen::Index>(rng.below(static_cast<std::uint64_t>(original.n()))));
  }
  return out;
}

Vector generate_regression_responses(const FittedEstimator& est, const Matrix& features, const NoiseModel& noise,
                                     const SeedSpec& seed) {
  if (est.task() != TaskKind::Regression) {
    throw Error(ErrorCode::TaskMismatch, "regression responses need a regression estimator");
  }
  return est.predict_batch(features) + sample_noise(noise, features.rows(), seed);
}

Vector generate_classification_responses(const FittedEstimator& est, const Matrix& features, const SeedSpec& seed) {
  if (est.task() != TaskKind::Classification) {
    throw Error(ErrorCode::TaskMismatch, "classification responses need a classification estimator");
  }
  const Vector prob = est.predict_batch(features);
  Rng rng(seed);
  Vector z(features.rows());
  for (Eigen::Index i = 0; i < z.size(); ++i) z[i] = rng.uniform() < prob[i] ? 1.0 : -1.0;
  return z;
}

double residual_variance(const FittedEstimator& est, const Dataset& data) {
  if (data.task() != TaskKind::Regression || data.n() < 2) return 0.0;
  const Vector r = data.responses() - est.predict_batch(data.features());
  const double mean = r.mean();
  return (r.array() - mean).square().sum() / static_cast<double>(r.size() - 1);
}

SynthesisResult synthesize(const SynthesisConfig& config, const Dataset& original, const SeedSpec& seed) {
  if (original.empty()) throw Error(ErrorCode::EmptyOriginal, "original dataset is empty");
  FittedEstimator est = fit_estimator(config.estimator, original, seed.derive(kFitTag));
  const Eigen::Index n = config.synthetic_n.value_or(original.n());
  Matrix x = generate_features(config.generator, original, n, seed.derive(kFeatureTag));
  NoiseModel noise = NoiseModel::none();
  Vector y;
  if (original.task() == TaskKind::Regression) {
    noise = config.noise.value_or(NoiseModel::bounded_uniform(residual_variance(est, original)));
    y = generate_regression_responses(est, x, noise, seed.derive(kResponseTag));
  } else {
    y = generate_classification_responses(est, x, seed.derive(kResponseTag));
  }
  return {make_dataset(std::move(x), std::move(y), original.task()), std::move(est), noise};
}

Dataset synthesize_dataset(const SynthesisConfig& config, const Dataset& original, const SeedSpec& seed) {
  return synthesize(config, original, seed).synthetic;
}

}  // namespace syndatum
