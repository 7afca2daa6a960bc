#pragma once

#include <optional>
#include <variant>

#include "syndatum/densities.hpp"
#include "syndatum/estimators.hpp"

namespace syndatum {

struct ResampleWithReplacement {};

/// Where synthetic features come from: an explicit density, or the original rows.
struct FeatureGeneratorSpec {
  std::variant<DensityModel, ResampleWithReplacement> source;

  static FeatureGeneratorSpec from_density(DensityModel density) { return {std::move(density)}; }
  static FeatureGeneratorSpec resample() { return {ResampleWithReplacement{}}; }
  bool is_resample() const noexcept { return std::holds_alternative<ResampleWithReplacement>(source); }
};

struct SynthesisConfig {
  FeatureGeneratorSpec generator;
  EstimatorSpec estimator;
  /// Synthetic sample size; defaults to the original n.
  std::optional<Eigen::Index> synthetic_n;
  /// Synthetic noise for regression. When unset, bounded uniform with the
  /// residual variance of the fitted estimator on the original data.
  std::optional<NoiseModel> noise;
};

Matrix generate_features(const FeatureGeneratorSpec& spec, const Dataset& original, Eigen::Index n,
                         const SeedSpec& seed);

Vector generate_regression_responses(const FittedEstimator& est, const Matrix& features, const NoiseModel& noise,
                                     const SeedSpec& seed);

/// Labels +1 with probability eta_hat(x), -1 otherwise.
Vector generate_classification_responses(const FittedEstimator& est, const Matrix& features, const SeedSpec& seed);

/// Residual variance of `est` on regression data; 0 for classification.
double residual_variance(const FittedEstimator& est, const Dataset& data);

struct SynthesisResult {
  Dataset synthetic;
  FittedEstimator estimator;
  NoiseModel noise;
};

/// Full two-stage pipeline; also returns the fitted estimator and the noise used.
SynthesisResult synthesize(const SynthesisConfig& config, const Dataset& original, const SeedSpec& seed);

Dataset synthesize_dataset(const SynthesisConfig& config, const Dataset& original, const SeedSpec& seed);

}  // namespace syndatum
