#pragma once

#include <array>
#include <functional>
#include <string>
#include <vector>

#include "syndatum/densities.hpp"
#include "syndatum/erm.hpp"
#include "syndatum/estimators.hpp"
#include "syndatum/oracle.hpp"

namespace syndatum {

enum class LossKind { Squared, ZeroOne };
enum class RiskMethod { MonteCarlo, Quadrature1D };

std::string_view to_string(LossKind loss) noexcept;
std::string_view to_string(RiskMethod method) noexcept;

inline LossKind loss_for(TaskKind task) noexcept {
  return task == TaskKind::Regression ? LossKind::Squared : LossKind::ZeroOne;
}

/// A data-generating distribution: features, mu or eta, and response noise variance.
struct Population {
  DensityModel density;
  Truth truth;
  double noise_variance = 0.0;
  TaskKind task = TaskKind::Regression;
};

struct RiskConfig {
  RiskMethod method = RiskMethod::MonteCarlo;
  Eigen::Index n_test = 50000;
  SeedSpec seed{};
};

/// Anything that produces a regression value or a classification score.
struct Scorer {
  std::string label;
  std::function<Vector(const Matrix&)> batch;
  std::vector<double> breakpoints;

  double operator()(double x) const;
};

Scorer scorer(const FittedModel& model);
/// mu_hat for regression; the plug-in score eta_hat - 1/2 for classification.
Scorer scorer(const FittedEstimator& est);
/// The truth itself: mu, or the Bayes score eta - 1/2.
Scorer bayes_scorer(const Truth& truth, TaskKind task);
Scorer function_scorer(std::string label, PointFunction fn, std::vector<double> breakpoints = {});

struct RiskEstimate {
  double value = 0.0;
  double std_error = 0.0;
  RiskMethod method = RiskMethod::MonteCarlo;
  LossKind loss = LossKind::Squared;
  Eigen::Index n_test = 0;
};

/// A test draw from a population, shared across models for common random numbers.
struct TestSample {
  Matrix x;
  Vector truth;
  double noise_variance = 0.0;
  TaskKind task = TaskKind::Regression;

  static TestSample draw(const Population& population, Eigen::Index n, const SeedSpec& seed);
};

/// Per-point conditional loss given x: (f - mu)^2 + sigma^2 for squared loss,
/// eta 1{g < 0} + (1 - eta) 1{g >= 0} for 0-1 loss. With `excess`, the Bayes
/// part is removed: (f - mu)^2 or 1{sign g != sign(eta - 1/2)} |2 eta - 1|.
Vector pointwise_loss(const Vector& score, const TestSample& sample, LossKind loss, bool excess);

RiskEstimate summarize_losses(const Vector& losses, LossKind loss);

RiskEstimate estimate_risk(const Scorer& model, const Population& population, LossKind loss, const RiskConfig& config);

/// Phi_s or Phi_{0-1}.
RiskEstimate excess_risk(const Scorer& model, const Population& population, LossKind loss, const RiskConfig& config);

struct UtilityReport {
  TaskKind task = TaskKind::Regression;
  RiskEstimate risk_synthetic;
  RiskEstimate risk_original;
  double utility = 0.0;
  /// Standard error of the paired risk difference.
  double combined_std_error = 0.0;
};

/// |R(synthetic-trained) - R(original-trained)| on one shared test draw.
UtilityReport utility_metric(const Scorer& synthetic_model, const Scorer& original_model, const Population& population,
                             const RiskConfig& config);
UtilityReport utility_metric(const FittedModel& synthetic_model, const FittedModel& original_model,
                             const Population& population, const RiskConfig& config);

struct ComparisonReport {
  /// R(f*_1), R(f*_2), R(f~*_1), R(f~*_2), all under the true distribution.
  std::array<RiskEstimate, 4> risks{};
  std::array<Vector, 4> coefficients{};
  double original_gap = 0.0;
  double synthetic_gap = 0.0;
  double original_std_error = 0.0;
  double synthetic_std_error = 0.0;
  /// Sign of R(class 1) - R(class 2); 0 inside the dead band.
  int original_sign = 0;
  int synthetic_sign = 0;
  bool consistent = false;
  bool indeterminate() const noexcept { return original_sign == 0 || synthetic_sign == 0; }
};

struct ComparisonSetup {
  Population real;
  /// Synthetic feature density and the function generating synthetic responses (mu_hat or eta_hat).
  DensityModel synthetic_density;
  PointFunction synthetic_truth;
  Eigen::Index optimum_samples = 100000;
};

/// Population optima of both classes under each distribution, risks under the real one.
/// A sign is declared only when |gap| exceeds 2 paired standard errors.
ComparisonReport evaluate_comparison(const BasisFunctionClass& class1, const BasisFunctionClass& class2,
                                     const ComparisonSetup& setup, const RiskConfig& config, const SeedSpec& seed);

/// As evaluate_comparison, but throws Indeterminate when either sign is 0.
ComparisonReport compare_models(const BasisFunctionClass& class1, const BasisFunctionClass& class2,
                                const ComparisonSetup& setup, const RiskConfig& config, const SeedSpec& seed);

}  // namespace syndatum
