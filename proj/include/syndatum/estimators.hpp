#pragma once

#include <limits>
#include <memory>
#include <optional>
#include <string>

#include "syndatum/datamodel.hpp"
#include "syndatum/mlp.hpp"
#include "syndatum/oracle.hpp"

namespace syndatum {

enum class EstimatorKind { Oracle, OLS, LogisticMLE, KNN, RandomForest, MLP };

std::string_view to_string(EstimatorKind kind) noexcept;

/// Which model generates synthetic responses, plus its optional overrides.
struct EstimatorSpec {
  EstimatorKind kind = EstimatorKind::Oracle;
  std::optional<Truth> truth;
  double box = std::numeric_limits<double>::infinity();
  std::optional<int> k;
  std::optional<int> trees;
  std::optional<int> depth;
  int layers = 4;
  int hidden = 10;
  MlpTraining mlp;

  static EstimatorSpec oracle(Truth truth);
  static EstimatorSpec ols();
  static EstimatorSpec logistic(double box = std::numeric_limits<double>::infinity());
  static EstimatorSpec knn(std::optional<int> k = std::nullopt);
  static EstimatorSpec random_forest(std::optional<int> trees = std::nullopt, std::optional<int> depth = std::nullopt);
  static EstimatorSpec mlp_default();

  std::string name() const;
  void validate() const;
};

/// "oracle" | "ols" | "logistic [B=..]" | "knn [k=..]" | "rf [trees=..] [depth=..]" | "mlp [epochs=..] [batch=..] [lr=..]".
/// The oracle needs the scenario truth, passed separately.
EstimatorSpec parse_estimator(const std::string& text, const std::optional<Truth>& truth = std::nullopt);

int default_knn_k(Eigen::Index n, Eigen::Index p);
int default_forest_trees(Eigen::Index n);
int default_forest_depth(Eigen::Index n);

namespace detail {
class Predictor {
 public:
  virtual ~Predictor() = default;
  virtual double predict(const Eigen::Ref<const Vector>& x) const = 0;
  virtual Vector predict_batch(const Matrix& x) const;
};
}  // namespace detail

/// An estimate of mu (regression) or eta (classification) fitted on original data.
class FittedEstimator {
 public:
  FittedEstimator(EstimatorKind kind, TaskKind task, std::shared_ptr<const detail::Predictor> impl,
                  Eigen::Index training_n, Vector params = {}, std::string label = {});

  EstimatorKind kind() const noexcept { return kind_; }
  TaskKind task() const noexcept { return task_; }
  Eigen::Index training_n() const noexcept { return training_n_; }
  const Vector& fitted_params() const noexcept { return params_; }
  const std::string& label() const noexcept { return label_; }

  double predict_mean(const Eigen::Ref<const Vector>& x) const;
  double predict_prob(const Eigen::Ref<const Vector>& x) const;
  /// predict_mean or predict_prob (per task) over the rows of x.
  Vector predict_batch(const Matrix& x) const;
  /// Task-appropriate prediction as a plain point function.
  PointFunction as_function() const;

 private:
  EstimatorKind kind_;
  TaskKind task_;
  std::shared_ptr<const detail::Predictor> impl_;
  Eigen::Index training_n_;
  Vector params_;
  std::string label_;
};

FittedEstimator fit_estimator(const EstimatorSpec& spec, const Dataset& data, const SeedSpec& seed);
double predict_mean(const FittedEstimator& est, const Eigen::Ref<const Vector>& x);
double predict_prob(const FittedEstimator& est, const Eigen::Ref<const Vector>& x);

/// Wraps an oracle function as a fitted estimator for `task`.
FittedEstimator oracle_estimator(const Truth& truth, TaskKind task);

struct LogisticFit {
  Vector coefficients;
  int iterations = 0;
  bool converged = false;
  std::vector<double> objective_trace;
};

/// Damped Newton for the mean logistic loss (1/n) sum log(1 + exp(-z x^T b)),
/// with step halving so the objective never increases. No clipping.
LogisticFit logistic_newton(const Matrix& x, const Vector& z, int max_iterations = 100, double grad_tol = 1e-9);

/// Mean logistic loss; numerically stable for large margins.
double logistic_objective(const Matrix& x, const Vector& z, const Vector& beta);

}  // namespace syndatum
