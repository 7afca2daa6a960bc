#pragma once

#include <functional>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "syndatum/densities.hpp"
#include "syndatum/oracle.hpp"

namespace syndatum {

/// Rows of x mapped to rows of basis values (n x q).
using BasisMap = std::function<Matrix(const Matrix&)>;

struct CoefficientBox {
  Vector lower;
  Vector upper;

  bool contains(const Vector& beta) const;
  Vector project(const Vector& beta) const;
  Matrix corners() const;
};

enum class ClassKind {
  /// f(x) = phi(x)^T beta; squared loss for regression, logistic surrogate for classification.
  Basis,
  /// sign(beta * phi(x)) with beta picked from a finite candidate list by 0-1 risk.
  SignChoice,
  /// sign(phi(x) - beta), beta in the box, fitted on 0-1 risk by grid + golden section.
  Threshold,
};

/// A downstream model specification F (regression) or G (classification).
class BasisFunctionClass {
 public:
  BasisFunctionClass(std::string name, ClassKind kind, Eigen::Index q, BasisMap map,
                     std::optional<CoefficientBox> box = std::nullopt, double ridge = 0.0,
                     std::vector<double> breakpoints = {});

  const std::string& name() const noexcept { return name_; }
  ClassKind kind() const noexcept { return kind_; }
  Eigen::Index q() const noexcept { return q_; }
  const std::optional<CoefficientBox>& box() const noexcept { return box_; }
  double ridge() const noexcept { return ridge_; }
  /// Where the basis has kinks (1-d), used to split quadrature.
  const std::vector<double>& breakpoints() const noexcept { return breakpoints_; }
  /// SignChoice candidates; defaults to {-1, +1}.
  const std::vector<double>& candidates() const noexcept { return candidates_; }

  Matrix design(const Matrix& x) const { return map_(x); }
  /// Model output (value or classification score) for each row of x.
  Vector evaluate(const Vector& coefficients, const Matrix& x) const;

 private:
  std::string name_;
  ClassKind kind_;
  Eigen::Index q_;
  BasisMap map_;
  std::optional<CoefficientBox> box_;
  double ridge_;
  std::vector<double> breakpoints_;
  std::vector<double> candidates_{-1.0, 1.0};
};

/// Builds a named class for p-dimensional features. Recognized names:
/// linear, quadratic, exp2, abs, constant, recip-cubic-0..3, logistic-linear,
/// threshold-abs, sign-abs, sign-linear. Options: box=lo,hi ; B=b (box [-b,b]) ; ridge=l.
BasisFunctionClass make_class(const std::string& spec, Eigen::Index p);

/// A fitted member of a class.
class FittedModel {
 public:
  FittedModel(std::shared_ptr<const BasisFunctionClass> cls, Vector coefficients, TaskKind task);

  const BasisFunctionClass& model_class() const noexcept { return *cls_; }
  const Vector& coefficients() const noexcept { return coefficients_; }
  TaskKind task() const noexcept { return task_; }

  double predict(const Eigen::Ref<const Vector>& x) const;
  Vector predict_batch(const Matrix& x) const { return cls_->evaluate(coefficients_, x); }
  /// Kinks/jumps of the model output in 1-d (class breakpoints plus thresholds).
  std::vector<double> breakpoints() const;

 private:
  std::shared_ptr<const BasisFunctionClass> cls_;
  Vector coefficients_;
  TaskKind task_;
};

/// sign with sign(0) = +1.
inline double sign_of(double v) noexcept { return v >= 0.0 ? 1.0 : -1.0; }

FittedModel fit_regression(const BasisFunctionClass& cls, const Dataset& data);
FittedModel fit_classification(const BasisFunctionClass& cls, const Dataset& data);

/// Weighted forms used by population optima: regression against targets t,
/// classification against soft labels t = P(Z = 1 | x) in [0, 1].
FittedModel fit_regression_targets(const BasisFunctionClass& cls, const Matrix& x, const Vector& t);
FittedModel fit_classification_soft(const BasisFunctionClass& cls, const Matrix& x, const Vector& t);

/// Approximate f*_F (or g*_G) by ERM on m draws from `density`. Responses are
/// replaced by their conditional expectation given x, which leaves the population
/// objective unchanged and removes response noise from the approximation.
FittedModel population_optimum(const BasisFunctionClass& cls, const DensityModel& density, const PointFunction& truth,
                               TaskKind task, Eigen::Index m, const SeedSpec& seed);

/// Mean squared error of phi^T beta against t, plus ridge * |beta|^2.
double regression_objective(const Matrix& design, const Vector& t, const Vector& beta, double ridge);
/// Mean soft-label logistic loss plus ridge * |beta|^2.
double logistic_soft_objective(const Matrix& design, const Vector& t, const Vector& beta, double ridge);

}  // namespace syndatum
