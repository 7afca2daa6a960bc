#pragma once

#include <Eigen/Dense>

#include <iosfwd>
#include <string>
#include <string_view>

#include "syndatum/error.hpp"
#include "syndatum/random.hpp"

namespace syndatum {

using Matrix = Eigen::MatrixXd;
using Vector = Eigen::VectorXd;

enum class TaskKind { Regression, Classification };

std::string_view to_string(TaskKind task) noexcept;
TaskKind parse_task(std::string_view text);

/// Features plus responses. Classification responses are -1/+1 labels.
/// Construct through make_dataset so the invariants hold.
class Dataset {
 public:
  Dataset() = default;

  const Matrix& features() const noexcept { return features_; }
  const Vector& responses() const noexcept { return responses_; }
  TaskKind task() const noexcept { return task_; }
  Eigen::Index n() const noexcept { return features_.rows(); }
  Eigen::Index p() const noexcept { return features_.cols(); }
  bool empty() const noexcept { return n() == 0; }

 private:
  friend Dataset make_dataset(Matrix features, Vector responses, TaskKind task);

  Matrix features_;
  Vector responses_;
  TaskKind task_ = TaskKind::Regression;
};

Dataset make_dataset(Matrix features, Vector responses, TaskKind task);

enum class NoiseDistribution { Gaussian, BoundedUniform };

struct NoiseModel {
  NoiseDistribution distribution = NoiseDistribution::Gaussian;
  double variance = 0.0;

  static NoiseModel gaussian(double variance) { return {NoiseDistribution::Gaussian, variance}; }
  static NoiseModel bounded_uniform(double variance) { return {NoiseDistribution::BoundedUniform, variance}; }
  static NoiseModel none() { return {NoiseDistribution::Gaussian, 0.0}; }

  /// Half-width of the BoundedUniform support, sqrt(3 * variance).
  double half_width() const;
};

Vector sample_noise(const NoiseModel& model, Eigen::Index n, const SeedSpec& seed);

/// CSV with header `x1,...,xp,y`; classification labels written as -1/+1 integers.
void write_csv(std::ostream& out, const Dataset& data);
void write_csv(const std::string& path, const Dataset& data);
Dataset read_csv(std::istream& in, TaskKind task);
Dataset read_csv(const std::string& path, TaskKind task);

}  // namespace syndatum
