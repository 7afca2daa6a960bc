#pragma once

#include <vector>

#include "syndatum/datamodel.hpp"

namespace syndatum {

struct MlpTraining {
  double learning_rate = 1e-3;
  int epochs = 500;
  /// 0 means full batch.
  int batch_size = 64;
  /// Epochs without improvement before the step size is halved.
  int patience = 20;
  /// Halvings allowed before training stops.
  int lr_reductions = 4;
  double min_improvement = 1e-6;
};

/// Fully-connected ReLU network with a scalar linear output, trained on squared loss.
class Mlp {
 public:
  struct Layer {
    Matrix weights;  // out x in
    Vector bias;     // out
  };

  /// `layers` weight layers: input -> hidden x (layers - 1) -> 1.
  Mlp(Eigen::Index inputs, int layers, int hidden);

  void initialize(const SeedSpec& seed);
  void set_zero();

  std::vector<Layer>& layers() noexcept { return layers_; }
  const std::vector<Layer>& layers() const noexcept { return layers_; }

  /// Outputs for the rows of `x`.
  Vector forward(const Matrix& x) const;

  /// Mean squared error over the rows and its gradient per layer.
  double loss_and_gradient(const Matrix& x, const Vector& y, std::vector<Layer>& grad) const;

  /// Adam on the mean squared error; keeps the weights with the lowest training loss and returns that loss.
  double train(const Matrix& x, const Vector& y, const MlpTraining& opts, const SeedSpec& seed);

 private:
  std::vector<Layer> layers_;
};

}  // namespace syndatum
