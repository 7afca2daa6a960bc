#include "syndatum/mlp.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

namespace syndatum {

Mlp::Mlp(Eigen::Index inputs, int layers, int hidden) {
  if (inputs < 1 || layers < 1 || hidden < 1) throw Error(ErrorCode::InvalidArgument, "MLP sizes must be positive");
  Eigen::Index in = inputs;
  for (int l = 0; l < layers; ++l) {
    const Eigen::Index out = (l + 1 == layers) ? 1 : hidden;
    layers_.push_back({Matrix::Zero(out, in), Vector::Zero(out)});
    in = out;
  }
}

void Mlp::initialize(const SeedSpec& seed) {
  Rng rng(seed);
  for (auto& layer : layers_) {
    // He initialization for ReLU layers.
    const double scale = std::sqrt(2.0 / static_cast<double>(layer.weights.cols()));
    for (Eigen::Index i = 0; i < layer.weights.size(); ++i) layer.weights.data()[i] = scale * rng.normal();
    layer.bias.setZero();
  }
}

void Mlp::set_zero() {
  for (auto& layer : layers_) {
    layer.weights.setZero();
    layer.bias.setZero();
  }
}

Vector Mlp::forward(const Matrix& x) const {
  Matrix h = x.transpose();
  for (std::size_t l = 0; l < layers_.size(); ++l) {
    Matrix z = layers_[l].weights * h;
    z.colwise() += layers_[l].bias;
    if (l + 1 < layers_.size()) z = z.cwiseMax(0.0);
    h = std::move(z);
  }
  return h.row(0).transpose();
}

double Mlp::loss_and_gradient(const Matrix& x, const Vector& y, std::vector<Layer>& grad) const {
  const auto n = static_cast<double>(x.rows());
  std::vector<Matrix> acts;
  acts.reserve(layers_.size() + 1);
  acts.push_back(x.transpose());
  for (std::size_t l = 0; l < layers_.size(); ++l) {
    Matrix z = layers_[l].weights * acts.back();
    z.colwise() += layers_[l].bias;
    if (l + 1 < layers_.size()) z = z.cwiseMax(0.0);
    acts.push_back(std::move(z));
  }
  const Vector residual = acts.back().row(0).transpose() - y;
  const double loss = residual.squaredNorm() / n;

  grad.resize(layers_.size());
  Matrix delta = (2.0 / n) * residual.transpose();  // 1 x batch
  for (std::size_t l = layers_.size(); l-- > 0;) {
    grad[l].weights = delta * acts[l].transpose();
    grad[l].bias = delta.rowwise().sum();
    if (l > 0) {
      Matrix back = layers_[l].weights.transpose() * delta;
      // ReLU derivative: active where the stored activation is positive.
      delta = back.cwiseProduct((acts[l].array() > 0.0).cast<double>().matrix());
    }
  }
  return loss;
}

double Mlp::train(const Matrix& x, const Vector& y, const MlpTraining& opts, const SeedSpec& seed) {
  const Eigen::Index n = x.rows();
  const Eigen::Index batch = (opts.batch_size <= 0 || opts.batch_size >= n) ? n : opts.batch_size;
  std::vector<Layer> m(layers_.size()), v(layers_.size()), grad;
  for (std::size_t l = 0; l < layers_.size(); ++l) {
    m[l] = {Matrix::Zero(layers_[l].weights.rows(), layers_[l].weights.cols()), Vector::Zero(layers_[l].bias.size())};
    v[l] = m[l];
  }
  constexpr double beta1 = 0.9, beta2 = 0.999, eps = 1e-8;
  long long step = 0;
  std::vector<Eigen::Index> order(static_cast<std::size_t>(n));
  std::iota(order.begin(), order.end(), Eigen::Index{0});
  Rng rng(seed.derive(0x5eed));

  double best = std::numeric_limits<double>::infinity();
  std::vector<Layer> best_layers = layers_;
  int since_best = 0;
  int reductions = 0;
  double lr = opts.learning_rate;
  Matrix xb;
  Vector yb;
  for (int epoch = 0; epoch < opts.epochs; ++epoch) {
    if (batch < n) {
      for (std::size_t i = order.size(); i > 1; --i) std::swap(order[i - 1], order[rng.below(i)]);
    }
    for (Eigen::Index start = 0; start < n; start += batch) {
      const Eigen::Index len = std::min(batch, n - start);
      if (batch < n) {
        xb.resize(len, x.cols());
        yb.resize(len);
        for (Eigen::Index r = 0; r < len; ++r) {
          xb.row(r) = x.row(order[static_cast<std::size_t>(start + r)]);
          yb[r] = y[order[static_cast<std::size_t>(start + r)]];
        }
        loss_and_gradient(xb, yb, grad);
      } else {
        loss_and_gradient(x, y, grad);
      }
      ++step;
      const double c1 = 1.0 - std::pow(beta1, static_cast<double>(step));
      const double c2 = 1.0 - std::pow(beta2, static_cast<double>(step));
      for (std::size_t l = 0; l < layers_.size(); ++l) {
        m[l].weights = beta1 * m[l].weights + (1.0 - beta1) * grad[l].weights;
        m[l].bias = beta1 * m[l].bias + (1.0 - beta1) * grad[l].bias;
        v[l].weights = beta2 * v[l].weights + (1.0 - beta2) * grad[l].weights.cwiseAbs2();
        v[l].bias = beta2 * v[l].bias + (1.0 - beta2) * grad[l].bias.cwiseAbs2();
        layers_[l].weights.array() -=
            lr * (m[l].weights.array() / c1) / ((v[l].weights.array() / c2).sqrt() + eps);
        layers_[l].bias.array() -= lr * (m[l].bias.array() / c1) / ((v[l].bias.array() / c2).sqrt() + eps);
      }
    }
    const double current = (forward(x) - y).squaredNorm() / static_cast<double>(n);
    if (current < best - opts.min_improvement) {
      best = current;
      best_layers = layers_;
      since_best = 0;
    } else if (++since_best >= opts.patience) {
      // Plateau: continue from the best weights with a smaller step.
      if (++reductions > opts.lr_reductions) break;
      lr *= 0.5;
      layers_ = best_layers;
      since_best = 0;
    }
  }
  layers_ = best_layers;
  return best;
}

}  // namespace syndatum
