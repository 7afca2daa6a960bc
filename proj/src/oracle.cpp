#include "syndatum/oracle.hpp"

#include <cmath>

#include "syndatum/config.hpp"

namespace syndatum::truths {

Truth zero() {
  return {"zero", [](const Eigen::Ref<const Vector>&) { return 0.0; }, {}};
}

Truth constant(double c) {
  return {"const", [c](const Eigen::Ref<const Vector>&) { return c; }, {}};
}

Truth abs_value() {
  return {"abs", [](const Eigen::Ref<const Vector>& x) { return std::abs(x[0]); }, {0.0}};
}

Truth identity() {
  return {"identity", [](const Eigen::Ref<const Vector>& x) { return x[0]; }, {}};
}

Truth exp_difference() {
  return {"exp-diff", [](const Eigen::Ref<const Vector>& x) { return std::exp(x[0]) - std::exp(x[1]); }, {}};
}

Truth linear(Vector beta) {
  return {"linear", [beta = std::move(beta)](const Eigen::Ref<const Vector>& x) { return x.dot(beta); }, {}};
}

Truth reciprocal_cubic(Vector beta) {
  if (beta.size() != 4) throw Error(ErrorCode::DimensionMismatch, "reciprocal-cubic truth needs 4 coefficients");
  return {"recip-cubic",
          [beta = std::move(beta)](const Eigen::Ref<const Vector>& x) {
            const double v = x[0];
            return beta[0] / (v + 0.1) + beta[1] * v + beta[2] * v * v + beta[3] * v * v * v;
          },
          {}};
}

Truth logistic(Vector beta) {
  return {"logistic",
          [beta = std::move(beta)](const Eigen::Ref<const Vector>& x) { return 1.0 / (1.0 + std::exp(-x.dot(beta))); },
          {}};
}

Truth positive_indicator() {
  return {"step", [](const Eigen::Ref<const Vector>& x) { return x[0] > 0.0 ? 1.0 : 0.0; }, {0.0}};
}

}  // namespace syndatum::truths

namespace syndatum {

Truth parse_truth(const std::string& spec) {
  const auto item = parse_spec_item(spec);
  if (item.name == "abs") return truths::abs_value();
  if (item.name == "identity") return truths::identity();
  if (item.name == "exp-diff") return truths::exp_difference();
  if (item.name == "zero") return truths::zero();
  if (item.name == "step") return truths::positive_indicator();
  if (item.name == "const") return truths::constant(item.number("c"));
  if (item.name == "linear") return truths::linear(item.vector("beta"));
  if (item.name == "logistic") return truths::logistic(item.vector("beta"));
  if (item.name == "recip-cubic") {
    return truths::reciprocal_cubic(item.has("beta") ? item.vector("beta") : Vector{{1.0, -2.0, -2.0, 1.0}});
  }
  throw Error(ErrorCode::ConfigError, "unknown truth '" + item.name + "'");
}

}  // namespace syndatum
