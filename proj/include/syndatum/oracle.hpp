#pragma once

#include <functional>
#include <string>
#include <vector>

#include "syndatum/datamodel.hpp"

namespace syndatum {

using PointFunction = std::function<double(const Eigen::Ref<const Vector>&)>;

/// A known regression function mu(x) or class probability eta(x).
struct Truth {
  std::string name;
  PointFunction fn;
  /// One-dimensional kinks or jumps, used to split quadrature.
  std::vector<double> breakpoints;

  double operator()(const Eigen::Ref<const Vector>& x) const { return fn(x); }
};

namespace truths {
Truth zero();
Truth constant(double c);
Truth abs_value();                       // |x|
Truth identity();                        // x
Truth exp_difference();                  // exp(x1) - exp(x2)
Truth linear(Vector beta);               // x^T beta
Truth reciprocal_cubic(Vector beta);     // beta^T ((x+0.1)^-1, x, x^2, x^3)
Truth logistic(Vector beta);             // 1 / (1 + exp(-x^T beta))
Truth positive_indicator();              // 1 on (0, inf), 0 otherwise
}  // namespace truths

/// Parses "abs", "identity", "exp-diff", "zero", "const c=..", "linear beta=..",
/// "recip-cubic [beta=..]", "logistic beta=..", "step".
Truth parse_truth(const std::string& spec);

}  // namespace syndatum
