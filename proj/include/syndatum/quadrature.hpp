#pragma once

#include <functional>
#include <span>
#include <vector>

namespace syndatum::quad {

using Integrand = std::function<double(double)>;

/// Adaptive Gauss-Kronrod over [a, b], split at every breakpoint strictly inside.
double integrate(const Integrand& f, double a, double b, std::span<const double> breakpoints = {},
                 double rel_tol = 1e-13);

/// Points in (a, b) where `indicator` changes value, located by a uniform scan of
/// `cells` cells followed by bisection to `tol`.
std::vector<double> switch_points(const std::function<bool(double)>& indicator, double a, double b,
                                  int cells = 2048, double tol = 1e-14);

/// Sorted, de-duplicated `points` restricted to [a, b], with a and b added.
std::vector<double> partition(double a, double b, std::span<const double> points);

}  // namespace syndatum::quad
