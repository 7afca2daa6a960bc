#include "syndatum/quadrature.hpp"

#include <algorithm>
#include <cmath>

#include <boost/math/quadrature/gauss_kronrod.hpp>

namespace syndatum::quad {

std::vector<double> partition(double a, double b, std::span<const double> points) {
  std::vector<double> cuts{a};
  for (double x : points) {
    if (x > a && x < b) cuts.push_back(x);
  }
  cuts.push_back(b);
  std::sort(cuts.begin(), cuts.end());
  cuts.erase(std::unique(cuts.begin(), cuts.end()), cuts.end());
  return cuts;
}

double integrate(const Integrand& f, double a, double b, std::span<const double> breakpoints, double rel_tol) {
  if (!(b > a)) return 0.0;
  const auto cuts = partition(a, b, breakpoints);
  double total = 0.0;
  for (std::size_t i = 0; i + 1 < cuts.size(); ++i) {
    if (cuts[i + 1] <= cuts[i]) continue;
    // Integrate on [0,1]: boost's adaptive error test misbehaves on very narrow intervals.
    const double lo = cuts[i];
    const double width = cuts[i + 1] - lo;
    const auto g = [&](double t) { return f(lo + width * t); };
    double err = 0.0;
    total += width * boost::math::quadrature::gauss_kronrod<double, 31>::integrate(g, 0.0, 1.0, 15, rel_tol, &err);
  }
  return total;
}

std::vector<double> switch_points(const std::function<bool(double)>& indicator, double a, double b, int cells,
                                  double tol) {
  std::vector<double> out;
  if (!(b > a) || cells < 1) return out;
  const double step = (b - a) / cells;
  double left = a;
  bool left_val = indicator(left);
  for (int i = 1; i <= cells; ++i) {
    const double right = (i == cells) ? b : a + i * step;
    const bool right_val = indicator(right);
    if (right_val != left_val) {
      double lo = left;
      double hi = right;
      while (hi - lo > tol * std::max(1.0, std::abs(lo))) {
        const double mid = 0.5 * (lo + hi);
        if (mid <= lo || mid >= hi) break;
        if (indicator(mid) == left_val) {
          lo = mid;
        } else {
          hi = mid;
        }
      }
      out.push_back(0.5 * (lo + hi));
    }
    left = right;
    left_val = right_val;
  }
  return out;
}

}  // namespace syndatum::quad
