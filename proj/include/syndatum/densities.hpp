#pragma once

#include <limits>
#include <string>
#include <variant>
#include <vector>

#include "syndatum/datamodel.hpp"

namespace syndatum {

/// Axis-aligned box; lower[i] < upper[i] for every coordinate.
struct BoxSupport {
  Vector lower;
  Vector upper;

  BoxSupport() = default;
  BoxSupport(Vector lo, Vector hi);
  static BoxSupport interval(double lo, double hi);
  static BoxSupport cube(Eigen::Index p, double lo, double hi);

  Eigen::Index dim() const noexcept { return lower.size(); }
  bool contains(const Eigen::Ref<const Vector>& x) const;
  /// All 2^p corners as rows.
  Matrix corners() const;
};

bool same_support(const BoxSupport& a, const BoxSupport& b);

namespace density {
struct UniformBox {
  BoxSupport support;
};
struct TruncatedNormalDiag {
  BoxSupport support;
  Vector mean;
  Vector variance;
};
/// Height heights[i] on [breakpoints[i], breakpoints[i+1]).
struct PiecewiseConstant1D {
  std::vector<double> breakpoints;
  std::vector<double> heights;
};
/// Density (slope * (x - 1) + 1) / 2 on [0, 2]; |slope| <= 1.
struct LinearTilt1D {
  double slope = 0.0;
};
/// 2x on [0, 1] when increasing, 2 - 2x otherwise.
struct Triangular1D {
  bool increasing = true;
};
}  // namespace density

/// A feature distribution with exact density, CDF (1-d), moments, and sampling.
class DensityModel {
 public:
  using Variant = std::variant<density::UniformBox, density::TruncatedNormalDiag, density::PiecewiseConstant1D,
                               density::LinearTilt1D, density::Triangular1D>;

  static DensityModel uniform_box(BoxSupport support);
  static DensityModel truncated_normal(BoxSupport support, Vector mean, Vector variance);
  static DensityModel piecewise_constant(std::vector<double> breakpoints, std::vector<double> heights);
  /// Height 1 - alpha on [-1, 0) and alpha on [0, 1].
  static DensityModel two_block(double alpha);
  static DensityModel linear_tilt(double slope);
  static DensityModel triangular(bool increasing);

  const Variant& variant() const noexcept { return variant_; }
  const BoxSupport& support() const noexcept { return support_; }
  Eigen::Index dim() const noexcept { return support_.dim(); }
  /// Independent coordinates (every implemented variant is a product density).
  bool is_product() const noexcept { return true; }
  DensityModel marginal(Eigen::Index i) const;

  double pdf(const Eigen::Ref<const Vector>& x) const;
  double pdf1(double x) const;
  double cdf1(double x) const;
  /// Points where the 1-d density has a kink or jump (support ends included).
  std::vector<double> breakpoints1() const;

  const Vector& mean() const noexcept { return mean_; }
  /// Diagonal of the covariance, Var(X_i).
  const Vector& variances() const noexcept { return variances_; }

  Matrix sample(Eigen::Index n, const SeedSpec& seed) const;

  std::string describe() const;

 private:
  explicit DensityModel(Variant v);
  void finalize();

  Variant variant_;
  BoxSupport support_;
  Vector mean_;
  Vector variances_;
};

double pdf(const DensityModel& density, const Eigen::Ref<const Vector>& x);
Matrix sample(const DensityModel& density, Eigen::Index n, const SeedSpec& seed);

/// chi^2(p || q); +infinity when the divergence is detected as infinite.
double chi_square_divergence(const DensityModel& p, const DensityModel& q);

/// max{ P_p(p/q >= C), P_q(q/p >= C) }.
double fidelity_tail_probability(const DensityModel& p, const DensityModel& q, double threshold);

struct FidelityGridPoint {
  double threshold;
  double tail;
  double bound;
};

struct FidelityCertificate {
  double d = 1.0;
  double V = 0.0;
  std::vector<FidelityGridPoint> grid;
  double worst_threshold = 0.0;
  double attained_sup = 0.0;

  /// Re-checks tail <= V * C^-d + 1e-9 at every grid point.
  bool verify() const;
};

/// 64 log-spaced thresholds on [1e-2, 1e4].
std::vector<double> default_fidelity_grid(std::size_t points = 64, double lo = 1e-2, double hi = 1e4);

FidelityCertificate certify_fidelity_level(const DensityModel& p, const DensityModel& q, double d,
                                           const std::vector<double>& grid);

/// True when every grid threshold C > 1 has a tail of exactly zero, the grid
/// form of a (1, infinity) fidelity level.
bool has_unit_infinite_fidelity(const DensityModel& p, const DensityModel& q, const std::vector<double>& grid);

struct FidelityLevel {
  double V;
  double d;
};

/// Fidelity level implied by finite chi^2 divergences in both directions.
FidelityLevel fidelity_from_chi2(double chi2_pq, double chi2_qp);

/// Upper bound on max of the two chi^2 divergences implied by a (V, d) level, d > 1, at threshold C >= 1.
double chi2_bound_from_fidelity(double V, double d, double threshold);

}  // namespace syndatum
