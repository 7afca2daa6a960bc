#pragma once

#include <optional>

#include "syndatum/metrics.hpp"

namespace syndatum {

/// The real population and the synthetic one (synthetic density with mu_hat or
/// eta_hat as its truth and the synthetic noise variance).
struct BoundScenario {
  Population real;
  Population synthetic;
};

struct RegressionFits {
  Scorer f_hat;         // trained on original data
  Scorer f_tilde;       // trained on synthetic data
  Scorer f_tilde_star;  // population optimum under the synthetic distribution
  Scorer f_star;        // population optimum under the real distribution
};

struct ClassificationFits {
  Scorer g_hat;
  Scorer g_tilde;
  Scorer g_tilde_star;
  Scorer g_star;
};

struct RegressionBoundReport {
  double est_err_original = 0.0;
  double est_err_synthetic = 0.0;
  double chi2 = 0.0;
  double M = 0.0;
  double upsilon1 = 0.0;
  double upsilon2 = 0.0;
  double phi_mu_hat = 0.0;
  double total = 0.0;
  /// Set when chi2 is infinite and upsilon1 > 0; total is then +inf.
  bool infinite = false;
};

struct ClassificationBoundReport {
  double est_err_original = 0.0;
  double est_err_synthetic = 0.0;
  double chi2 = 0.0;
  double upsilon3 = 0.0;
  double eta_l2_gap = 0.0;
  double c_terms = 0.0;
  double phi_plugin = 0.0;
  double total = 0.0;
  bool infinite = false;
};

struct LRBoundReport {
  double t1 = 0.0;
  double t2 = 0.0;
  double t3 = 0.0;
  double chi2_term = 0.0;
  double cross_term = 0.0;
  double M_LR = 0.0;
  double total = 0.0;
};

struct AssumptionCheck {
  double d = 1.0;
  double V = 0.0;
  double U = 0.0;
  double C_dVU = 0.0;
  double K_dV = 0.0;
  double lhs_reg = 0.0;
  double rhs_reg = 0.0;
  double lhs_cls = 0.0;
  double rhs_cls = 0.0;
  bool holds_reg = false;
  bool holds_cls = false;
};

/// chi2 defaults to chi_square_divergence(real.density, synthetic.density).
RegressionBoundReport regression_bound(const BoundScenario& scenario, const RegressionFits& fits,
                                       const RiskConfig& config, std::optional<double> chi2 = std::nullopt);

ClassificationBoundReport classification_bound(const BoundScenario& scenario, const ClassificationFits& fits,
                                               const RiskConfig& config, std::optional<double> chi2 = std::nullopt);

/// Explicit linear-regression bound from the realized design matrices and noise.
/// `lambda`, `lambda_tilde` are the diagonals of Lambda and Lambda~. `test_x`
/// adds sample points to the support corners when estimating M_LR.
LRBoundReport lr_explicit_bound(const Matrix& x, const Matrix& x_tilde, const Vector& eps, const Vector& eps_tilde,
                                const Vector& lambda, const Vector& lambda_tilde, double chi2, const Vector& y,
                                const Vector& y_tilde, const BoxSupport& support, const Matrix& test_x = Matrix());

AssumptionCheck assumption4_check(double d, double V, double U, double phi_F1, double phi_F2, double phi_G1,
                                  double phi_G2);

/// sup over the class of ||f - mu_hat||_{L2(P_X)}. Exact at the box corners for
/// boxed basis classes (the squared distance is a convex quadratic in beta);
/// +inf for unboxed ones.
double class_sup_distance(const BasisFunctionClass& cls, const DensityModel& density, const PointFunction& mu_hat,
                          Eigen::Index m, const SeedSpec& seed);

}  // namespace syndatum
