#include "syndatum/bounds.hpp"

#include <cmath>
#include <limits>

#include "syndatum/quadrature.hpp"

namespace syndatum {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

double safe_sqrt(double v) { return std::sqrt(std::max(v, 0.0)); }

// Evaluation points for sup-norm estimates: a test draw under each population,
// the support corners, and (in 1-d) a dense grid with breakpoints.
Matrix sup_points(const BoundScenario& scenario, const RiskConfig& config) {
  const BoxSupport& box = scenario.real.density.support();
  Matrix corners = box.corners();
  if (config.method == RiskMethod::Quadrature1D) {
    constexpr int kGrid = 4001;
    Matrix grid(kGrid, 1);
    const double a = box.lower[0], b = box.upper[0];
    for (int i = 0; i < kGrid; ++i) grid(i, 0) = a + (b - a) * i / (kGrid - 1);
    Matrix out(grid.rows() + corners.rows(), 1);
    out << grid, corners;
    return out;
  }
  const Matrix xr = scenario.real.density.sample(config.n_test, config.seed.derive(11));
  const Matrix xs = scenario.synthetic.density.sample(config.n_test, config.seed.derive(12));
  Matrix out(xr.rows() + xs.rows() + corners.rows(), box.dim());
  out << xr, xs, corners;
  return out;
}

double resolve_chi2(const BoundScenario& scenario, std::optional<double> chi2) {
  return chi2 ? *chi2 : chi_square_divergence(scenario.real.density, scenario.synthetic.density);
}

RiskConfig with_seed(const RiskConfig& config, std::uint64_t tag) {
  RiskConfig c = config;
  c.seed = config.seed.derive(tag);
  return c;
}

// Excess risks of several scorers against one population, on one shared draw.
std::vector<double> shared_excess(const std::vector<const Scorer*>& models, const Population& population,
                                  LossKind loss, const RiskConfig& config) {
  std::vector<double> out;
  if (config.method == RiskMethod::Quadrature1D) {
    for (const Scorer* m : models) out.push_back(std::max(0.0, excess_risk(*m, population, loss, config).value));
    return out;
  }
  const TestSample sample = TestSample::draw(population, config.n_test, config.seed);
  for (const Scorer* m : models) out.push_back(pointwise_loss(m->batch(sample.x), sample, loss, true).mean());
  return out;
}

// E[fn(X)] for 1-d X; `jumps` marks where fn may be discontinuous.
double expectation_1d(const DensityModel& density, const std::function<double(double)>& fn,
                      const std::function<bool(double)>& jumps) {
  const double a = density.support().lower[0], b = density.support().upper[0];
  std::vector<double> points = density.breakpoints1();
  if (jumps) {
    const auto s = quad::switch_points(jumps, a, b);
    points.insert(points.end(), s.begin(), s.end());
  }
  const auto cuts = quad::partition(a, b, points);
  return quad::integrate([&](double x) { return density.pdf1(x) * fn(x); }, a, b, cuts, 1e-12);
}

}  // namespace

RegressionBoundReport regression_bound(const BoundScenario& scenario, const RegressionFits& fits,
                                       const RiskConfig& config, std::optional<double> chi2) {
  RegressionBoundReport r;
  r.chi2 = resolve_chi2(scenario, chi2);
  const Scorer mu_hat = bayes_scorer(scenario.synthetic.truth, TaskKind::Regression);

  // Under P_X with mu: f_hat, f_star, f_tilde, f_tilde_star, mu_hat.
  const auto real = shared_excess({&fits.f_hat, &fits.f_star, &fits.f_tilde, &fits.f_tilde_star, &mu_hat}, scenario.real,
                                  LossKind::Squared, with_seed(config, 1));
  // Under P_X~ with mu_hat: f_tilde, f_tilde_star, f_star.
  const auto syn = shared_excess({&fits.f_tilde, &fits.f_tilde_star, &fits.f_star}, scenario.synthetic,
                                 LossKind::Squared, with_seed(config, 2));

  r.est_err_original = std::abs(real[0] - real[1]);
  r.est_err_synthetic = std::abs(syn[0] - syn[1]);
  r.upsilon1 = safe_sqrt(syn[0]) + 2.0 * safe_sqrt(syn[1]) + safe_sqrt(syn[2]);
  r.upsilon2 = safe_sqrt(real[2]) + 2.0 * safe_sqrt(real[3]) + safe_sqrt(real[1]);
  r.phi_mu_hat = real[4];

  const Matrix pts = sup_points(scenario, config);
  for (const Scorer* s : {&mu_hat, &fits.f_tilde, &fits.f_tilde_star, &fits.f_star}) {
    r.M = std::max(r.M, s->batch(pts).cwiseAbs().maxCoeff());
  }

  double chi_term = 0.0;
  if (std::isinf(r.chi2)) {
    if (r.upsilon1 > 1e-12) r.infinite = true;
  } else {
    chi_term = 2.0 * r.M * r.upsilon1 * safe_sqrt(r.chi2);
  }
  r.total = r.infinite ? kInf
                       : r.est_err_original + r.est_err_synthetic + chi_term +
                             2.0 * r.upsilon2 * safe_sqrt(r.phi_mu_hat) + 4.0 * r.phi_mu_hat;
  return r;
}

ClassificationBoundReport classification_bound(const BoundScenario& scenario, const ClassificationFits& fits,
                                               const RiskConfig& config, std::optional<double> chi2) {
  ClassificationBoundReport r;
  r.chi2 = resolve_chi2(scenario, chi2);
  const Scorer plugin = bayes_scorer(scenario.synthetic.truth, TaskKind::Classification);

  const auto real = shared_excess({&fits.g_hat, &fits.g_star, &plugin}, scenario.real, LossKind::ZeroOne,
                                  with_seed(config, 1));
  const auto syn = shared_excess({&fits.g_tilde, &fits.g_tilde_star, &fits.g_star}, scenario.synthetic,
                                 LossKind::ZeroOne, with_seed(config, 2));
  r.est_err_original = std::abs(real[0] - real[1]);
  r.est_err_synthetic = std::abs(syn[0] - syn[1]);
  r.upsilon3 = safe_sqrt(syn[2]) + 2.0 * safe_sqrt(syn[1]) + safe_sqrt(syn[0]);
  r.phi_plugin = real[2];

  // ||eta_hat - eta||_{L2(P_X)} and the disagreement probabilities C(g).
  const Population& pop = scenario.real;
  std::array<double, 3> disagree{};
  const std::array<const Scorer*, 3> gs{&fits.g_star, &fits.g_tilde_star, &fits.g_tilde};
  if (config.method == RiskMethod::Quadrature1D) {
    const Scorer eta_hat_scorer = bayes_scorer(scenario.synthetic.truth, TaskKind::Regression);
    const Scorer eta_scorer = bayes_scorer(pop.truth, TaskKind::Regression);
    r.eta_l2_gap = safe_sqrt(expectation_1d(pop.density, [&](double x) {
      const double d = eta_hat_scorer(x) - eta_scorer(x);
      return d * d;
    }, [&](double x) { return eta_scorer(x) >= 0.5; }));
    for (std::size_t k = 0; k < 3; ++k) {
      const Scorer& g = *gs[k];
      const auto flag = [&](double x) { return g(x) * (eta_hat_scorer(x) - 0.5) < 0.0; };
      disagree[k] = expectation_1d(pop.density, [&](double x) { return flag(x) ? 1.0 : 0.0; }, flag);
    }
  } else {
    const RiskConfig c = with_seed(config, 3);
    const TestSample sample = TestSample::draw(pop, c.n_test, c.seed);
    const Vector eh = plugin.batch(sample.x);  // eta_hat - 1/2
    r.eta_l2_gap = std::sqrt(((eh.array() + 0.5) - sample.truth.array()).square().mean());
    for (std::size_t k = 0; k < 3; ++k) {
      const Vector g = gs[k]->batch(sample.x);
      disagree[k] = ((g.array() * eh.array()) < 0.0).cast<double>().mean();
    }
  }
  r.c_terms = safe_sqrt(disagree[0]) + 2.0 * safe_sqrt(disagree[1]) + safe_sqrt(disagree[2]);

  double chi_term = 0.0;
  if (std::isinf(r.chi2)) {
    if (r.upsilon3 > 1e-12) r.infinite = true;
  } else {
    chi_term = r.upsilon3 * safe_sqrt(r.chi2);
  }
  r.total = r.infinite ? kInf
                       : r.est_err_original + r.est_err_synthetic + chi_term + 2.0 * r.eta_l2_gap * r.c_terms +
                             4.0 * r.phi_plugin;
  return r;
}

LRBoundReport lr_explicit_bound(const Matrix& x, const Matrix& x_tilde, const Vector& eps, const Vector& eps_tilde,
                                const Vector& lambda, const Vector& lambda_tilde, double chi2, const Vector& y,
                                const Vector& y_tilde, const BoxSupport& support, const Matrix& test_x) {
  const Eigen::Index p = x.cols();
  if (x_tilde.cols() != p || lambda.size() != p || lambda_tilde.size() != p || eps.size() != x.rows() ||
      eps_tilde.size() != x_tilde.rows() || y.size() != x.rows() || y_tilde.size() != x_tilde.rows()) {
    throw Error(ErrorCode::DimensionMismatch, "inconsistent shapes in lr_explicit_bound");
  }
  // Q^T v = (X^T X)^{-1} X^T v, computed as a least-squares solve.
  const auto q_transpose = [](const Matrix& design, const char* which) {
    auto qr = std::make_shared<Eigen::ColPivHouseholderQR<Matrix>>(design);
    if (design.rows() < design.cols() || qr->rank() < design.cols()) {
      throw Error(ErrorCode::SingularDesign, std::string(which) + " is singular");
    }
    return [qr](const Vector& v) { return Vector(qr->solve(v)); };
  };
  const auto qt = q_transpose(x, "X^T X");
  const auto qt_tilde = q_transpose(x_tilde, "X~^T X~");
  const Vector a = qt(eps);
  const Vector b = qt_tilde(eps_tilde);

  LRBoundReport r;
  r.t1 = 13.0 * a.dot(lambda.cwiseProduct(a));
  r.t2 = b.dot(lambda_tilde.cwiseProduct(b));
  r.t3 = a.dot(lambda_tilde.cwiseProduct(a));

  const Vector beta_hat = qt(y);
  const Vector beta_tilde = qt_tilde(y_tilde);
  const Matrix corners = support.corners();
  r.M_LR = std::max((corners * beta_hat).cwiseAbs().maxCoeff(), (corners * beta_tilde).cwiseAbs().maxCoeff());
  if (test_x.rows() > 0) {
    r.M_LR = std::max({r.M_LR, (test_x * beta_hat).cwiseAbs().maxCoeff(), (test_x * beta_tilde).cwiseAbs().maxCoeff()});
  }
  r.chi2_term = 2.0 * r.M_LR * chi2 * (safe_sqrt(r.t2) + safe_sqrt(r.t3));
  r.cross_term = safe_sqrt(2.0 * r.t3) * safe_sqrt(r.t1 / 13.0);
  r.total = r.t1 + r.t2 + r.chi2_term + r.cross_term;
  return r;
}

AssumptionCheck assumption4_check(double d, double V, double U, double phi_F1, double phi_F2, double phi_G1,
                                  double phi_G2) {
  AssumptionCheck a;
  a.d = d;
  a.V = V;
  a.U = U;
  const double base = std::pow(d, 1.0 / (d + 1.0)) + std::pow(d, -d / (d + 1.0));
  const double dp1 = d + 1.0;
  a.C_dVU = std::pow(base, (3.0 * d + 1.0) / (2.0 * dp1)) * std::pow(V, (2.0 * d + 1.0) / (2.0 * dp1 * dp1)) *
            std::pow(U, (2.0 * d + 1.0) / (dp1 * dp1));
  a.K_dV = std::pow(base, (2.0 * d + 1.0) / dp1) * std::pow(V, (2.0 * d + 1.0) / (dp1 * dp1));
  const double expo = d * d / (dp1 * dp1);
  a.lhs_reg = a.C_dVU * a.C_dVU * std::pow(std::max(phi_F2, 0.0), expo);
  a.rhs_reg = phi_F1;
  a.lhs_cls = a.K_dV * std::pow(std::max(phi_G2, 0.0), expo);
  a.rhs_cls = phi_G1;
  a.holds_reg = a.lhs_reg < a.rhs_reg;
  a.holds_cls = a.lhs_cls < a.rhs_cls;
  return a;
}

double class_sup_distance(const BasisFunctionClass& cls, const DensityModel& density, const PointFunction& mu_hat,
                          Eigen::Index m, const SeedSpec& seed) {
  if (cls.kind() != ClassKind::Basis) throw Error(ErrorCode::InvalidArgument, "U needs a basis class");
  if (!cls.box()) return kInf;
  const Matrix x = density.sample(m, seed);
  const Matrix phi = cls.design(x);
  Vector mu(m);
  for (Eigen::Index i = 0; i < m; ++i) mu[i] = mu_hat(x.row(i).transpose());
  const double n = static_cast<double>(m);
  const Matrix gram = phi.transpose() * phi / n;
  const Vector cross = phi.transpose() * mu / n;
  const double c = mu.squaredNorm() / n;
  const Matrix corners = cls.box()->corners();
  double best = 0.0;
  for (Eigen::Index r = 0; r < corners.rows(); ++r) {
    const Vector beta = corners.row(r).transpose();
    best = std::max(best, beta.dot(gram * beta) - 2.0 * beta.dot(cross) + c);
  }
  return std::sqrt(best);
}

}  // namespace syndatum
