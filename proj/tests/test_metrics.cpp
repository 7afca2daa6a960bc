#include <doctest.h>

#include <cmath>

#include "syndatum/metrics.hpp"

using namespace syndatum;

namespace {
Population toy51(double alpha_unused = 0) {
  (void)alpha_unused;
  return {DensityModel::uniform_box(BoxSupport::interval(-1, 1)), truths::abs_value(), 0.0, TaskKind::Regression};
}
}  // namespace

TEST_CASE("risk of the zero function equals the noise variance") {
  const Population pop{DensityModel::uniform_box(BoxSupport::interval(-1, 1)), truths::zero(), 1.0, TaskKind::Regression};
  const auto r = estimate_risk(function_scorer("zero", [](const Eigen::Ref<const Vector>&) { return 0.0; }), pop,
                               LossKind::Squared, {RiskMethod::MonteCarlo, 10000, {1, 0}});
  CHECK(std::abs(r.value - 1.0) <= 3 * r.std_error + 1e-12);
}

TEST_CASE("quadrature and Monte Carlo agree with the closed-form toy risk") {
  for (double beta : {0.0, 0.5, -1.0}) {
    const auto f = function_scorer("lin", [beta](const Eigen::Ref<const Vector>& x) { return beta * x[0]; });
    const auto q = estimate_risk(f, toy51(), LossKind::Squared, {RiskMethod::Quadrature1D, 0, {}});
    CHECK(q.value == doctest::Approx((1 + beta * beta) / 3).epsilon(1e-9));
    const auto mc = estimate_risk(f, toy51(), LossKind::Squared, {RiskMethod::MonteCarlo, 50000, {2, 0}});
    CHECK(std::abs(mc.value - (1 + beta * beta) / 3) <= 4 * mc.std_error);
  }
  const auto excess = excess_risk(function_scorer("lin", [](const Eigen::Ref<const Vector>& x) { return x[0]; }), toy51(),
                                  LossKind::Squared, {RiskMethod::Quadrature1D, 0, {}});
  // x - |x| = 2x on the negative half: (1/2) * 4 * (1/3).
  CHECK(excess.value == doctest::Approx(2.0 / 3.0));
  const auto none = excess_risk(bayes_scorer(truths::abs_value(), TaskKind::Regression), toy51(), LossKind::Squared,
                                {RiskMethod::Quadrature1D, 0, {}});
  CHECK(std::abs(none.value) < 1e-12);
}

TEST_CASE("zero-one risk of the Bayes rule") {
  const Population pop{DensityModel::two_block(0.3), truths::positive_indicator(), 0.0, TaskKind::Classification};
  const auto b = bayes_scorer(pop.truth, TaskKind::Classification);
  CHECK(std::abs(estimate_risk(b, pop, LossKind::ZeroOne, {RiskMethod::Quadrature1D, 0, {}}).value) < 1e-12);
  CHECK(std::abs(excess_risk(b, pop, LossKind::ZeroOne, {RiskMethod::MonteCarlo, 1000, {3, 0}}).value) < 1e-12);
  // Always predicting +1 errs on the negative half, mass 0.7.
  const auto plus = function_scorer("plus", [](const Eigen::Ref<const Vector>&) { return 1.0; });
  CHECK(estimate_risk(plus, pop, LossKind::ZeroOne, {RiskMethod::Quadrature1D, 0, {}}).value == doctest::Approx(0.7));
}

TEST_CASE("utility metric") {
  const auto f = function_scorer("lin", [](const Eigen::Ref<const Vector>& x) { return 0.3 * x[0]; });
  const auto u = utility_metric(f, f, toy51(), {RiskMethod::MonteCarlo, 1000, {4, 0}});
  CHECK(u.utility == 0.0);
  const double a = 0.9;
  const auto ft = function_scorer("tilde", [a](const Eigen::Ref<const Vector>& x) { return (2 * a - 1) * x[0]; });
  const auto fh = function_scorer("hat", [](const Eigen::Ref<const Vector>&) { return 0.0; });
  const auto uq = utility_metric(ft, fh, toy51(), {RiskMethod::Quadrature1D, 0, {}});
  CHECK(std::abs(uq.utility - (2 * a - 1) * (2 * a - 1) / 3) < 1e-9);
}

TEST_CASE("model comparison of the inconsistent example") {
  const double a = 5.0 / 6.0;
  ComparisonSetup setup{{DensityModel::two_block(1 - a), truths::identity(), 0.0, TaskKind::Regression},
                        DensityModel::two_block(a), truths::identity().fn, 100000};
  const auto rep = evaluate_comparison(make_class("constant box=-0.5,0.5", 1), make_class("constant box=-0.25,0.25", 1),
                                       setup, {RiskMethod::Quadrature1D, 0, {}}, {5, 0});
  // R(beta) = beta^2 + (2/3) beta + 1/3 under the real density.
  const auto risk = [](double b) { return b * b + 2.0 / 3.0 * b + 1.0 / 3.0; };
  CHECK(rep.risks[0].value == doctest::Approx(risk(rep.coefficients[0][0])));
  CHECK(std::abs(rep.risks[0].value - 2.0 / 9.0) < 1e-3);
  CHECK(rep.risks[1].value == doctest::Approx(risk(-0.25)));
  CHECK(std::abs(rep.risks[2].value - 2.0 / 3.0) < 0.01);
  CHECK(rep.risks[3].value == doctest::Approx(0.5625));
  CHECK_FALSE(rep.consistent);

  ComparisonSetup same{setup.real, setup.real.density, truths::identity().fn, 100000};
  const auto ok = evaluate_comparison(make_class("constant box=-0.5,0.5", 1), make_class("constant box=-0.25,0.25", 1),
                                      same, {RiskMethod::Quadrature1D, 0, {}}, {5, 1});
  CHECK(ok.consistent);
}

TEST_CASE("classification comparison is inconsistent at alpha = 0.75") {
  ComparisonSetup setup{{DensityModel::two_block(0.75), truths::positive_indicator(), 0.0, TaskKind::Classification},
                        DensityModel::two_block(0.25), truths::positive_indicator().fn, 100000};
  const auto rep = evaluate_comparison(make_class("threshold-abs box=0,0.5", 1), make_class("threshold-abs box=0.25,1/3", 1),
                                       setup, {RiskMethod::Quadrature1D, 0, {}}, {6, 0});
  CHECK(std::abs(rep.coefficients[0][0]) < 0.01);
  CHECK(std::abs(rep.coefficients[1][0] - 0.25) < 0.01);
  CHECK(std::abs(rep.coefficients[2][0] - 0.5) < 0.01);
  CHECK(std::abs(rep.coefficients[3][0] - 1.0 / 3.0) < 0.01);
  CHECK_FALSE(rep.consistent);
}
