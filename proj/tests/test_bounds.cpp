#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <numeric>

#include "syndatum/bounds.hpp"

using namespace syndatum;

namespace {
Scorer linear_scorer(double b) {
  return function_scorer("lin", [b](const Eigen::Ref<const Vector>& x) { return b * x[0]; });
}
Scorer abs_scorer(double b) {
  return function_scorer("abs", [b](const Eigen::Ref<const Vector>& x) { return b * std::abs(x[0]); }, {0.0});
}
const RiskConfig kQuad{RiskMethod::Quadrature1D, 0, {}};
}  // namespace

TEST_CASE("regression bound on the closed-form toy") {
  const double a = 0.9;
  const Population real{DensityModel::uniform_box(BoxSupport::interval(-1, 1)), truths::abs_value(), 0.0, TaskKind::Regression};
  const Population synth{DensityModel::two_block(a), truths::abs_value(), 0.0, TaskKind::Regression};
  const BoundScenario scen{real, synth};
  const double utility = (2 * a - 1) * (2 * a - 1) / 3;

  const auto wrong = regression_bound(scen, {linear_scorer(0), linear_scorer(2 * a - 1), linear_scorer(2 * a - 1), linear_scorer(0)}, kQuad);
  CHECK(std::isfinite(wrong.total));
  CHECK(wrong.total >= utility);
  CHECK(wrong.chi2 > 0.0);
  CHECK(wrong.est_err_original == doctest::Approx(0.0));

  const auto right = regression_bound(scen, {abs_scorer(1), abs_scorer(1), abs_scorer(1), abs_scorer(1)}, kQuad);
  CHECK(right.total == doctest::Approx(0.0).epsilon(1e-9));

  const Population same{real.density, truths::abs_value(), 0.0, TaskKind::Regression};
  const auto perfect = regression_bound({real, same}, {abs_scorer(1), abs_scorer(1), abs_scorer(1), abs_scorer(1)}, kQuad);
  CHECK(perfect.total == doctest::Approx(0.0).epsilon(1e-9));

  const auto inf = regression_bound(scen, {linear_scorer(0), linear_scorer(0.8), linear_scorer(0.8), linear_scorer(0)}, kQuad,
                                    std::numeric_limits<double>::infinity());
  CHECK(inf.infinite);
  CHECK(std::isinf(inf.total));
}

TEST_CASE("classification bound on the appendix toy") {
  const double a = 0.9;
  const Population real{DensityModel::two_block(1 - a), truths::positive_indicator(), 0.0, TaskKind::Classification};
  const Population synth{DensityModel::two_block(a), truths::positive_indicator(), 0.0, TaskKind::Classification};
  const auto wrong = classification_bound({real, synth}, {abs_scorer(-1), abs_scorer(1), abs_scorer(1), abs_scorer(-1)}, kQuad);
  CHECK(wrong.total >= std::abs(2 * a - 1));
  const auto right = classification_bound({real, synth}, {linear_scorer(1), linear_scorer(1), linear_scorer(1), linear_scorer(1)}, kQuad);
  CHECK(right.total == doctest::Approx(0.0).epsilon(1e-9));
}

TEST_CASE("explicit linear-regression bound") {
  Matrix x(2, 1);
  x << 1, -1;
  Vector eps(2);
  eps << 1, -1;
  const Vector lam = Vector::Constant(1, 0.7);
  const BoxSupport box = BoxSupport::interval(-1, 1);
  const auto r = lr_explicit_bound(x, x, eps, eps, lam, lam, 0.5, eps, eps, box);
  CHECK(r.t1 == doctest::Approx(13 * 0.7));
  const auto zero = lr_explicit_bound(x, x, Vector::Zero(2), Vector::Zero(2), lam, lam, 0.5, Vector::Zero(2), Vector::Zero(2), box);
  CHECK(zero.total == doctest::Approx(0.0));

  // Row permutation invariance and monotonicity in chi^2 on random data.
  const auto density = DensityModel::uniform_box(BoxSupport::cube(3, -1, 1));
  const Matrix xr = density.sample(50, {1, 0});
  const Matrix xt = density.sample(60, {1, 1});
  const Vector er = sample_noise(NoiseModel::gaussian(1), 50, {1, 2});
  const Vector et = sample_noise(NoiseModel::gaussian(1), 60, {1, 3});
  const Vector l3 = Vector::Constant(3, 1.0 / 3.0);
  const Vector yr = xr.rowwise().sum() + er, yt = xt.rowwise().sum() + et;
  const auto base = lr_explicit_bound(xr, xt, er, et, l3, l3, 0.2, yr, yt, density.support());
  std::vector<int> perm(50);
  std::iota(perm.begin(), perm.end(), 0);
  std::reverse(perm.begin(), perm.end());
  Matrix xp(50, 3);
  Vector ep(50), yp(50);
  for (int i = 0; i < 50; ++i) {
    xp.row(i) = xr.row(perm[i]);
    ep[i] = er[perm[i]];
    yp[i] = yr[perm[i]];
  }
  const auto permuted = lr_explicit_bound(xp, xt, ep, et, l3, l3, 0.2, yp, yt, density.support());
  CHECK(permuted.t1 == doctest::Approx(base.t1));
  CHECK(permuted.total == doctest::Approx(base.total));
  CHECK(base.t1 >= -1e-8);
  CHECK(base.t2 >= -1e-8);
  CHECK(base.t3 >= -1e-8);
  const auto more = lr_explicit_bound(xr, xt, er, et, l3, l3, 0.4, yr, yt, density.support());
  CHECK(more.total >= base.total);
}

TEST_CASE("consistency assumption constants") {
  const auto c = assumption4_check(1, 2, 1, 1, 0.5, 1, 0.5);
  CHECK(c.C_dVU == doctest::Approx(std::pow(2.0, 11.0 / 8.0)));
  CHECK(c.K_dV == doctest::Approx(std::pow(2.0, 9.0 / 4.0)));
  CHECK(assumption4_check(3, 5, 2, 0.1, 0.0, 0.1, 0.0).holds_reg);
  const auto lim = assumption4_check(1e6, 1, 1, 0.5, 0.4, 0.5, 0.4);
  CHECK(std::abs(lim.C_dVU - 1) < 1e-3);
  CHECK(std::abs(lim.K_dV - 1) < 1e-3);
  CHECK(lim.holds_reg);
  CHECK_FALSE(assumption4_check(1e6, 1, 1, 0.4, 0.5, 0.4, 0.5).holds_reg);
}

TEST_CASE("sup distance over a boxed class") {
  // F = {b x : |b| <= 2}, mu_hat = 0, X ~ U[-1,1]: sup ||b x|| = 2 / sqrt(3).
  const auto u = class_sup_distance(make_class("linear box=-2,2", 1), DensityModel::uniform_box(BoxSupport::interval(-1, 1)),
                                    [](const Eigen::Ref<const Vector>&) { return 0.0; }, 200000, {2, 0});
  CHECK(u == doctest::Approx(2.0 / std::sqrt(3.0)).epsilon(0.01));
  CHECK(std::isinf(class_sup_distance(make_class("linear", 1), DensityModel::uniform_box(BoxSupport::interval(-1, 1)),
                                      [](const Eigen::Ref<const Vector>&) { return 0.0; }, 1000, {2, 1})));
}
