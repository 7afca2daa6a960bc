#include <doctest.h>

#include <cmath>

#include "syndatum/densities.hpp"
#include "syndatum/error.hpp"

using namespace syndatum;

namespace {
Vector pt(double v) { return Vector::Constant(1, v); }

// Closed form of chi^2(Uniform[-1,1] || two-block(alpha)).
double chi2_uniform_two_block(double a) {
  return a * std::pow(1.0 / (2.0 * a) - 1.0, 2) + (1.0 - a) * std::pow(1.0 / (2.0 * (1.0 - a)) - 1.0, 2);
}
}  // namespace

TEST_CASE("pdf values") {
  CHECK(DensityModel::uniform_box(BoxSupport::interval(-1, 1)).pdf(pt(0.3)) == doctest::Approx(0.5));
  CHECK(DensityModel::two_block(0.75).pdf(pt(0.5)) == doctest::Approx(0.75));
  CHECK(DensityModel::two_block(0.75).pdf(pt(-0.5)) == doctest::Approx(0.25));
  CHECK(DensityModel::triangular(true).pdf(pt(0.25)) == doctest::Approx(0.5));
  CHECK(DensityModel::uniform_box(BoxSupport::interval(-1, 1)).pdf(pt(1.5)) == 0.0);
}

TEST_CASE("sampling") {
  const SeedSpec seed{11, 0};
  const Matrix u = DensityModel::uniform_box(BoxSupport::interval(0, 2)).sample(100000, seed);
  CHECK(u.mean() >= 0.98);
  CHECK(u.mean() <= 1.02);

  const Matrix tn = DensityModel::truncated_normal(BoxSupport::cube(2, -2, 2), Vector::Ones(2), Vector::Ones(2))
                        .sample(1000, seed.derive(1));
  CHECK(tn.minCoeff() >= -2.0);
  CHECK(tn.maxCoeff() <= 2.0);

  const Matrix tri = DensityModel::triangular(true).sample(1000000, seed.derive(2));
  CHECK(tri.mean() >= 0.664);
  CHECK(tri.mean() <= 0.670);

  const Matrix tilt = DensityModel::linear_tilt(0.0).sample(100000, seed.derive(3));
  CHECK(std::abs(tilt.mean() - 1.0) < 0.01);
}

TEST_CASE("chi-square divergence") {
  const auto uni = DensityModel::uniform_box(BoxSupport::interval(-1, 1));
  CHECK(chi_square_divergence(uni, uni) == doctest::Approx(0.0).epsilon(1e-12));
  for (double a : {0.6, 0.75, 0.9}) {
    CHECK(std::abs(chi_square_divergence(uni, DensityModel::two_block(a)) - chi2_uniform_two_block(a)) < 1e-6);
  }
  CHECK(std::isinf(chi_square_divergence(DensityModel::triangular(true), DensityModel::triangular(false))));
  // A bounded ratio keeps chi^2 finite even though q vanishes nowhere near p's mass.
  const auto tilt = DensityModel::linear_tilt(0.5);
  const auto flat = DensityModel::uniform_box(BoxSupport::interval(0, 2));
  const double oracle = [] {
    // integral over [0,2] of (q - p)^2 / q with p = 1/2, q = (0.5(x-1)+1)/2, midpoint rule
    double s = 0.0;
    const int k = 200000;
    for (int i = 0; i < k; ++i) {
      const double x = 2.0 * (i + 0.5) / k;
      const double q = (0.5 * (x - 1.0) + 1.0) / 2.0;
      s += (0.5 - q) * (0.5 - q) / q * (2.0 / k);
    }
    return s;
  }();
  CHECK(chi_square_divergence(flat, tilt) == doctest::Approx(oracle).epsilon(1e-6));
}

TEST_CASE("fidelity tails and certificates") {
  const auto p = DensityModel::triangular(true);
  const auto q = DensityModel::triangular(false);
  CHECK(fidelity_tail_probability(p, p, 1.5) == doctest::Approx(0.0));
  for (double C : {1.0, 10.0, 0.3}) {
    CHECK(std::abs(fidelity_tail_probability(p, q, C) - (1 + 2 * C) / ((1 + C) * (1 + C))) < 1e-9);
  }
  CHECK(fidelity_tail_probability(p, q, 10.0) == doctest::Approx(21.0 / 121.0));

  const auto grid = default_fidelity_grid();
  CHECK(grid.size() == 64);
  const auto cert = certify_fidelity_level(p, q, 1.0, grid);
  CHECK(cert.V >= 1.99);
  CHECK(cert.V <= 2.0);
  CHECK(cert.verify());

  CHECK(certify_fidelity_level(p, p, 2.0, grid).V == doctest::Approx(1.0));
  // Ratio confined to [1/2, 2]: V <= 2^d.
  const auto b = DensityModel::two_block(2.0 / 3.0);
  const auto uni = DensityModel::uniform_box(BoxSupport::interval(-1, 1));
  CHECK(certify_fidelity_level(uni, b, 3.0, grid).V <= 8.0);
}

TEST_CASE("fidelity from chi^2 and converse bound") {
  const auto a = fidelity_from_chi2(0, 0);
  CHECK(a.V == 1.0);
  CHECK(a.d == 1.0);
  CHECK(fidelity_from_chi2(1.0 / 3, 1.0 / 3).V == doctest::Approx(4.0 / 3.0));
  CHECK(fidelity_from_chi2(2, 5).V == doctest::Approx(6.0));
  CHECK(chi2_bound_from_fidelity(1, 2, 1) == doctest::Approx(4.0));
  CHECK(chi2_bound_from_fidelity(2, 3, 2) == doctest::Approx(1.0 + 4.0 / 3.0));
  CHECK_THROWS_AS(chi2_bound_from_fidelity(1, 1, 2), Error);
}
