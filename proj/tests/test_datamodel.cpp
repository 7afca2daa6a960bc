#include <doctest.h>

#include <cmath>

#include "syndatum/datamodel.hpp"
#include "syndatum/error.hpp"

using namespace syndatum;

namespace {
ErrorCode code_of(auto&& fn) {
  try {
    fn();
  } catch (const Error& e) {
    return e.code();
  }
  FAIL("expected an Error");
  return ErrorCode::InvalidArgument;
}
}  // namespace

TEST_CASE("make_dataset validates shape and labels") {
  Matrix x(3, 1);
  x << 1, 2, 3;
  const Dataset d = make_dataset(x, Vector::LinSpaced(3, 2, 6), TaskKind::Regression);
  CHECK(d.n() == 3);
  CHECK(d.p() == 1);

  Matrix x2(2, 1);
  x2 << 0.5, 0.7;
  CHECK(code_of([&] { make_dataset(x2, Vector::Ones(2) - Vector::Unit(2, 1), TaskKind::Classification); }) ==
        ErrorCode::InvalidLabel);
  CHECK(code_of([&] { make_dataset(Matrix::Zero(2, 2), Vector::Ones(1), TaskKind::Regression); }) ==
        ErrorCode::DimensionMismatch);
  Vector bad = Vector::Ones(3);
  bad[1] = std::nan("");
  CHECK(code_of([&] { make_dataset(x, bad, TaskKind::Regression); }) == ErrorCode::NonFiniteValue);
}

TEST_CASE("noise models") {
  const SeedSpec seed{7, 0};
  CHECK(sample_noise(NoiseModel::gaussian(0.0), 100, seed).isZero());

  const Vector u = sample_noise(NoiseModel::bounded_uniform(1.0), 1000000, seed);
  CHECK(u.cwiseAbs().maxCoeff() <= std::sqrt(3.0));

  const Vector g = sample_noise(NoiseModel::gaussian(1.0), 1000000, seed.derive(1));
  const double var = (g.array() - g.mean()).square().sum() / static_cast<double>(g.size() - 1);
  CHECK(var >= 0.99);
  CHECK(var <= 1.01);
}

TEST_CASE("seed streams are reproducible and distinct") {
  const SeedSpec a{3, 1};
  Rng r1(a), r2(a), r3(a.derive(1));
  const auto x = r1.next_u64();
  CHECK(x == r2.next_u64());
  CHECK(x != r3.next_u64());
  CHECK(!(a.derive(1) == a.derive(2)));
}
