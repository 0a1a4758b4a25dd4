#include <doctest.h>

#include <cmath>

#include "occuscore/linalg.hpp"
#include "occuscore/rng.hpp"

using namespace occuscore;
using namespace occuscore::la;

namespace {

Mat4 random_symmetric(RandomStream& stream, double scale = 1.0) {
  Mat4 m;
  for (int i = 0; i < 4; ++i)
    for (int j = i; j < 4; ++j) m(i, j) = m(j, i) = scale * (2.0 * stream.uniform() - 1.0);
  return m;
}

Mat4 random_spd(RandomStream& stream) {
  const Mat4 a = random_symmetric(stream);
  Mat4 spd = transpose(a) * a;
  for (int i = 0; i < 4; ++i) spd(i, i) += 0.5;
  return spd;
}

}  // namespace

TEST_CASE("sym_eigen on identity and diagonal matrices") {
  const auto id = sym_eigen(Mat4::identity());
  for (double v : id.values) CHECK(v == doctest::Approx(1.0).epsilon(1e-12));

  Mat4 d;
  d(0, 0) = 1.0;
  d(1, 1) = 2.0;
  d(2, 2) = 3.0;
  d(3, 3) = 4.0;
  const auto e = sym_eigen(d);
  CHECK(e.values[0] == doctest::Approx(4.0));
  CHECK(e.values[1] == doctest::Approx(3.0));
  CHECK(e.values[2] == doctest::Approx(2.0));
  CHECK(e.values[3] == doctest::Approx(1.0));
}

TEST_CASE("sym_eigen spectrum matches determinant evaluations") {
  RandomStream stream = derive_stream(11, 0, 0);
  for (int trial = 0; trial < 20; ++trial) {
    const Mat4 a = random_symmetric(stream, 2.0);
    const auto e = sym_eigen(a);

    // eigenvectors orthonormal
    const Mat4 vtv = transpose(e.vectors) * e.vectors;
    for (int i = 0; i < 4; ++i)
      for (int j = 0; j < 4; ++j)
        CHECK(std::abs(vtv(i, j) - (i == j ? 1.0 : 0.0)) < 1e-10);

    // char poly probe: det(A - tI) = prod(lambda_j - t)
    for (double t : {-1.7, -0.3, 0.0, 0.9, 2.4}) {
      Mat4 shifted = a;
      for (int i = 0; i < 4; ++i) shifted(i, i) -= t;
      double prod = 1.0;
      for (double lam : e.values) prod *= lam - t;
      CHECK(det<4>(shifted) == doctest::Approx(prod).epsilon(1e-8));
    }
  }
}

TEST_CASE("sym_eigen rejects asymmetric input") {
  Mat4 a = Mat4::identity();
  a(0, 1) = 1.0;
  CHECK_THROWS_AS(sym_eigen(a), std::domain_error);
}

TEST_CASE("sym_sqrt_and_inv basics") {
  Mat2 d;
  d(0, 0) = 4.0;
  d(1, 1) = 9.0;
  const auto s = sym_sqrt_and_inv(d);
  CHECK(s.sqrt(0, 0) == doctest::Approx(2.0));
  CHECK(s.sqrt(1, 1) == doctest::Approx(3.0));
  CHECK(std::abs(s.sqrt(0, 1)) < 1e-12);
  REQUIRE(s.inv.has_value());
  CHECK((*s.inv)(0, 0) == doctest::Approx(0.25));

  const auto id = sym_sqrt_and_inv(Mat4::identity());
  REQUIRE(id.inv_sqrt.has_value());
  for (int i = 0; i < 4; ++i) CHECK((*id.inv_sqrt)(i, i) == doctest::Approx(1.0));
}

TEST_CASE("sym_sqrt reconstructs random SPD matrices") {
  RandomStream stream = derive_stream(12, 0, 0);
  for (int trial = 0; trial < 20; ++trial) {
    const Mat4 spd = random_spd(stream);
    const auto s = sym_sqrt_and_inv(spd);
    CHECK(frobenius_norm(s.sqrt * s.sqrt - spd) < 1e-8 * std::max(1.0, frobenius_norm(spd)));
    REQUIRE(s.inv.has_value());
    CHECK(frobenius_norm(*s.inv * spd - Mat4::identity()) < 1e-8);
  }
}

TEST_CASE("lu solve and singularity detection") {
  RandomStream stream = derive_stream(13, 0, 0);
  for (int trial = 0; trial < 20; ++trial) {
    const Mat4 a = random_spd(stream);
    Vec<4> x_true;
    for (double& v : x_true) v = 2.0 * stream.uniform() - 1.0;
    const Vec<4> b = a * x_true;
    const auto x = solve<4>(a, b);
    REQUIRE(x.has_value());
    for (int i = 0; i < 4; ++i) CHECK((*x)[i] == doctest::Approx(x_true[i]).epsilon(1e-8));
  }

  Mat4 rank_deficient;  // duplicated rows
  for (int j = 0; j < 4; ++j) rank_deficient(0, j) = rank_deficient(1, j) = j + 1.0;
  rank_deficient(2, 2) = 1.0;
  rank_deficient(3, 3) = 1.0;
  CHECK_FALSE(solve<4>(rank_deficient, Vec<4>{1, 1, 1, 1}).has_value());
}
