#include <algorithm>
#include <cmath>
#include <functional>
#include <limits>
#include <numeric>
#include <vector>

#include "doctest.h"
#include "mra/haar.hpp"
#include "test_helpers.hpp"

using namespace mra;
using mra::test::random_matrix;

TEST_CASE("2x2 worked example") {
  DenseMatrix A(2, 2, Dtype::f64);
  A.data = {1, 2, 3, 4};
  HaarCoefficients c = haar2d_decompose(A);
  CHECK(c.n == 2);
  CHECK(c.scaling == doctest::Approx(5.0).epsilon(1e-14));
  REQUIRE(c.levels.size() == 1);
  CHECK(c.levels[0].vertical[0] == doctest::Approx(-1.0).epsilon(1e-14));
  CHECK(c.levels[0].horizontal[0] == doctest::Approx(-2.0).epsilon(1e-14));
  CHECK(c.levels[0].diagonal[0] == doctest::Approx(0.0).epsilon(1e-14));
  CHECK(c.coefficient_count() == 4);

  HaarReconstruction full = haar2d_reconstruct(c, 1.0);
  for (std::size_t i = 0; i < 4; ++i)
    CHECK(full.approx.data[i] == doctest::Approx(A.data[i]).epsilon(1e-14));
  CHECK(full.rel_error == doctest::Approx(0.0).epsilon(1e-14));
}

TEST_CASE("transform is an isometry") {
  for (std::size_t n : {2, 4, 8, 16, 32}) {
    DenseMatrix A = random_matrix(n, n, 30 + n);
    HaarCoefficients c = haar2d_decompose(A);
    CHECK(c.coefficient_count() == n * n);
    std::vector<double> flat = haar_flatten(c);
    REQUIRE(flat.size() == n * n);
    double energy_a = 0.0, energy_c = 0.0;
    for (double v : A.data) energy_a += v * v;
    for (double v : flat) energy_c += v * v;
    CHECK(energy_c == doctest::Approx(energy_a).epsilon(1e-12));
  }
}

TEST_CASE("full reconstruction inverts the transform") {
  DenseMatrix A = random_matrix(16, 16, 31);
  HaarReconstruction full = haar2d_reconstruct(haar2d_decompose(A), 1.0);
  for (std::size_t i = 0; i < A.size(); ++i)
    CHECK(full.approx.data[i] == doctest::Approx(A.data[i]).epsilon(1e-12));
}

TEST_CASE("truncation error matches discarded energy") {
  // Isometry implies || A - A_kept ||_F^2 equals the energy of the dropped
  // coefficients.
  DenseMatrix A = random_matrix(8, 8, 32);
  HaarCoefficients c = haar2d_decompose(A);
  std::vector<double> flat = haar_flatten(c);
  std::vector<double> mags(flat.size());
  for (std::size_t i = 0; i < flat.size(); ++i) mags[i] = std::abs(flat[i]);
  std::sort(mags.begin(), mags.end(), std::greater<double>());

  double energy_a = 0.0;
  for (double v : A.data) energy_a += v * v;

  for (double f : {0.25, 0.5, 0.75}) {
    const std::size_t keep = static_cast<std::size_t>(std::ceil(f * 64.0));
    double dropped = 0.0;
    for (std::size_t i = keep; i < mags.size(); ++i) dropped += mags[i] * mags[i];
    HaarReconstruction rec = haar2d_reconstruct(c, f);
    CHECK(rec.rel_error == doctest::Approx(std::sqrt(dropped / energy_a)).epsilon(1e-10));
  }
}

TEST_CASE("error is monotone in the keep fraction") {
  DenseMatrix A = random_matrix(16, 16, 33);
  HaarCoefficients c = haar2d_decompose(A);
  double prev = std::numeric_limits<double>::infinity();
  for (double f : {0.05, 0.1, 0.25, 0.5, 0.75, 1.0}) {
    const double err = haar2d_reconstruct(c, f).rel_error;
    CHECK(err <= prev + 1e-12);
    prev = err;
  }
  CHECK(haar2d_reconstruct(c, 1.0).rel_error < 1e-12);
}

TEST_CASE("constant matrix concentrates in the scaling coefficient") {
  DenseMatrix A(8, 8, Dtype::f64);
  for (double& v : A.data) v = 1.25;
  HaarCoefficients c = haar2d_decompose(A);
  CHECK(c.scaling == doctest::Approx(1.25 * 8.0).epsilon(1e-13));
  for (const HaarDetailLevel& lvl : c.levels) {
    for (double v : lvl.vertical) CHECK(std::abs(v) < 1e-13);
    for (double v : lvl.horizontal) CHECK(std::abs(v) < 1e-13);
    for (double v : lvl.diagonal) CHECK(std::abs(v) < 1e-13);
  }
  // One coefficient is enough to reconstruct it exactly.
  HaarReconstruction rec = haar2d_reconstruct(c, 1.0 / 64.0);
  CHECK(rec.rel_error < 1e-13);
}

TEST_CASE("flatten order is scaling first, coarse before fine") {
  DenseMatrix A = random_matrix(4, 4, 34);
  HaarCoefficients c = haar2d_decompose(A);
  std::vector<double> flat = haar_flatten(c);
  REQUIRE(flat.size() == 16);
  CHECK(flat[0] == c.scaling);
  // Coarse level (size 1) occupies slots 1-3.
  REQUIRE(c.levels.size() == 2);
  CHECK(flat[1] == c.levels[1].vertical[0]);
  CHECK(flat[2] == c.levels[1].horizontal[0]);
  CHECK(flat[3] == c.levels[1].diagonal[0]);
  CHECK(flat[4] == c.levels[0].vertical[0]);
}

TEST_CASE("invalid inputs are rejected") {
  CHECK_THROWS(haar2d_decompose(random_matrix(6, 6, 35)));   // not a power of two
  CHECK_THROWS(haar2d_decompose(random_matrix(4, 8, 36)));   // not square
  HaarCoefficients c = haar2d_decompose(random_matrix(4, 4, 37));
  CHECK_THROWS(haar2d_reconstruct(c, 0.0));
  CHECK_THROWS(haar2d_reconstruct(c, 1.5));
}
