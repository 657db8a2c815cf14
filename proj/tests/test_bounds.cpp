#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>

#include "doctest.h"
#include "mra/attention.hpp"
#include "mra/bounds.hpp"
#include "test_helpers.hpp"

using namespace mra;
using mra::test::random_matrix;

namespace {

DenseMatrix column(std::initializer_list<double> values) {
  DenseMatrix m(values.size(), 1, Dtype::f64);
  std::size_t i = 0;
  for (double v : values) m.data[i++] = v;
  return m;
}

DenseMatrix worked_p_dense() {
  // P = Q K^T for Q = [0,0,1,1]^T, K = [0,1,0,1]^T.
  DenseMatrix Q = column({0, 0, 1, 1});
  DenseMatrix K = column({0, 1, 0, 1});
  return dense_logits({Q, K, column({0, 0, 0, 0}), 1.0, 0.0});
}

}  // namespace

TEST_CASE("jensen gap constant values") {
  CHECK(jensen_gap_constant(0.0) == 0.0);
  CHECK(jensen_gap_constant(1.0) == doctest::Approx(0.42083928705878884).epsilon(1e-14));
  CHECK(jensen_gap_constant(2.0) == doctest::Approx(2.9524924420125593).epsilon(1e-13));
  // Nonnegative and increasing on a grid.
  double prev = 0.0;
  for (double r = 0.0; r <= 6.0; r += 0.25) {
    const double c = jensen_gap_constant(r);
    CHECK(c >= 0.0);
    CHECK(c >= prev);
    prev = c;
  }
}

TEST_CASE("bound_holds slack") {
  CHECK(bound_holds(1.0, 1.0));
  CHECK(bound_holds(1.0 + 5e-13, 1.0));
  CHECK_FALSE(bound_holds(1.0 + 1e-9, 1.0));
  CHECK(bound_holds(-1.0, 0.0));
}

TEST_CASE("block mean gap bound on the worked block") {
  DenseMatrix P = worked_p_dense();
  const ComponentId c{2, 2, 2};  // rows 3-4, cols 3-4, logits {0,1,0,1}
  const double mu = std::exp(0.5);
  const double mu_star = (1.0 + std::exp(1.0)) / 2.0;
  BoundReport rep = check_block_gap(P, c, mu_star, mu);
  CHECK(rep.holds);
  CHECK(rep.r == doctest::Approx(1.0).epsilon(1e-14));
  CHECK(rep.lhs == doctest::Approx(mu_star - mu).epsilon(1e-14));
  CHECK(rep.lhs == doctest::Approx(0.21042).epsilon(1e-4));
  CHECK(rep.rhs == doctest::Approx(0.42083928705878884 * mu).epsilon(1e-13));
  CHECK(rep.rhs == doctest::Approx(0.69389).epsilon(1e-4));
}

TEST_CASE("block mean gap bound holds on random blocks") {
  for (std::uint64_t seed = 0; seed < 20; ++seed) {
    DenseMatrix Q = random_matrix(16, 4, seed);
    DenseMatrix K = random_matrix(16, 4, seed + 50);
    DenseMatrix P = dense_logits({Q, K, random_matrix(16, 1, seed + 99), 1.0, 0.0});
    for (std::size_t s : {2, 4, 8}) {
      const ComponentId c{s, 1 + seed % (16 / s), 1 + (seed / 3) % (16 / s)};
      // Recompute mu / mu* directly from the dense block.
      double mean_logit = 0.0, mean_exp = 0.0;
      for (std::size_t i = (c.x - 1) * s; i < c.x * s; ++i)
        for (std::size_t j = (c.y - 1) * s; j < c.y * s; ++j) {
          mean_logit += P.at(i, j);
          mean_exp += std::exp(P.at(i, j));
        }
      const double area = static_cast<double>(s * s);
      BoundReport rep = check_block_gap(P, c, mean_exp / area, std::exp(mean_logit / area));
      CHECK(rep.holds);
      CHECK(rep.lhs >= -1e-12);
    }
  }
}

TEST_CASE("range bound on the worked block") {
  DenseMatrix Q = column({0, 0, 1, 1});
  DenseMatrix K = column({0, 1, 0, 1});
  const ComponentId c{2, 2, 2};
  const double bound = range_bound(Q, K, c, 2.0);
  CHECK(bound == doctest::Approx(2.0).epsilon(1e-14));
  // The true range of the block's logits is 1.
  CHECK(bound >= 1.0);
}

TEST_CASE("range bound dominates the measured range") {
  for (std::uint64_t seed = 0; seed < 10; ++seed) {
    DenseMatrix Q = random_matrix(16, 4, seed + 300);
    DenseMatrix K = random_matrix(16, 4, seed + 350);
    DenseMatrix P = dense_logits({Q, K, random_matrix(16, 1, seed), 1.0, 0.0});
    for (double p : {1.0, 2.0, std::numeric_limits<double>::infinity()}) {
      const ComponentId c{4, 1 + seed % 4, 1 + (seed / 2) % 4};
      double lo = std::numeric_limits<double>::infinity();
      double hi = -lo;
      for (std::size_t i = (c.x - 1) * 4; i < c.x * 4; ++i)
        for (std::size_t j = (c.y - 1) * 4; j < c.y * 4; ++j) {
          lo = std::min(lo, P.at(i, j));
          hi = std::max(hi, P.at(i, j));
        }
      CHECK(range_bound(Q, K, c, p) >= hi - lo - 1e-12);
    }
  }
}

TEST_CASE("refinement error bound holds across budgets") {
  DenseMatrix Q = random_matrix(32, 4, 400, 0.5);
  DenseMatrix K = random_matrix(32, 4, 401, 0.5);
  DenseMatrix P = dense_logits({Q, K, random_matrix(32, 1, 402), 1.0, 0.0});
  for (std::size_t m1 : {std::size_t{0}, std::size_t{1}, std::size_t{8}, std::size_t{32},
                         std::size_t{64}}) {
    BoundReport rep = check_refinement_bound(P, 4, m1);
    CHECK(rep.holds);
    CHECK(rep.lhs >= 0.0);
    CHECK(rep.rhs >= 0.0);
  }
  // Full refinement: every block refined, measured error is zero.
  BoundReport full = check_refinement_bound(P, 4, 64);
  CHECK(full.lhs < 1e-12);
}

TEST_CASE("jensen gap check") {
  BoundReport rep = jensen_gap_check({0.0, 1.0});
  CHECK(rep.holds);
  CHECK(rep.lhs == doctest::Approx((1.0 + std::exp(1.0)) / 2.0 - std::exp(0.5)).epsilon(1e-14));
  CHECK(rep.rhs == doctest::Approx(0.42083928705878884).epsilon(1e-13));

  BoundReport constant = jensen_gap_check({2.5, 2.5, 2.5});
  CHECK(constant.holds);
  CHECK(constant.lhs == doctest::Approx(0.0).epsilon(1e-12));
  CHECK(constant.rhs == doctest::Approx(0.0).epsilon(1e-12));

  for (std::uint64_t seed = 0; seed < 10; ++seed) {
    SplitMix64 rng(seed + 500);
    std::vector<double> values(16);
    for (double& v : values) v = rng.next_gaussian();
    CHECK(jensen_gap_check(values).holds);
  }
}

TEST_CASE("haar column bound on the worked inputs") {
  DenseMatrix Q = column({0, 0, 1, 1});
  DenseMatrix K = column({0, 1, 0, 1});
  // Column j = 2 has K_j = 0, so the logit column is identically zero.
  BoundReport rep = haar_column_bound(Q, K, 2, 2.0);
  CHECK(rep.holds);
  CHECK(rep.lhs == doctest::Approx(0.0).epsilon(1e-14));
  // Column j = 1 has K_j = 1: logit column [0,0,1,1], level-1 details are 0.
  BoundReport rep1 = haar_column_bound(Q, K, 1, 2.0);
  CHECK(rep1.holds);
  CHECK(rep1.lhs == doctest::Approx(0.0).epsilon(1e-14));
  CHECK(rep1.rhs >= 0.0);
}

TEST_CASE("haar column bound holds on random inputs") {
  for (std::uint64_t seed = 0; seed < 10; ++seed) {
    DenseMatrix Q = random_matrix(16, 4, seed + 600);
    DenseMatrix K = random_matrix(16, 4, seed + 650);
    for (double p : {1.0, 2.0, std::numeric_limits<double>::infinity()})
      for (std::size_t j : {std::size_t{0}, std::size_t{7}, std::size_t{15}}) {
        BoundReport rep = haar_column_bound(Q, K, j, p);
        CHECK(rep.holds);
        CHECK(rep.lhs >= 0.0);
      }
  }
}

TEST_CASE("pooled square versus squared-logit mean") {
  DenseMatrix P = worked_p_dense();
  const ComponentId c{2, 2, 2};
  BoundReport rep = mu_squared_vs_mu_prime(P, c);
  CHECK(rep.holds);
  CHECK(rep.lhs == doctest::Approx(std::exp(1.0)).epsilon(1e-14));        // exp(2 * 0.5)
  CHECK(rep.rhs == doctest::Approx((1.0 + std::exp(2.0)) / 2.0).epsilon(1e-14));

  for (std::uint64_t seed = 0; seed < 10; ++seed) {
    DenseMatrix R = random_matrix(8, 8, seed + 700, 0.7);
    for (std::size_t s : {2, 4, 8})
      CHECK(mu_squared_vs_mu_prime(R, {s, 1, 1}).holds);
  }
}

TEST_CASE("bound report CSV row") {
  BoundReport rep;
  rep.label = "demo";
  rep.lhs = 1.0;
  rep.rhs = 2.0;
  rep.holds = true;
  std::ostringstream out;
  dump_bound_csv(rep, out);
  const std::string line = out.str();
  CHECK(line.rfind("demo,", 0) == 0);
  CHECK(line.find(",1") != std::string::npos);
  CHECK(line.back() == '\n');
}
