#include <cmath>

#include "doctest.h"
#include "mra/attention.hpp"
#include "mra/generators.hpp"
#include "mra/pyramid.hpp"

using namespace mra;

TEST_CASE("generator is deterministic for a fixed configuration") {
  GeneratorSpec spec;
  spec.kind = GeneratorKind::gaussian;
  spec.n = 16;
  spec.d = 4;
  spec.seed = 42;
  GeneratedInputs a = generate(spec);
  GeneratedInputs b = generate(spec);
  CHECK(a.Q.data == b.Q.data);
  CHECK(a.K.data == b.K.data);
  CHECK(a.V.data == b.V.data);

  spec.seed = 43;
  GeneratedInputs c = generate(spec);
  CHECK(a.Q.data != c.Q.data);
}

TEST_CASE("gaussian sample mean is near zero") {
  GeneratorSpec spec;
  spec.kind = GeneratorKind::gaussian;
  spec.n = 8;
  spec.d = 2;
  spec.sigma = 1.0;
  spec.seed = 7;
  GeneratedInputs g = generate(spec);
  double mean = 0.0;
  for (double v : g.Q.data) mean += v;
  for (double v : g.K.data) mean += v;
  for (double v : g.V.data) mean += v;
  mean /= 3.0 * 8 * 2;
  CHECK(std::abs(mean) < 0.5);
}

TEST_CASE("clustered with zero noise gives identical rows per cluster") {
  GeneratorSpec spec;
  spec.kind = GeneratorKind::clustered;
  spec.n = 16;
  spec.d = 3;
  spec.clusters = 4;
  spec.tau = 0.0;
  spec.seed = 5;
  GeneratedInputs g = generate(spec);
  for (std::size_t i = 0; i < 16; ++i)
    for (std::size_t j = 0; j < 3; ++j)
      CHECK(g.Q.at(i, j) == g.Q.at((i / 4) * 4, j));
}

TEST_CASE("clustered tau=0 pooling at cluster scale is exact") {
  GeneratorSpec spec;
  spec.kind = GeneratorKind::clustered;
  spec.n = 32;
  spec.d = 4;
  spec.clusters = 8;
  spec.tau = 0.0;
  spec.seed = 11;
  GeneratedInputs g = generate(spec);
  Pyramid pyr = build_pyramid(g.Q, 4);  // n / c = 4 rows per cluster
  const DenseMatrix& pooled = pyr.level(4);
  for (std::size_t i = 0; i < pooled.rows; ++i)
    for (std::size_t j = 0; j < pooled.cols; ++j)
      CHECK(pooled.at(i, j) == doctest::Approx(g.Q.at(i * 4, j)).epsilon(1e-14));
}

TEST_CASE("peaked generator concentrates attention") {
  GeneratorSpec spec;
  spec.kind = GeneratorKind::peaked;
  spec.n = 64;
  spec.d = 8;
  spec.gain = 20.0;
  spec.seed = 3;
  GeneratedInputs g = generate(spec);
  AttentionInputs in{g.Q, g.K, g.V, 1.0, 0.0};
  CHECK(attention_entropy(in) < 1.0);
}

TEST_CASE("entropy decreases with peaked gain on a fixed seed") {
  double prev = std::log(64.0) + 1.0;
  for (double gain : {0.5, 2.0, 8.0, 32.0}) {
    GeneratorSpec spec;
    spec.kind = GeneratorKind::peaked;
    spec.n = 64;
    spec.d = 8;
    spec.gain = gain;
    spec.seed = 3;
    GeneratedInputs g = generate(spec);
    AttentionInputs in{g.Q, g.K, g.V, 1.0, 0.0};
    const double h = attention_entropy(in);
    CHECK(h < prev);
    prev = h;
  }
}

TEST_CASE("invalid generator params are rejected") {
  GeneratorSpec spec;
  spec.n = 0;
  spec.d = 4;
  CHECK_THROWS(generate(spec));
  spec.n = 8;
  spec.kind = GeneratorKind::clustered;
  spec.clusters = 9;
  CHECK_THROWS(generate(spec));
  spec.kind = GeneratorKind::gaussian;
  spec.sigma = 0.0;
  CHECK_THROWS(generate(spec));
}
