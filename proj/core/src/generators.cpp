#include "mra/generators.hpp"

#include <cmath>
#include <stdexcept>

#include "mra/rng.hpp"

namespace mra {

namespace {

void validate(const GeneratorSpec& spec) {
  if (spec.n < 1 || spec.d < 1) throw std::invalid_argument("generate: n and d must be >= 1");
  switch (spec.kind) {
    case GeneratorKind::gaussian:
      if (!(spec.sigma > 0)) throw std::invalid_argument("generate: sigma must be > 0");
      break;
    case GeneratorKind::clustered:
      if (spec.clusters < 1 || spec.clusters > spec.n)
        throw std::invalid_argument("generate: clusters must be in [1, n]");
      if (!(spec.tau >= 0)) throw std::invalid_argument("generate: tau must be >= 0");
      break;
    case GeneratorKind::peaked:
      if (!(spec.gain > 0)) throw std::invalid_argument("generate: gain must be > 0");
      break;
  }
}

DenseMatrix gaussian_matrix(std::size_t n, std::size_t d, double sigma, SplitMix64& rng) {
  DenseMatrix m(n, d, Dtype::f64);
  for (double& v : m.data) v = sigma * rng.next_gaussian();
  return m;
}

// Row i belongs to the contiguous cluster floor(i * c / n). The centers are
// shared by Q, K, and V (a token's query, key, and value all express the same
// underlying semantics), while the per-row noise stream is private to each
// matrix.
DenseMatrix clustered_matrix(std::size_t n, std::size_t d, std::size_t c, double tau,
                             const DenseMatrix& centers, SplitMix64& rng) {
  DenseMatrix m(n, d, Dtype::f64);
  for (std::size_t i = 0; i < n; ++i) {
    const std::size_t ci = i * c / n;
    for (std::size_t j = 0; j < d; ++j)
      m.at(i, j) = centers.at(ci, j) + tau * rng.next_gaussian();
  }
  return m;
}

}  // namespace

GeneratedInputs generate(const GeneratorSpec& spec) {
  validate(spec);
  SplitMix64 rng_q(derive_stream_seed(spec.seed, 1));
  SplitMix64 rng_k(derive_stream_seed(spec.seed, 2));
  SplitMix64 rng_v(derive_stream_seed(spec.seed, 3));

  GeneratedInputs out;
  switch (spec.kind) {
    case GeneratorKind::gaussian:
      out.Q = gaussian_matrix(spec.n, spec.d, spec.sigma, rng_q);
      out.K = gaussian_matrix(spec.n, spec.d, spec.sigma, rng_k);
      out.V = gaussian_matrix(spec.n, spec.d, spec.sigma, rng_v);
      break;
    case GeneratorKind::clustered: {
      SplitMix64 rng_centers(derive_stream_seed(spec.seed, 4));
      DenseMatrix centers(spec.clusters, spec.d, Dtype::f64);
      for (double& v : centers.data) v = rng_centers.next_gaussian();
      out.Q = clustered_matrix(spec.n, spec.d, spec.clusters, spec.tau, centers, rng_q);
      out.K = clustered_matrix(spec.n, spec.d, spec.clusters, spec.tau, centers, rng_k);
      out.V = clustered_matrix(spec.n, spec.d, spec.clusters, spec.tau, centers, rng_v);
      break;
    }
    case GeneratorKind::peaked: {
      // Entry stddev sqrt(g) / d^{1/4} for Q and K makes QK^T logits have
      // stddev g, so the attention rows concentrate as the gain grows.
      // The logits are linear in g for a fixed seed, which makes the row
      // entropy monotone in the gain.
      const double scale = std::sqrt(spec.gain) / std::pow(static_cast<double>(spec.d), 0.25);
      out.Q = gaussian_matrix(spec.n, spec.d, scale, rng_q);
      out.K = gaussian_matrix(spec.n, spec.d, scale, rng_k);
      out.V = gaussian_matrix(spec.n, spec.d, 1.0, rng_v);
      break;
    }
  }
  return out;
}

}  // namespace mra
