#pragma once

#include <cstdint>

#include "mra/dense_matrix.hpp"

namespace mra {

enum class GeneratorKind { gaussian, clustered, peaked };

/// Deterministic synthetic Q/K/V generator. Identical spec gives bit-identical
/// output (splitmix64 stream + polar Gaussian transform, see rng.hpp).
struct GeneratorSpec {
  GeneratorKind kind = GeneratorKind::gaussian;
  std::size_t n = 0;
  std::size_t d = 0;
  std::uint64_t seed = 0;
  // gaussian: entry stddev
  double sigma = 1.0;
  // clustered: contiguous cluster count and within-cluster noise stddev
  std::size_t clusters = 1;
  double tau = 0.1;
  // peaked: logit gain; Q and K are scaled so block of QK^T logits has
  // stddev roughly proportional to the gain
  double gain = 1.0;
};

struct GeneratedInputs {
  DenseMatrix Q, K, V;
};

GeneratedInputs generate(const GeneratorSpec& spec);

}  // namespace mra
