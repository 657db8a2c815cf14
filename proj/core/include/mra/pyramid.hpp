#pragma once

#include <map>

#include "mra/dense_matrix.hpp"

namespace mra {

/// Dyadic average-pooling pyramid. Level 1 is the source matrix; level s
/// halves level s/2 by averaging consecutive row pairs, so level s holds the
/// s-block row means of the source.
struct Pyramid {
  std::size_t base_n = 0;
  std::size_t d = 0;
  std::map<std::size_t, DenseMatrix> levels;

  const DenseMatrix& level(std::size_t s) const;
  bool has_level(std::size_t s) const { return levels.count(s) != 0; }
};

/// Builds levels 1, 2, 4, ..., max_scale. max_scale must be a power of two
/// dividing X.rows. Total extra storage is under one copy of X.
Pyramid build_pyramid(const DenseMatrix& X, std::size_t max_scale);

}  // namespace mra
