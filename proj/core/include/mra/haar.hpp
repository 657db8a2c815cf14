#pragma once

#include <vector>

#include "mra/dense_matrix.hpp"

namespace mra {

/// One level of 2D Haar detail coefficients. "Vertical" details respond to
/// differences across columns, "horizontal" to differences across rows,
/// "diagonal" to the mixed difference. Each array is size x size, row-major.
struct HaarDetailLevel {
  std::size_t size = 0;
  std::vector<double> vertical;
  std::vector<double> horizontal;
  std::vector<double> diagonal;
};

/// Full-depth orthonormal 2D Haar decomposition of an n x n matrix, n a power
/// of two. levels[0] is the finest (size n/2), the last level has size 1.
/// Total coefficient count is n^2 and the transform is an isometry.
struct HaarCoefficients {
  std::size_t n = 0;
  double scaling = 0.0;  // global average coefficient, equals mean(A) * n
  std::vector<HaarDetailLevel> levels;

  std::size_t coefficient_count() const;
};

HaarCoefficients haar2d_decompose(const DenseMatrix& A);

/// Inverse transform keeping only the ceil(keep_fraction * n^2)
/// largest-magnitude coefficients (the scaling coefficient competes like any
/// other; ties break by deterministic index order). rel_error is the relative
/// Frobenius error against the full reconstruction.
struct HaarReconstruction {
  DenseMatrix approx;
  double rel_error = 0.0;
};
HaarReconstruction haar2d_reconstruct(const HaarCoefficients& coeffs, double keep_fraction);

/// Flattened coefficients in the deterministic truncation order: scaling
/// first, then levels coarse to fine, vertical / horizontal / diagonal within
/// a level, row-major within an array.
std::vector<double> haar_flatten(const HaarCoefficients& coeffs);

}  // namespace mra
