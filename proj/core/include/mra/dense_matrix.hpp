#pragma once

#include <cstddef>
#include <stdexcept>
#include <vector>

namespace mra {

enum class Dtype { f32, f64 };

/// Row-major dense real matrix. The universal carrier for Q, K, V and
/// any dense attention matrix materialized at test scale. Values are
/// held as f64 internally; the dtype tag controls on-disk precision.
struct DenseMatrix {
  std::size_t rows = 0;
  std::size_t cols = 0;
  Dtype dtype = Dtype::f64;
  std::vector<double> data;

  DenseMatrix() = default;
  DenseMatrix(std::size_t r, std::size_t c, Dtype dt = Dtype::f64)
      : rows(r), cols(c), dtype(dt), data(r * c, 0.0) {
    if (r == 0 || c == 0) throw std::invalid_argument("DenseMatrix: zero dimension");
  }

  double& at(std::size_t i, std::size_t j) { return data[i * cols + j]; }
  double at(std::size_t i, std::size_t j) const { return data[i * cols + j]; }

  std::size_t size() const { return rows * cols; }

  bool same_shape(const DenseMatrix& o) const { return rows == o.rows && cols == o.cols; }
};

double frobenius_norm(const DenseMatrix& m);

/// Throws if any entry is NaN or infinite.
void require_finite(const DenseMatrix& m, const char* context);

bool is_power_of_two(std::size_t v);

}  // namespace mra
