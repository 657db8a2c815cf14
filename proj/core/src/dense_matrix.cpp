#include "mra/dense_matrix.hpp"

#include <cmath>
#include <string>

namespace mra {

double frobenius_norm(const DenseMatrix& m) {
  double acc = 0.0;
  for (double v : m.data) acc += v * v;
  return std::sqrt(acc);
}

void require_finite(const DenseMatrix& m, const char* context) {
  for (double v : m.data)
    if (!std::isfinite(v))
      throw std::runtime_error(std::string(context) + ": non-finite entry");
}

bool is_power_of_two(std::size_t v) { return v != 0 && (v & (v - 1)) == 0; }

}  // namespace mra
