#include "mra/pyramid.hpp"

#include <stdexcept>

namespace mra {

const DenseMatrix& Pyramid::level(std::size_t s) const {
  auto it = levels.find(s);
  if (it == levels.end()) throw std::invalid_argument("Pyramid: missing level");
  return it->second;
}

Pyramid build_pyramid(const DenseMatrix& X, std::size_t max_scale) {
  if (!is_power_of_two(max_scale)) throw std::invalid_argument("build_pyramid: max_scale must be a power of two");
  if (X.rows % max_scale != 0) throw std::invalid_argument("build_pyramid: max_scale must divide rows");

  Pyramid p;
  p.base_n = X.rows;
  p.d = X.cols;
  p.levels.emplace(1, X);
  for (std::size_t s = 2; s <= max_scale; s *= 2) {
    const DenseMatrix& prev = p.levels.at(s / 2);
    DenseMatrix cur(prev.rows / 2, prev.cols, Dtype::f64);
    for (std::size_t i = 0; i < cur.rows; ++i)
      for (std::size_t j = 0; j < cur.cols; ++j)
        cur.at(i, j) = 0.5 * prev.at(2 * i, j) + 0.5 * prev.at(2 * i + 1, j);
    p.levels.emplace(s, std::move(cur));
  }
  return p;
}

}  // namespace mra
