#include "mra/haar.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <stdexcept>

namespace mra {

std::size_t HaarCoefficients::coefficient_count() const {
  std::size_t count = 1;
  for (const HaarDetailLevel& lvl : levels) count += 3 * lvl.size * lvl.size;
  return count;
}

HaarCoefficients haar2d_decompose(const DenseMatrix& A) {
  if (A.rows != A.cols || !is_power_of_two(A.rows))
    throw std::invalid_argument("haar2d_decompose: need a square power-of-two matrix");
  const std::size_t n = A.rows;

  HaarCoefficients out;
  out.n = n;
  std::vector<double> cur = A.data;  // current LL block, m x m row-major
  for (std::size_t m = n; m >= 2; m /= 2) {
    const std::size_t h = m / 2;
    HaarDetailLevel lvl;
    lvl.size = h;
    lvl.vertical.resize(h * h);
    lvl.horizontal.resize(h * h);
    lvl.diagonal.resize(h * h);
    std::vector<double> next(h * h);
    for (std::size_t i = 0; i < h; ++i)
      for (std::size_t j = 0; j < h; ++j) {
        const double a = cur[(2 * i) * m + 2 * j];
        const double b = cur[(2 * i) * m + 2 * j + 1];
        const double c = cur[(2 * i + 1) * m + 2 * j];
        const double d = cur[(2 * i + 1) * m + 2 * j + 1];
        next[i * h + j] = 0.5 * (a + b + c + d);
        lvl.vertical[i * h + j] = 0.5 * (a - b + c - d);
        lvl.horizontal[i * h + j] = 0.5 * (a + b - c - d);
        lvl.diagonal[i * h + j] = 0.5 * (a - b - c + d);
      }
    out.levels.push_back(std::move(lvl));
    cur = std::move(next);
  }
  out.scaling = cur[0];
  return out;
}

std::vector<double> haar_flatten(const HaarCoefficients& coeffs) {
  std::vector<double> flat;
  flat.reserve(coeffs.n * coeffs.n);
  flat.push_back(coeffs.scaling);
  for (auto it = coeffs.levels.rbegin(); it != coeffs.levels.rend(); ++it) {
    flat.insert(flat.end(), it->vertical.begin(), it->vertical.end());
    flat.insert(flat.end(), it->horizontal.begin(), it->horizontal.end());
    flat.insert(flat.end(), it->diagonal.begin(), it->diagonal.end());
  }
  return flat;
}

namespace {

DenseMatrix inverse_from_flat(std::size_t n, const std::vector<double>& flat) {
  // Walk the flat layout back into per-level arrays, then invert level by
  // level from the 1x1 scaling block outward.
  std::vector<double> cur(1, flat[0]);
  std::size_t pos = 1;
  std::size_t m = 1;
  while (m < n) {
    const std::size_t h = m;  // current LL side, details at this level are h x h
    const double* vert = flat.data() + pos;
    const double* horiz = vert + h * h;
    const double* diag = horiz + h * h;
    pos += 3 * h * h;
    std::vector<double> next(4 * h * h);
    for (std::size_t i = 0; i < h; ++i)
      for (std::size_t j = 0; j < h; ++j) {
        const double ll = cur[i * h + j];
        const double v = vert[i * h + j];
        const double hz = horiz[i * h + j];
        const double dg = diag[i * h + j];
        next[(2 * i) * (2 * h) + 2 * j] = 0.5 * (ll + v + hz + dg);
        next[(2 * i) * (2 * h) + 2 * j + 1] = 0.5 * (ll - v + hz - dg);
        next[(2 * i + 1) * (2 * h) + 2 * j] = 0.5 * (ll + v - hz - dg);
        next[(2 * i + 1) * (2 * h) + 2 * j + 1] = 0.5 * (ll - v - hz + dg);
      }
    cur = std::move(next);
    m *= 2;
  }
  DenseMatrix out(n, n, Dtype::f64);
  out.data = std::move(cur);
  return out;
}

}  // namespace

HaarReconstruction haar2d_reconstruct(const HaarCoefficients& coeffs, double keep_fraction) {
  if (!(keep_fraction > 0.0 && keep_fraction <= 1.0))
    throw std::invalid_argument("haar2d_reconstruct: keep_fraction must be in (0, 1]");
  const std::size_t n = coeffs.n;
  std::vector<double> flat = haar_flatten(coeffs);

  const std::size_t keep = static_cast<std::size_t>(
      std::ceil(keep_fraction * static_cast<double>(n) * static_cast<double>(n)));
  std::vector<std::size_t> order(flat.size());
  std::iota(order.begin(), order.end(), 0);
  std::sort(order.begin(), order.end(), [&](std::size_t i, std::size_t j) {
    const double ai = std::abs(flat[i]), aj = std::abs(flat[j]);
    if (ai != aj) return ai > aj;
    return i < j;
  });
  std::vector<double> truncated(flat.size(), 0.0);
  for (std::size_t i = 0; i < keep && i < order.size(); ++i)
    truncated[order[i]] = flat[order[i]];

  HaarReconstruction out;
  out.approx = inverse_from_flat(n, truncated);
  const DenseMatrix full = inverse_from_flat(n, flat);
  double err_sq = 0.0, norm_sq = 0.0;
  for (std::size_t i = 0; i < full.data.size(); ++i) {
    const double diff = out.approx.data[i] - full.data[i];
    err_sq += diff * diff;
    norm_sq += full.data[i] * full.data[i];
  }
  out.rel_error = norm_sq > 0.0 ? std::sqrt(err_sq / norm_sq) : 0.0;
  return out;
}

}  // namespace mra
