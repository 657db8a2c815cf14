#include "mra/attention.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace mra {

namespace {

void validate(const AttentionInputs& in, std::size_t dense_cap) {
  const std::size_t n = in.Q.rows, d = in.Q.cols;
  if (n == 0 || d == 0) throw std::invalid_argument("attention: empty input");
  if (in.K.rows != n || in.K.cols != d)
    throw std::invalid_argument("attention: Q and K must share n and d");
  if (in.V.rows != n || in.V.cols == 0)
    throw std::invalid_argument("attention: V must have n rows");
  if (!std::isfinite(in.logit_scale) || !std::isfinite(in.logit_bias))
    throw std::invalid_argument("attention: non-finite scale or bias");
  if (n > dense_cap) throw std::invalid_argument("attention: n exceeds dense cap");
}

}  // namespace

DenseMatrix dense_logits(const AttentionInputs& in, std::size_t dense_cap) {
  validate(in, dense_cap);
  const std::size_t n = in.Q.rows, d = in.Q.cols;
  DenseMatrix P(n, n, Dtype::f64);
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = 0; j < n; ++j) {
      double dot = 0.0;
      for (std::size_t k = 0; k < d; ++k) dot += in.Q.at(i, k) * in.K.at(j, k);
      P.at(i, j) = in.logit_scale * dot + in.logit_bias;
    }
  }
  return P;
}

ExactAttentionOutput exact_attention(const AttentionInputs& in, bool keep_dense,
                                     std::size_t dense_cap) {
  DenseMatrix P = dense_logits(in, dense_cap);
  const std::size_t n = P.rows, d = in.V.cols;

  ExactAttentionOutput out;
  out.Z = DenseMatrix(n, d, Dtype::f64);
  out.row_sums.resize(n);
  DenseMatrix A(n, n, Dtype::f64);

  for (std::size_t i = 0; i < n; ++i) {
    double row_max = P.at(i, 0);
    for (std::size_t j = 1; j < n; ++j) row_max = std::max(row_max, P.at(i, j));
    double sum = 0.0;
    for (std::size_t j = 0; j < n; ++j) {
      const double a = std::exp(P.at(i, j) - row_max);
      A.at(i, j) = a;
      sum += a;
    }
    if (!std::isfinite(sum) || sum <= 0.0)
      throw std::runtime_error("exact_attention: non-finite row sum");
    out.row_sums[i] = sum;
    for (std::size_t k = 0; k < d; ++k) {
      double acc = 0.0;
      for (std::size_t j = 0; j < n; ++j) acc += A.at(i, j) * in.V.at(j, k);
      out.Z.at(i, k) = acc / sum;
    }
  }
  if (keep_dense) out.A_dense = std::move(A);
  return out;
}

double relative_error(const DenseMatrix& approx, const DenseMatrix& exact) {
  if (!approx.same_shape(exact)) throw std::invalid_argument("relative_error: shape mismatch");
  const double denom = frobenius_norm(exact);
  if (denom == 0.0) throw std::invalid_argument("relative_error: zero reference norm");
  double acc = 0.0;
  for (std::size_t i = 0; i < approx.data.size(); ++i) {
    const double diff = approx.data[i] - exact.data[i];
    acc += diff * diff;
  }
  return std::sqrt(acc) / denom;
}

double attention_entropy(const AttentionInputs& in, std::size_t dense_cap) {
  DenseMatrix P = dense_logits(in, dense_cap);
  const std::size_t n = P.rows;
  double total = 0.0;
  std::vector<double> p(n);
  for (std::size_t i = 0; i < n; ++i) {
    double row_max = P.at(i, 0);
    for (std::size_t j = 1; j < n; ++j) row_max = std::max(row_max, P.at(i, j));
    double sum = 0.0;
    for (std::size_t j = 0; j < n; ++j) {
      p[j] = std::exp(P.at(i, j) - row_max);
      sum += p[j];
    }
    double h = 0.0;
    for (std::size_t j = 0; j < n; ++j) {
      const double q = p[j] / sum;
      if (q > 0.0) h -= q * std::log(q);
    }
    total += h;
  }
  return total / static_cast<double>(n);
}

}  // namespace mra
