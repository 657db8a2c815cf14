#pragma once

#include <optional>
#include <vector>

#include "mra/dense_matrix.hpp"

namespace mra {

/// Dense work above this row count is refused by the exact oracle.
constexpr std::size_t kDefaultDenseCap = 4096;

struct AttentionInputs {
  DenseMatrix Q, K, V;
  double logit_scale = 1.0;
  double logit_bias = 0.0;
};

struct ExactAttentionOutput {
  DenseMatrix Z;                        // n x d, row-normalized
  std::vector<double> row_sums;         // row sums of the stabilized exp(P)
  std::optional<DenseMatrix> A_dense;   // unnormalized exp(P), test scale only
};

/// Z = D exp(logit_scale * Q K^T + logit_bias) V, stabilized by per-row max
/// subtraction. Ground truth for every approximation in this project.
ExactAttentionOutput exact_attention(const AttentionInputs& inputs, bool keep_dense = false,
                                     std::size_t dense_cap = kDefaultDenseCap);

/// || approx - exact ||_F / || exact ||_F
double relative_error(const DenseMatrix& approx, const DenseMatrix& exact);

/// Mean over rows of the Shannon entropy (nats) of the normalized attention
/// row. In [0, ln n].
double attention_entropy(const AttentionInputs& inputs, std::size_t dense_cap = kDefaultDenseCap);

/// Dense logit matrix logit_scale * Q K^T + logit_bias.
DenseMatrix dense_logits(const AttentionInputs& inputs, std::size_t dense_cap = kDefaultDenseCap);

}  // namespace mra
