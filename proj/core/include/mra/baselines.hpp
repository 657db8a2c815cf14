#pragma once

#include <vector>

#include "mra/dense_matrix.hpp"
#include "mra/plan.hpp"

namespace mra {

struct BaselineApprox {
  DenseMatrix approx;
  double rel_error = 0.0;
};

/// Best rank-k Frobenius approximation via truncated SVD (Eckart-Young).
BaselineApprox lowrank_svd(const DenseMatrix& A, std::size_t k);

/// Keeps the k largest-magnitude entries, ties by row-major order.
BaselineApprox topk_sparse(const DenseMatrix& A, std::size_t k);

/// Exact solution of the block-support-restricted relaxed robust PCA: keep
/// the m blocks with the largest mu' = block mean of exp(2 P), S carries the
/// exact exp(P) values inside them, L = exp(P) - S. Also ranks blocks by the
/// pooled proxy mu^2 and reports how many of the kept blocks both rankings
/// agree on.
struct RpcaBlockSolution {
  std::vector<ComponentId> S_support;
  DenseMatrix S_dense;
  double L_norm = 0.0;
  std::vector<double> mu_prime;  // (n/b)^2 scores, block-row-major
  std::vector<double> mu_sq;     // pooled proxy, same layout
  std::size_t proxy_agreement = 0;
};
RpcaBlockSolution rpca_block_solution(const DenseMatrix& p_dense, std::size_t b, std::size_t m);

/// All-coarse-blocks approximation A_b at scale b (exp of block means of P),
/// with a numerical check that its rank is at most n/b.
struct CoarseLowrank {
  DenseMatrix A_b;
  bool rank_bound_ok = false;
};
CoarseLowrank coarse_lowrank(const DenseMatrix& p_dense, std::size_t b);

}  // namespace mra
