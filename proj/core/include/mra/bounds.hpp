#pragma once

#include <string>
#include <vector>

#include "mra/dense_matrix.hpp"
#include "mra/plan.hpp"

namespace mra {

/// One checked inequality lhs <= rhs, with the measured quantities that feed
/// it. Slack is 1e-12 * max(1, rhs), covering rounding only.
struct BoundReport {
  std::string label;
  double r = 0.0;      // measured logit range within the block
  double a = 0.0;      // block minimum logit
  double c_r = 0.0;    // Jensen gap constant at range r
  double c_2r = 0.0;   // Jensen gap constant at 2r
  double delta = 0.0;  // m1-th largest coarse mu (refinement checks only)
  double lhs = 0.0;
  double rhs = 0.0;
  bool holds = false;
};

bool bound_holds(double lhs, double rhs);

/// C_r = 1 + e^r - 2 e^{r/2}; nonnegative, zero at r = 0.
double jensen_gap_constant(double r);

/// Checks 0 <= mu* - mu <= C_r mu, with r measured as the logit range over
/// the block. The reported lhs/rhs are the upper inequality; holds covers
/// both sides.
BoundReport check_block_gap(const DenseMatrix& p_dense, const ComponentId& c, double mu_star_value,
                         double mu_value);

/// Hoelder range bound 2 beta1 beta2 for the block's logits: beta1 bounds the
/// p-norms of the block's Q and K rows, beta2 the pairwise q-norm spreads.
double range_bound(const DenseMatrix& Q, const DenseMatrix& K, const ComponentId& c, double p);

/// Refinement error bound for the two-scale schedule {b, 1}: measured
/// relative Frobenius error of the greedy plan against exp(P) on the left,
/// sqrt((n^2 - m1 b^2) C_2r delta^2 / sum exp(2 P)) on the right. r is the
/// maximum per-block logit range so the range hypothesis holds for every
/// block.
BoundReport check_refinement_bound(const DenseMatrix& p_dense, std::size_t b, std::size_t m1);

/// mean(exp(values)) - exp(mean(values)) <= e^a + e^b - 2 e^{(a+b)/2} with
/// a = min, b = max.
BoundReport jensen_gap_check(const std::vector<double>& values);

/// l1 norm of the level-1 Haar detail of column j of P = Q K^T, bounded by
/// (sum of p-norms of the level-1 Haar detail rows of Q) * q-norm of K_j.
/// j is 0-based; n must be even.
BoundReport haar_column_bound(const DenseMatrix& Q, const DenseMatrix& K, std::size_t j, double p);

/// mu^2 <= mu' for a block: exp of twice the block logit mean on the left,
/// block mean of exp(2 P) on the right.
BoundReport mu_squared_vs_mu_prime(const DenseMatrix& p_dense, const ComponentId& c);

/// One CSV row: label,r,a,c_r,c_2r,delta,lhs,rhs,holds
void dump_bound_csv(const BoundReport& report, std::ostream& out);

}  // namespace mra
