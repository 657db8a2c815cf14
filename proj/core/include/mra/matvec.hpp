#pragma once

#include <map>
#include <vector>

#include "mra/attention.hpp"
#include "mra/dense_matrix.hpp"
#include "mra/plan.hpp"
#include "mra/pyramid.hpp"

namespace mra {

/// Row sums below this are treated as uncovered and zero-filled.
constexpr double kRowSumGuard = 1e-300;

struct ApproxOutput {
  DenseMatrix Z_hat;               // normalized approximate attention output
  DenseMatrix raw_AV;              // exp(-c) * A_hat V, c = plan global shift
  std::vector<double> row_sums;    // exp(-c) * A_hat 1
  std::size_t uncovered_row_count = 0;
  double global_shift = 0.0;
  std::map<std::size_t, std::size_t> mu_evals;
};

/// Block-pyramid product exp(-c) * A_hat V without materializing A_hat.
/// Entry (s, x, y) contributes mu * s * (V~_s)_y to the accumulator row x at
/// scale s; accumulators are refined coarse-to-fine by row duplication.
DenseMatrix matvec(const Plan& plan, const Pyramid& pyr_v, std::size_t n);

/// exp(-c) * A_hat 1: entry (s, x, y) adds mu * s to each row of block x.
std::vector<double> row_sums(const Plan& plan, std::size_t n);

/// End-to-end approximate attention: pyramids, greedy plan, shifted matvec
/// and row sums, then row normalization (rows with sums under the guard are
/// zero-filled and counted).
ApproxOutput approx_attention(const AttentionInputs& inputs, const ResolutionSchedule& schedule,
                              PlanVariant variant);

}  // namespace mra
