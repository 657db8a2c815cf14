#pragma once

#include <cstdint>
#include <map>
#include <ostream>
#include <vector>

#include "mra/dense_matrix.hpp"
#include "mra/pyramid.hpp"

namespace mra {

/// Dyadic block at scale s and 1-based block coordinates (x, y). Its support
/// is rows (sx - s, sx], cols (sy - s, sy].
struct ComponentId {
  std::size_t s = 1;
  std::size_t x = 1;
  std::size_t y = 1;

  friend bool operator==(const ComponentId& a, const ComponentId& b) {
    return a.s == b.s && a.x == b.x && a.y == b.y;
  }
  friend bool operator<(const ComponentId& a, const ComponentId& b) {
    if (a.s != b.s) return a.s > b.s;  // coarse first
    if (a.x != b.x) return a.x < b.x;
    return a.y < b.y;
  }
};

/// Descending scales with per-stage refinement budgets. budgets[i] is the
/// number of scale scales[i] blocks popped and replaced by scale scales[i+1]
/// children. Forced components (all at the coarsest scale) are refined first
/// and do not consume budget.
struct ResolutionSchedule {
  std::vector<std::size_t> scales;
  std::vector<std::size_t> budgets;
  std::vector<ComponentId> forced;

  void validate(std::size_t n) const;
};

enum class PlanVariant { full, sparse_only };

struct PlanEntry {
  ComponentId id;
  double logit = 0.0;  // logit_scale * pooled inner product + logit_bias
  double mu = 0.0;     // exp(logit - global_shift)
};

/// The selected set J with disjoint supports, sorted coarse-to-fine and then
/// by (x, y). mu values carry the stabilization shift; assemble_dense ignores
/// the shift and exponentiates logits raw.
struct Plan {
  std::size_t n = 0;
  std::vector<PlanEntry> entries;
  double global_shift = 0.0;
  std::map<std::size_t, std::size_t> mu_evals;  // per-scale evaluation counts

  void set_global_shift(double c);
  std::size_t total_mu_evals() const;
};

/// Pooled logit of a block: logit_scale * <(Q~_s)_x, (K~_s)_y> + logit_bias.
/// Equals the mean of the scaled logit matrix over the block's support.
double block_logit(const Pyramid& pyr_q, const Pyramid& pyr_k, const ComponentId& c,
                   double logit_scale, double logit_bias = 0.0);

/// Mean of a dense matrix over the block's support.
double mu_star(const DenseMatrix& a_dense, const ComponentId& c);

/// Greedy coarse-to-fine construction of the selected set. At each stage the
/// budgeted number of largest-logit unrefined blocks is replaced by all its
/// children; ties break by ascending (x, y); budgets clamp to availability.
/// The sparse_only variant keeps only finest-scale entries.
Plan construct_plan(const Pyramid& pyr_q, const Pyramid& pyr_k, const ResolutionSchedule& schedule,
                    double logit_scale, PlanVariant variant, double logit_bias = 0.0);

/// Materializes the unnormalized approximation: entry (i, j) is exp(logit) of
/// the unique plan entry covering it, 0 if uncovered. Test scale only.
DenseMatrix assemble_dense(const Plan& plan, std::size_t n);

struct ReferenceDecomposition {
  std::map<ComponentId, double> coefficients;
  std::map<std::size_t, DenseMatrix> residuals;  // residual left after each scale
};

/// Coarse-to-fine residual decomposition over the given component set:
/// alpha = block mean of the current residual, which is then subtracted.
ReferenceDecomposition reference_decompose(const DenseMatrix& a_dense,
                                           const std::vector<ComponentId>& components);

/// Builds the truncated approximation two ways (summed residual coefficients
/// vs smallest-covering-block means) and returns the max absolute entry
/// difference. Exact equality is expected up to rounding.
double check_observation(const DenseMatrix& a_dense, const std::vector<ComponentId>& j_set);

/// Debug dump, one "s,x,y,logit,mu" line per entry.
void dump_plan_csv(const Plan& plan, std::ostream& out);

}  // namespace mra
