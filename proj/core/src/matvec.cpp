#include "mra/matvec.hpp"

#include <algorithm>
#include <stdexcept>

namespace mra {

DenseMatrix matvec(const Plan& plan, const Pyramid& pyr_v, std::size_t n) {
  const std::size_t d = pyr_v.d;
  if (pyr_v.base_n != n) throw std::invalid_argument("matvec: pyramid length mismatch");
  DenseMatrix out(n, d, Dtype::f64);
  if (plan.entries.empty()) return out;

  // Plan entries are sorted coarse-to-fine, so one pass processes whole
  // scale groups in order.
  std::vector<std::size_t> scales;
  for (const PlanEntry& e : plan.entries)
    if (scales.empty() || scales.back() != e.id.s) scales.push_back(e.id.s);

  const std::size_t s_top = scales.front();
  DenseMatrix acc(n / s_top, d, Dtype::f64);
  std::size_t cur_scale = s_top;
  std::size_t next = 0;
  for (std::size_t s : scales) {
    if (s != cur_scale) {
      const std::size_t ratio = cur_scale / s;
      DenseMatrix expanded(acc.rows * ratio, d, Dtype::f64);
      for (std::size_t i = 0; i < expanded.rows; ++i)
        for (std::size_t k = 0; k < d; ++k) expanded.at(i, k) = acc.at(i / ratio, k);
      acc = std::move(expanded);
      cur_scale = s;
    }
    const DenseMatrix& v = pyr_v.level(s);
    for (; next < plan.entries.size() && plan.entries[next].id.s == s; ++next) {
      const PlanEntry& e = plan.entries[next];
      const double w = e.mu * static_cast<double>(s);
      for (std::size_t k = 0; k < d; ++k) acc.at(e.id.x - 1, k) += w * v.at(e.id.y - 1, k);
    }
  }
  const std::size_t ratio = cur_scale;
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t k = 0; k < d; ++k) out.at(i, k) = acc.at(i / ratio, k);
  return out;
}

std::vector<double> row_sums(const Plan& plan, std::size_t n) {
  std::vector<double> sums(n, 0.0);
  for (const PlanEntry& e : plan.entries) {
    const double w = e.mu * static_cast<double>(e.id.s);
    for (std::size_t i = (e.id.x - 1) * e.id.s; i < e.id.x * e.id.s; ++i) sums[i] += w;
  }
  return sums;
}

ApproxOutput approx_attention(const AttentionInputs& inputs, const ResolutionSchedule& schedule,
                              PlanVariant variant) {
  const std::size_t n = inputs.Q.rows, d = inputs.Q.cols;
  if (inputs.K.rows != n || inputs.K.cols != d || inputs.V.rows != n || inputs.V.cols != d)
    throw std::invalid_argument("approx_attention: Q, K, V must share n and d");
  schedule.validate(n);

  const std::size_t s0 = schedule.scales.front();
  const Pyramid pyr_q = build_pyramid(inputs.Q, s0);
  const Pyramid pyr_k = build_pyramid(inputs.K, s0);
  const Pyramid pyr_v = build_pyramid(inputs.V, s0);

  Plan plan = construct_plan(pyr_q, pyr_k, schedule, inputs.logit_scale, variant,
                             inputs.logit_bias);

  ApproxOutput out;
  out.global_shift = plan.global_shift;
  out.mu_evals = plan.mu_evals;
  out.raw_AV = matvec(plan, pyr_v, n);
  out.row_sums = row_sums(plan, n);
  out.Z_hat = DenseMatrix(n, d, Dtype::f64);
  for (std::size_t i = 0; i < n; ++i) {
    const double rs = out.row_sums[i];
    if (rs >= kRowSumGuard) {
      for (std::size_t k = 0; k < d; ++k) out.Z_hat.at(i, k) = out.raw_AV.at(i, k) / rs;
    } else {
      ++out.uncovered_row_count;
    }
  }
  return out;
}

}  // namespace mra
