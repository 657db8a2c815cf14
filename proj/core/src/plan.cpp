#include "mra/plan.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <set>
#include <stdexcept>

namespace mra {

void ResolutionSchedule::validate(std::size_t n) const {
  if (scales.empty()) throw std::invalid_argument("schedule: empty scale list");
  if (budgets.size() + 1 != scales.size())
    throw std::invalid_argument("schedule: need one budget per refinement stage");
  for (std::size_t i = 0; i < scales.size(); ++i) {
    if (!is_power_of_two(scales[i]))
      throw std::invalid_argument("schedule: scales must be powers of two");
    if (i > 0 && scales[i] >= scales[i - 1])
      throw std::invalid_argument("schedule: scales must be strictly descending");
  }
  if (n % scales.front() != 0)
    throw std::invalid_argument("schedule: coarsest scale must divide n");
  for (const ComponentId& c : forced) {
    if (c.s != scales.front())
      throw std::invalid_argument("schedule: forced components must be at the coarsest scale");
    if (c.x < 1 || c.x > n / c.s || c.y < 1 || c.y > n / c.s)
      throw std::invalid_argument("schedule: forced component out of range");
  }
}

void Plan::set_global_shift(double c) {
  global_shift = c;
  for (PlanEntry& e : entries) e.mu = std::exp(e.logit - c);
}

std::size_t Plan::total_mu_evals() const {
  std::size_t total = 0;
  for (const auto& [s, count] : mu_evals) total += count;
  return total;
}

double block_logit(const Pyramid& pyr_q, const Pyramid& pyr_k, const ComponentId& c,
                   double logit_scale, double logit_bias) {
  const DenseMatrix& q = pyr_q.level(c.s);
  const DenseMatrix& k = pyr_k.level(c.s);
  if (c.x < 1 || c.x > q.rows || c.y < 1 || c.y > k.rows)
    throw std::invalid_argument("block_logit: index out of range");
  double dot = 0.0;
  for (std::size_t t = 0; t < q.cols; ++t) dot += q.at(c.x - 1, t) * k.at(c.y - 1, t);
  return logit_scale * dot + logit_bias;
}

double mu_star(const DenseMatrix& a_dense, const ComponentId& c) {
  if (a_dense.rows != a_dense.cols) throw std::invalid_argument("mu_star: matrix must be square");
  const std::size_t n = a_dense.rows;
  if (c.s > n || c.x * c.s > n || c.y * c.s > n)
    throw std::invalid_argument("mu_star: component out of range");
  double sum = 0.0;
  for (std::size_t i = (c.x - 1) * c.s; i < c.x * c.s; ++i)
    for (std::size_t j = (c.y - 1) * c.s; j < c.y * c.s; ++j) sum += a_dense.at(i, j);
  return sum / (static_cast<double>(c.s) * static_cast<double>(c.s));
}

Plan construct_plan(const Pyramid& pyr_q, const Pyramid& pyr_k, const ResolutionSchedule& schedule,
                    double logit_scale, PlanVariant variant, double logit_bias) {
  const std::size_t n = pyr_q.base_n;
  if (pyr_k.base_n != n) throw std::invalid_argument("construct_plan: pyramid length mismatch");
  schedule.validate(n);

  Plan plan;
  plan.n = n;

  const std::size_t s0 = schedule.scales.front();
  const std::size_t nb = n / s0;
  double max_logit = -std::numeric_limits<double>::infinity();

  struct Candidate {
    ComponentId id;
    double logit;
  };

  // Stage 0: evaluate the full coarse grid.
  std::vector<Candidate> pool;
  pool.reserve(nb * nb);
  for (std::size_t x = 1; x <= nb; ++x)
    for (std::size_t y = 1; y <= nb; ++y) {
      const ComponentId id{s0, x, y};
      const double logit = block_logit(pyr_q, pyr_k, id, logit_scale, logit_bias);
      max_logit = std::max(max_logit, logit);
      pool.push_back({id, logit});
    }
  plan.mu_evals[s0] += nb * nb;

  std::set<std::pair<std::size_t, std::size_t>> forced_keys;
  for (const ComponentId& c : schedule.forced) forced_keys.insert({c.x, c.y});

  std::vector<Candidate> kept;
  for (std::size_t stage = 1; stage < schedule.scales.size(); ++stage) {
    const std::size_t sp = schedule.scales[stage - 1];
    const std::size_t sc = schedule.scales[stage];
    const std::size_t ratio = sp / sc;

    std::vector<Candidate> refine, survive;
    if (stage == 1 && !forced_keys.empty()) {
      for (Candidate& c : pool) {
        if (forced_keys.count({c.id.x, c.id.y}))
          refine.push_back(c);
        else
          survive.push_back(c);
      }
      pool.swap(survive);
      survive.clear();
    }

    const std::size_t m = std::min<std::size_t>(schedule.budgets[stage - 1], pool.size());
    std::sort(pool.begin(), pool.end(), [](const Candidate& a, const Candidate& b) {
      if (a.logit != b.logit) return a.logit > b.logit;
      if (a.id.x != b.id.x) return a.id.x < b.id.x;
      return a.id.y < b.id.y;
    });
    refine.insert(refine.end(), pool.begin(), pool.begin() + m);
    kept.insert(kept.end(), pool.begin() + m, pool.end());

    std::vector<Candidate> children;
    children.reserve(refine.size() * ratio * ratio);
    for (const Candidate& parent : refine) {
      for (std::size_t cx = (parent.id.x - 1) * ratio + 1; cx <= parent.id.x * ratio; ++cx)
        for (std::size_t cy = (parent.id.y - 1) * ratio + 1; cy <= parent.id.y * ratio; ++cy) {
          const ComponentId id{sc, cx, cy};
          const double logit = block_logit(pyr_q, pyr_k, id, logit_scale, logit_bias);
          max_logit = std::max(max_logit, logit);
          children.push_back({id, logit});
        }
    }
    plan.mu_evals[sc] += refine.size() * ratio * ratio;
    pool.swap(children);
  }
  kept.insert(kept.end(), pool.begin(), pool.end());

  const std::size_t finest = schedule.scales.back();
  for (const Candidate& c : kept) {
    if (variant == PlanVariant::sparse_only && c.id.s != finest) continue;
    plan.entries.push_back({c.id, c.logit, 0.0});
  }
  std::sort(plan.entries.begin(), plan.entries.end(),
            [](const PlanEntry& a, const PlanEntry& b) { return a.id < b.id; });
  plan.set_global_shift(max_logit);
  return plan;
}

DenseMatrix assemble_dense(const Plan& plan, std::size_t n) {
  DenseMatrix out(n, n, Dtype::f64);
  std::vector<unsigned char> covered(n * n, 0);
  for (const PlanEntry& e : plan.entries) {
    const std::size_t s = e.id.s;
    if (e.id.x * s > n || e.id.y * s > n)
      throw std::invalid_argument("assemble_dense: entry out of range");
    const double value = std::exp(e.logit);
    for (std::size_t i = (e.id.x - 1) * s; i < e.id.x * s; ++i)
      for (std::size_t j = (e.id.y - 1) * s; j < e.id.y * s; ++j) {
        if (covered[i * n + j])
          throw std::runtime_error("assemble_dense: overlapping plan supports");
        covered[i * n + j] = 1;
        out.at(i, j) = value;
      }
  }
  return out;
}

ReferenceDecomposition reference_decompose(const DenseMatrix& a_dense,
                                           const std::vector<ComponentId>& components) {
  if (a_dense.rows != a_dense.cols)
    throw std::invalid_argument("reference_decompose: matrix must be square");
  const std::size_t n = a_dense.rows;
  if (!is_power_of_two(n))
    throw std::invalid_argument("reference_decompose: n must be a power of two");

  std::set<ComponentId> unique(components.begin(), components.end());
  ReferenceDecomposition rd;
  DenseMatrix residual = a_dense;
  for (std::size_t s = n;; s /= 2) {
    for (const ComponentId& c : unique) {
      if (c.s != s) continue;
      const double alpha = mu_star(residual, c);
      rd.coefficients[c] = alpha;
      for (std::size_t i = (c.x - 1) * s; i < c.x * s; ++i)
        for (std::size_t j = (c.y - 1) * s; j < c.y * s; ++j) residual.at(i, j) -= alpha;
    }
    rd.residuals.emplace(s, residual);
    if (s == 1) break;
  }
  return rd;
}

double check_observation(const DenseMatrix& a_dense, const std::vector<ComponentId>& j_set) {
  const std::size_t n = a_dense.rows;
  ReferenceDecomposition rd = reference_decompose(a_dense, j_set);

  DenseMatrix via_coeffs(n, n, Dtype::f64);
  for (const auto& [c, alpha] : rd.coefficients)
    for (std::size_t i = (c.x - 1) * c.s; i < c.x * c.s; ++i)
      for (std::size_t j = (c.y - 1) * c.s; j < c.y * c.s; ++j) via_coeffs.at(i, j) += alpha;

  std::set<ComponentId> members(j_set.begin(), j_set.end());
  std::vector<std::size_t> scales;
  for (std::size_t s = 1; s <= n; s *= 2) scales.push_back(s);

  double max_diff = 0.0;
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < n; ++j) {
      double direct = 0.0;
      // Smallest-scale member covering (i, j); same-scale supports are
      // disjoint so the covering block at each scale is unique.
      for (std::size_t s : scales) {
        const ComponentId c{s, i / s + 1, j / s + 1};
        if (members.count(c)) {
          direct = mu_star(a_dense, c);
          break;
        }
      }
      max_diff = std::max(max_diff, std::abs(direct - via_coeffs.at(i, j)));
    }
  return max_diff;
}

void dump_plan_csv(const Plan& plan, std::ostream& out) {
  out.precision(17);
  for (const PlanEntry& e : plan.entries)
    out << e.id.s << ',' << e.id.x << ',' << e.id.y << ',' << e.logit << ',' << e.mu << '\n';
}

}  // namespace mra
