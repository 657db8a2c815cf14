#include "mra/bounds.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <ostream>
#include <stdexcept>

namespace mra {

namespace {

struct BlockStats {
  double min_logit;
  double max_logit;
  double mean_logit;
};

BlockStats block_stats(const DenseMatrix& p, const ComponentId& c) {
  const std::size_t s = c.s;
  double lo = std::numeric_limits<double>::infinity();
  double hi = -lo;
  double sum = 0.0;
  for (std::size_t i = (c.x - 1) * s; i < c.x * s; ++i)
    for (std::size_t j = (c.y - 1) * s; j < c.y * s; ++j) {
      const double v = p.at(i, j);
      lo = std::min(lo, v);
      hi = std::max(hi, v);
      sum += v;
    }
  return {lo, hi, sum / (static_cast<double>(s) * static_cast<double>(s))};
}

double lp_norm(const std::vector<double>& v, double p) {
  if (std::isinf(p)) {
    double m = 0.0;
    for (double x : v) m = std::max(m, std::abs(x));
    return m;
  }
  double acc = 0.0;
  for (double x : v) acc += std::pow(std::abs(x), p);
  return std::pow(acc, 1.0 / p);
}

std::vector<double> matrix_row(const DenseMatrix& m, std::size_t i) {
  std::vector<double> row(m.cols);
  for (std::size_t j = 0; j < m.cols; ++j) row[j] = m.at(i, j);
  return row;
}

std::vector<double> row_diff(const DenseMatrix& m, std::size_t i1, std::size_t i2) {
  std::vector<double> diff(m.cols);
  for (std::size_t j = 0; j < m.cols; ++j) diff[j] = m.at(i1, j) - m.at(i2, j);
  return diff;
}

double conjugate_exponent(double p) {
  if (!(p >= 1.0)) throw std::invalid_argument("norm order must be >= 1");
  if (std::isinf(p)) return 1.0;
  if (p == 1.0) return std::numeric_limits<double>::infinity();
  return p / (p - 1.0);
}

}  // namespace

bool bound_holds(double lhs, double rhs) {
  return lhs <= rhs + 1e-12 * std::max(1.0, rhs);
}

double jensen_gap_constant(double r) {
  if (!(r >= 0.0) || !std::isfinite(r))
    throw std::invalid_argument("jensen_gap_constant: r must be finite and >= 0");
  return 1.0 + std::exp(r) - 2.0 * std::exp(r / 2.0);
}

BoundReport check_block_gap(const DenseMatrix& p_dense, const ComponentId& c, double mu_star_value,
                         double mu_value) {
  const BlockStats stats = block_stats(p_dense, c);
  BoundReport report;
  report.label = "block_gap";
  report.a = stats.min_logit;
  report.r = stats.max_logit - stats.min_logit;
  report.c_r = jensen_gap_constant(report.r);
  report.c_2r = jensen_gap_constant(2.0 * report.r);
  report.lhs = mu_star_value - mu_value;
  report.rhs = report.c_r * mu_value;
  report.holds = bound_holds(report.lhs, report.rhs) && bound_holds(0.0, report.lhs);
  return report;
}

double range_bound(const DenseMatrix& Q, const DenseMatrix& K, const ComponentId& c, double p) {
  const double q = conjugate_exponent(p);
  const std::size_t s = c.s;
  double beta1 = 0.0, beta2 = 0.0;
  for (std::size_t i = (c.x - 1) * s; i < c.x * s; ++i)
    beta1 = std::max(beta1, lp_norm(matrix_row(Q, i), p));
  for (std::size_t j = (c.y - 1) * s; j < c.y * s; ++j)
    beta1 = std::max(beta1, lp_norm(matrix_row(K, j), p));
  for (std::size_t i1 = (c.x - 1) * s; i1 < c.x * s; ++i1)
    for (std::size_t i2 = i1 + 1; i2 < c.x * s; ++i2)
      beta2 = std::max(beta2, lp_norm(row_diff(Q, i1, i2), q));
  for (std::size_t j1 = (c.y - 1) * s; j1 < c.y * s; ++j1)
    for (std::size_t j2 = j1 + 1; j2 < c.y * s; ++j2)
      beta2 = std::max(beta2, lp_norm(row_diff(K, j1, j2), q));
  return 2.0 * beta1 * beta2;
}

BoundReport check_refinement_bound(const DenseMatrix& p_dense, std::size_t b, std::size_t m1) {
  if (p_dense.rows != p_dense.cols) throw std::invalid_argument("check_refinement_bound: P must be square");
  const std::size_t n = p_dense.rows;
  if (b == 0 || n % b != 0) throw std::invalid_argument("check_refinement_bound: b must divide n");
  const std::size_t nb = n / b;
  if (m1 > nb * nb) throw std::invalid_argument("check_refinement_bound: m1 exceeds block count");

  struct Block {
    std::size_t x, y;
    double mu;
    double range;
  };
  std::vector<Block> blocks;
  blocks.reserve(nb * nb);
  double max_range = 0.0;
  for (std::size_t x = 1; x <= nb; ++x)
    for (std::size_t y = 1; y <= nb; ++y) {
      const BlockStats stats = block_stats(p_dense, {b, x, y});
      blocks.push_back({x, y, std::exp(stats.mean_logit), stats.max_logit - stats.min_logit});
      max_range = std::max(max_range, stats.max_logit - stats.min_logit);
    }

  std::vector<std::size_t> order(blocks.size());
  for (std::size_t i = 0; i < order.size(); ++i) order[i] = i;
  std::sort(order.begin(), order.end(), [&](std::size_t i, std::size_t j) {
    if (blocks[i].mu != blocks[j].mu) return blocks[i].mu > blocks[j].mu;
    if (blocks[i].x != blocks[j].x) return blocks[i].x < blocks[j].x;
    return blocks[i].y < blocks[j].y;
  });

  // Measured error of the two-scale greedy plan: refined blocks are exact,
  // unrefined ones approximated by exp of the block mean.
  double err_sq = 0.0, norm_sq = 0.0, exp2_sum = 0.0;
  std::vector<unsigned char> refined(blocks.size(), 0);
  for (std::size_t i = 0; i < m1; ++i) refined[order[i]] = 1;
  for (std::size_t idx = 0; idx < blocks.size(); ++idx) {
    const Block& blk = blocks[idx];
    for (std::size_t i = (blk.x - 1) * b; i < blk.x * b; ++i)
      for (std::size_t j = (blk.y - 1) * b; j < blk.y * b; ++j) {
        const double a_ij = std::exp(p_dense.at(i, j));
        norm_sq += a_ij * a_ij;
        exp2_sum += std::exp(2.0 * p_dense.at(i, j));
        if (!refined[idx]) {
          const double diff = blk.mu - a_ij;
          err_sq += diff * diff;
        }
      }
  }

  BoundReport report;
  report.label = "refinement";
  report.r = max_range;
  report.c_r = jensen_gap_constant(max_range);
  report.c_2r = jensen_gap_constant(2.0 * max_range);
  report.delta = m1 > 0 ? blocks[order[m1 - 1]].mu : blocks[order[0]].mu;
  report.lhs = std::sqrt(err_sq / norm_sq);
  const double remaining = static_cast<double>(n) * static_cast<double>(n) -
                           static_cast<double>(m1) * static_cast<double>(b) * static_cast<double>(b);
  report.rhs = std::sqrt(remaining * report.c_2r * report.delta * report.delta / exp2_sum);
  report.holds = bound_holds(report.lhs, report.rhs);
  return report;
}

BoundReport jensen_gap_check(const std::vector<double>& values) {
  if (values.empty()) throw std::invalid_argument("jensen_gap_check: empty list");
  double lo = values[0], hi = values[0], mean = 0.0, mean_exp = 0.0;
  for (double v : values) {
    lo = std::min(lo, v);
    hi = std::max(hi, v);
    mean += v;
    mean_exp += std::exp(v);
  }
  mean /= static_cast<double>(values.size());
  mean_exp /= static_cast<double>(values.size());

  BoundReport report;
  report.label = "jensen_gap";
  report.a = lo;
  report.r = hi - lo;
  report.c_r = jensen_gap_constant(report.r);
  report.lhs = mean_exp - std::exp(mean);
  report.rhs = std::exp(lo) + std::exp(hi) - 2.0 * std::exp(0.5 * (lo + hi));
  report.holds = bound_holds(report.lhs, report.rhs);
  return report;
}

BoundReport haar_column_bound(const DenseMatrix& Q, const DenseMatrix& K, std::size_t j, double p) {
  const std::size_t n = Q.rows, d = Q.cols;
  if (n % 2 != 0) throw std::invalid_argument("haar_column_bound: n must be even");
  if (K.rows != n || K.cols != d || j >= n)
    throw std::invalid_argument("haar_column_bound: bad inputs");
  const double q = conjugate_exponent(p);
  const double inv_sqrt2 = 1.0 / std::sqrt(2.0);

  double lhs = 0.0, detail_sum = 0.0;
  for (std::size_t i = 0; i < n / 2; ++i) {
    double p_top = 0.0, p_bot = 0.0;
    std::vector<double> q_detail(d);
    for (std::size_t t = 0; t < d; ++t) {
      p_top += Q.at(2 * i, t) * K.at(j, t);
      p_bot += Q.at(2 * i + 1, t) * K.at(j, t);
      q_detail[t] = inv_sqrt2 * (Q.at(2 * i, t) - Q.at(2 * i + 1, t));
    }
    lhs += std::abs(inv_sqrt2 * (p_top - p_bot));
    detail_sum += lp_norm(q_detail, p);
  }

  BoundReport report;
  report.label = "haar_column";
  report.lhs = lhs;
  report.rhs = detail_sum * lp_norm(matrix_row(K, j), q);
  report.holds = bound_holds(report.lhs, report.rhs);
  return report;
}

BoundReport mu_squared_vs_mu_prime(const DenseMatrix& p_dense, const ComponentId& c) {
  const BlockStats stats = block_stats(p_dense, c);
  const std::size_t s = c.s;
  double mean_exp2 = 0.0;
  for (std::size_t i = (c.x - 1) * s; i < c.x * s; ++i)
    for (std::size_t j = (c.y - 1) * s; j < c.y * s; ++j)
      mean_exp2 += std::exp(2.0 * p_dense.at(i, j));
  mean_exp2 /= static_cast<double>(s) * static_cast<double>(s);

  BoundReport report;
  report.label = "mu_sq_vs_mu_prime";
  report.a = stats.min_logit;
  report.r = stats.max_logit - stats.min_logit;
  report.lhs = std::exp(2.0 * stats.mean_logit);
  report.rhs = mean_exp2;
  report.holds = bound_holds(report.lhs, report.rhs);
  return report;
}

void dump_bound_csv(const BoundReport& report, std::ostream& out) {
  out.precision(17);
  out << report.label << ',' << report.r << ',' << report.a << ',' << report.c_r << ','
      << report.c_2r << ',' << report.delta << ',' << report.lhs << ',' << report.rhs << ','
      << (report.holds ? 1 : 0) << '\n';
}

}  // namespace mra
