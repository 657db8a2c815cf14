#include "mra/baselines.hpp"

#include <Eigen/Dense>
#include <Eigen/SVD>

#include <algorithm>
#include <cmath>
#include <numeric>
#include <stdexcept>

#include "mra/attention.hpp"

namespace mra {

namespace {

Eigen::MatrixXd to_eigen(const DenseMatrix& m) {
  Eigen::MatrixXd out(m.rows, m.cols);
  for (std::size_t i = 0; i < m.rows; ++i)
    for (std::size_t j = 0; j < m.cols; ++j) out(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) = m.at(i, j);
  return out;
}

DenseMatrix from_eigen(const Eigen::MatrixXd& m) {
  DenseMatrix out(static_cast<std::size_t>(m.rows()), static_cast<std::size_t>(m.cols()), Dtype::f64);
  for (Eigen::Index i = 0; i < m.rows(); ++i)
    for (Eigen::Index j = 0; j < m.cols(); ++j)
      out.at(static_cast<std::size_t>(i), static_cast<std::size_t>(j)) = m(i, j);
  return out;
}

}  // namespace

BaselineApprox lowrank_svd(const DenseMatrix& A, std::size_t k) {
  if (k < 1 || k > std::min(A.rows, A.cols))
    throw std::invalid_argument("lowrank_svd: rank out of range");
  Eigen::MatrixXd m = to_eigen(A);
  Eigen::BDCSVD<Eigen::MatrixXd> svd(m, Eigen::ComputeThinU | Eigen::ComputeThinV);
  const Eigen::Index kk = static_cast<Eigen::Index>(k);
  Eigen::MatrixXd approx = svd.matrixU().leftCols(kk) *
                           svd.singularValues().head(kk).asDiagonal() *
                           svd.matrixV().leftCols(kk).transpose();
  BaselineApprox out;
  out.approx = from_eigen(approx);
  out.rel_error = relative_error(out.approx, A);
  return out;
}

BaselineApprox topk_sparse(const DenseMatrix& A, std::size_t k) {
  if (k > A.size()) throw std::invalid_argument("topk_sparse: k exceeds entry count");
  std::vector<std::size_t> order(A.size());
  std::iota(order.begin(), order.end(), 0);
  std::sort(order.begin(), order.end(), [&](std::size_t i, std::size_t j) {
    const double ai = std::abs(A.data[i]), aj = std::abs(A.data[j]);
    if (ai != aj) return ai > aj;
    return i < j;
  });
  BaselineApprox out;
  out.approx = DenseMatrix(A.rows, A.cols, Dtype::f64);
  for (std::size_t i = 0; i < k; ++i) out.approx.data[order[i]] = A.data[order[i]];
  out.rel_error = relative_error(out.approx, A);
  return out;
}

RpcaBlockSolution rpca_block_solution(const DenseMatrix& p_dense, std::size_t b, std::size_t m) {
  if (p_dense.rows != p_dense.cols)
    throw std::invalid_argument("rpca_block_solution: P must be square");
  const std::size_t n = p_dense.rows;
  if (b == 0 || n % b != 0) throw std::invalid_argument("rpca_block_solution: b must divide n");
  const std::size_t nb = n / b;
  m = std::min(m, nb * nb);

  RpcaBlockSolution out;
  out.mu_prime.resize(nb * nb);
  out.mu_sq.resize(nb * nb);
  const double block_count = static_cast<double>(b) * static_cast<double>(b);
  for (std::size_t x = 0; x < nb; ++x)
    for (std::size_t y = 0; y < nb; ++y) {
      double exp2_sum = 0.0, mean = 0.0;
      for (std::size_t i = x * b; i < (x + 1) * b; ++i)
        for (std::size_t j = y * b; j < (y + 1) * b; ++j) {
          exp2_sum += std::exp(2.0 * p_dense.at(i, j));
          mean += p_dense.at(i, j);
        }
      out.mu_prime[x * nb + y] = exp2_sum / block_count;
      const double mu = std::exp(mean / block_count);
      out.mu_sq[x * nb + y] = mu * mu;
    }

  auto top_m = [&](const std::vector<double>& scores) {
    std::vector<std::size_t> order(scores.size());
    std::iota(order.begin(), order.end(), 0);
    std::sort(order.begin(), order.end(), [&](std::size_t i, std::size_t j) {
      if (scores[i] != scores[j]) return scores[i] > scores[j];
      return i < j;  // ascending (x, y) block-row-major
    });
    order.resize(m);
    return order;
  };
  const std::vector<std::size_t> exact_top = top_m(out.mu_prime);
  const std::vector<std::size_t> proxy_top = top_m(out.mu_sq);
  std::vector<unsigned char> in_proxy(nb * nb, 0);
  for (std::size_t idx : proxy_top) in_proxy[idx] = 1;
  for (std::size_t idx : exact_top)
    if (in_proxy[idx]) ++out.proxy_agreement;

  out.S_dense = DenseMatrix(n, n, Dtype::f64);
  double l_norm_sq = 0.0;
  std::vector<unsigned char> kept(nb * nb, 0);
  for (std::size_t idx : exact_top) {
    kept[idx] = 1;
    out.S_support.push_back({b, idx / nb + 1, idx % nb + 1});
  }
  for (std::size_t x = 0; x < nb; ++x)
    for (std::size_t y = 0; y < nb; ++y)
      for (std::size_t i = x * b; i < (x + 1) * b; ++i)
        for (std::size_t j = y * b; j < (y + 1) * b; ++j) {
          const double a_ij = std::exp(p_dense.at(i, j));
          if (kept[x * nb + y])
            out.S_dense.at(i, j) = a_ij;
          else
            l_norm_sq += a_ij * a_ij;
        }
  out.L_norm = std::sqrt(l_norm_sq);
  return out;
}

CoarseLowrank coarse_lowrank(const DenseMatrix& p_dense, std::size_t b) {
  if (p_dense.rows != p_dense.cols) throw std::invalid_argument("coarse_lowrank: P must be square");
  const std::size_t n = p_dense.rows;
  if (b == 0 || n % b != 0) throw std::invalid_argument("coarse_lowrank: b must divide n");
  const std::size_t nb = n / b;

  CoarseLowrank out;
  out.A_b = DenseMatrix(n, n, Dtype::f64);
  const double block_count = static_cast<double>(b) * static_cast<double>(b);
  for (std::size_t x = 0; x < nb; ++x)
    for (std::size_t y = 0; y < nb; ++y) {
      double mean = 0.0;
      for (std::size_t i = x * b; i < (x + 1) * b; ++i)
        for (std::size_t j = y * b; j < (y + 1) * b; ++j) mean += p_dense.at(i, j);
      const double mu = std::exp(mean / block_count);
      for (std::size_t i = x * b; i < (x + 1) * b; ++i)
        for (std::size_t j = y * b; j < (y + 1) * b; ++j) out.A_b.at(i, j) = mu;
    }

  Eigen::BDCSVD<Eigen::MatrixXd> svd(to_eigen(out.A_b));
  const Eigen::VectorXd& sv = svd.singularValues();
  out.rank_bound_ok = true;
  for (Eigen::Index i = static_cast<Eigen::Index>(nb); i < sv.size(); ++i)
    if (sv(i) > 1e-10 * sv(0)) out.rank_bound_ok = false;
  return out;
}

}  // namespace mra
