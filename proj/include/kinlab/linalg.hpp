//
// Project kinlab - Copyright 2026 the kinlab authors.
// SPDX-License-Identifier: Apache-2.0
//

#ifndef KINLAB_LINALG_HPP
#define KINLAB_LINALG_HPP

#include <Eigen/Dense>
#include <cmath>
#include <vector>

#include "kinlab/error.hpp"

namespace kinlab {

/// Rank-truncated inverse square root of a symmetric PSD matrix.
/// Eigenpairs with lambda < rank_epsilon * lambda_max are discarded.
struct InvSqrt {
  Eigen::MatrixXd factor;  // k x r, F = V_r diag(lambda_r^{-1/2})
  Eigen::MatrixXd sym;     // k x k, V_r diag(lambda_r^{-1/2}) V_r^T
  Eigen::VectorXd eigenvalues;   // all k, descending
  Eigen::MatrixXd eigenvectors;  // columns matching eigenvalues
  int rank = 0;                  // retained count r
  double rank_epsilon = 0.0;
};

inline InvSqrt inv_sqrt(const Eigen::MatrixXd &m,
                        double rank_epsilon = 1e-6) {
  if (m.rows() != m.cols())
    throw Error("ShapeMismatch", "inv_sqrt needs a square matrix");
  double scale = std::max(1.0, m.cwiseAbs().maxCoeff());
  if ((m - m.transpose()).cwiseAbs().maxCoeff() > 1e-8 * scale)
    throw Error("NotSymmetric", "matrix is not symmetric within tolerance");

  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> solver(
      0.5 * (m + m.transpose()));
  if (solver.info() != Eigen::Success)
    throw Error("NumericalFailure", "eigendecomposition failed");

  const Eigen::Index k = m.rows();
  InvSqrt out;
  out.rank_epsilon = rank_epsilon;
  out.eigenvalues.resize(k);
  out.eigenvectors.resize(k, k);
  // Eigen returns ascending order; store descending.
  for (Eigen::Index i = 0; i < k; ++i) {
    out.eigenvalues[i] = solver.eigenvalues()[k - 1 - i];
    out.eigenvectors.col(i) = solver.eigenvectors().col(k - 1 - i);
  }

  double lambda_max = out.eigenvalues[0];
  if (!(lambda_max > 0.0))
    throw Error("RankZero", "no positive eigenvalues");
  double threshold = rank_epsilon * lambda_max;
  int r = 0;
  while (r < k && out.eigenvalues[r] >= threshold) ++r;
  if (r == 0) throw Error("RankZero", "all eigenvalues below threshold");

  out.rank = r;
  Eigen::VectorXd inv_root =
      out.eigenvalues.head(r).array().rsqrt().matrix();
  out.factor = out.eigenvectors.leftCols(r) * inv_root.asDiagonal();
  out.sym = out.factor * out.eigenvectors.leftCols(r).transpose();
  return out;
}

/// Truncated pseudo-inverse from the same eigendecomposition: F F^T.
inline Eigen::MatrixXd pseudo_inverse(const InvSqrt &isq) {
  return isq.factor * isq.factor.transpose();
}

/// Backward rule for the symmetric inverse square root. Given the
/// decomposition of A and dL/d(sym), returns dL/dA via the Loewner matrix
/// of h(lambda) = lambda^{-1/2} (0 on the truncated subspace).
inline Eigen::MatrixXd inv_sqrt_backward(const InvSqrt &isq,
                                         const Eigen::MatrixXd &grad_sym) {
  const Eigen::Index k = isq.eigenvalues.size();
  auto h = [&](Eigen::Index i) {
    return i < isq.rank ? 1.0 / std::sqrt(isq.eigenvalues[i]) : 0.0;
  };
  auto hprime = [&](Eigen::Index i) {
    return i < isq.rank
               ? -0.5 * std::pow(isq.eigenvalues[i], -1.5)
               : 0.0;
  };
  Eigen::MatrixXd g_sym = 0.5 * (grad_sym + grad_sym.transpose());
  Eigen::MatrixXd inner =
      isq.eigenvectors.transpose() * g_sym * isq.eigenvectors;
  for (Eigen::Index i = 0; i < k; ++i)
    for (Eigen::Index j = 0; j < k; ++j) {
      double li = isq.eigenvalues[i], lj = isq.eigenvalues[j];
      double loewner;
      if (std::abs(li - lj) > 1e-12 * std::max(std::abs(li), 1.0))
        loewner = (h(i) - h(j)) / (li - lj);
      else
        loewner = hprime(i);
      inner(i, j) *= loewner;
    }
  return isq.eigenvectors * inner * isq.eigenvectors.transpose();
}

}  // namespace kinlab

#endif  // KINLAB_LINALG_HPP
