//
// Project kinlab - Copyright 2026 the kinlab authors.
// SPDX-License-Identifier: Apache-2.0
//

#ifndef KINLAB_KOOPMAN_HPP
#define KINLAB_KOOPMAN_HPP

#include <Eigen/Dense>
#include <Eigen/SVD>
#include <algorithm>
#include <fstream>
#include <string>
#include <vector>

#include "kinlab/covariance.hpp"
#include "kinlab/error.hpp"
#include "kinlab/linalg.hpp"
#include "kinlab/trajectory.hpp"

namespace kinlab {

/// Half-weighted Koopman matrix Kbar = C00^{-1/2} C01 C11^{-1/2} with its
/// SVD. Singular values are clipped to [0, 1]; the pre-clip values are kept
/// for diagnostics. Sign convention: the largest-magnitude entry of each
/// left singular vector is positive.
struct KoopmanModel {
  CovarianceSet cov;
  Eigen::MatrixXd f0, f1;        // truncated half-inverse factors, k x r
  Eigen::MatrixXd kbar;          // r0 x r1
  Eigen::MatrixXd u, v;          // thin SVD factors
  Eigen::VectorXd singular_values;          // clipped, descending
  Eigen::VectorXd singular_values_preclip;  // raw SVD output
  double rank_epsilon = 1e-6;

  Eigen::Index rank() const { return singular_values.size(); }
};

/// K = pinv(C00) C01, with the same rank truncation as inv_sqrt.
inline Eigen::MatrixXd koopman_matrix(const CovarianceSet &cov,
                                      double rank_epsilon = 1e-6) {
  return pseudo_inverse(inv_sqrt(cov.c00, rank_epsilon)) * cov.c01;
}

inline KoopmanModel half_weighted(const CovarianceSet &cov,
                                  double rank_epsilon = 1e-6) {
  KoopmanModel model;
  model.cov = cov;
  model.rank_epsilon = rank_epsilon;
  InvSqrt i0 = inv_sqrt(cov.c00, rank_epsilon);
  InvSqrt i1 = inv_sqrt(cov.c11, rank_epsilon);
  model.f0 = i0.factor;
  model.f1 = i1.factor;
  model.kbar = model.f0.transpose() * cov.c01 * model.f1;

  Eigen::JacobiSVD<Eigen::MatrixXd> svd(
      model.kbar, Eigen::ComputeThinU | Eigen::ComputeThinV);
  model.u = svd.matrixU();
  model.v = svd.matrixV();
  model.singular_values_preclip = svd.singularValues();
  for (Eigen::Index i = 0; i < model.u.cols(); ++i) {
    Eigen::Index argmax = 0;
    model.u.col(i).cwiseAbs().maxCoeff(&argmax);
    if (model.u(argmax, i) < 0.0) {
      model.u.col(i) *= -1.0;
      model.v.col(i) *= -1.0;
    }
  }
  model.singular_values = model.singular_values_preclip.cwiseMin(1.0);
  return model;
}

/// VAMP-2 score with the constant-mode convention: 1 + sum sigma_i^2,
/// so the equilibrium floor is 1 and the ceiling is rank + 1.
inline double vamp2_score(const KoopmanModel &model) {
  return 1.0 + model.singular_values.squaredNorm();
}

/// Same score without the constant mode.
inline double vamp2_score_raw(const KoopmanModel &model) {
  return model.singular_values.squaredNorm();
}

/// Left/right singular functions of one series under the model:
/// psi(t) = U^T F0^T (chi(t) - mu0) for t in [0, T - tau),
/// phi(t) = V^T F1^T (chi(t) - mu1) for t in [tau, T).
struct ProjectedSeries {
  Eigen::MatrixXd psi;  // (T - tau) x d
  Eigen::MatrixXd phi;  // (T - tau) x d
  Eigen::Index tau = 0;
};

inline ProjectedSeries singular_functions(const KoopmanModel &model,
                                          const FeatureSeries &series,
                                          const LagSpec &lag) {
  if (series.dim() != model.cov.k)
    throw Error("ShapeMismatch", "series dimension differs from model");
  if (series.n_frames() <= lag.tau)
    throw Error("LagTooLarge", "series shorter than lag + 1");
  const Eigen::Index pairs = series.n_frames() - lag.tau;
  Eigen::MatrixXd x0 =
      series.values.topRows(pairs).rowwise() - model.cov.mu0.transpose();
  Eigen::MatrixXd x1 =
      series.values.bottomRows(pairs).rowwise() - model.cov.mu1.transpose();
  ProjectedSeries out;
  out.tau = lag.tau;
  out.psi = x0 * model.f0 * model.u;
  out.phi = x1 * model.f1 * model.v;
  return out;
}

/// Closed-form linear kinetic model (TICA / linear VAMP): keep the top d
/// singular triplets of Kbar.
struct LinearVampResult {
  KoopmanModel model;
  ProjectedSeries projection;  // top-d singular functions
  double score = 0.0;          // 1 + sum_{i<d} sigma_i^2
  Eigen::Index d = 0;
};

inline LinearVampResult linear_vamp(const std::vector<FeatureSeries> &series,
                                    const LagSpec &lag, Eigen::Index d,
                                    double rank_epsilon = 1e-6) {
  LinearVampResult out;
  out.model = half_weighted(estimate_covariances(series, lag), rank_epsilon);
  if (d < 1 || d > out.model.rank())
    throw Error("InvalidSpec",
                "d = " + std::to_string(d) + " exceeds retained rank " +
                    std::to_string(out.model.rank()));
  out.d = d;
  out.score = 1.0 + out.model.singular_values.head(d).squaredNorm();
  ProjectedSeries proj =
      singular_functions(out.model, series.front(), lag);
  out.projection.tau = lag.tau;
  out.projection.psi = proj.psi.leftCols(d);
  out.projection.phi = proj.phi.leftCols(d);
  return out;
}

/// KPM1 model blob: magic, u64 dims (k, r0, r1, rank), then mu0, mu1, c00,
/// c01, c11, f0, f1, kbar, u, s, s_preclip, v as f64 LE (column-major).
inline void save_koopman(const KoopmanModel &model, const std::string &path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error("IoFailure", "cannot open '" + path + "' for write");
  out.write("KPM1", 4);
  auto put_u64 = [&](std::uint64_t v) {
    out.write(reinterpret_cast<const char *>(&v), 8);
  };
  put_u64(static_cast<std::uint64_t>(model.cov.k));
  put_u64(static_cast<std::uint64_t>(model.f0.cols()));
  put_u64(static_cast<std::uint64_t>(model.f1.cols()));
  put_u64(static_cast<std::uint64_t>(model.rank()));
  out.write(reinterpret_cast<const char *>(&model.rank_epsilon), 8);
  auto put = [&](const Eigen::MatrixXd &m) {
    out.write(reinterpret_cast<const char *>(m.data()),
              static_cast<std::streamsize>(m.size() * 8));
  };
  put(model.cov.mu0);
  put(model.cov.mu1);
  put(model.cov.c00);
  put(model.cov.c01);
  put(model.cov.c11);
  put(model.f0);
  put(model.f1);
  put(model.kbar);
  put(model.u);
  put(model.singular_values);
  put(model.singular_values_preclip);
  put(model.v);
  if (!out) throw Error("IoFailure", "short write to '" + path + "'");
}

inline KoopmanModel load_koopman(const std::string &path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error("IoFailure", "cannot open '" + path + "'");
  char magic[4];
  in.read(magic, 4);
  if (!in || std::string(magic, 4) != "KPM1")
    throw Error("BadMagic", "not a KPM1 file");
  auto get_u64 = [&]() {
    std::uint64_t v = 0;
    in.read(reinterpret_cast<char *>(&v), 8);
    if (!in) throw Error("Truncated", "KPM1 header ends early");
    return v;
  };
  const auto k = static_cast<Eigen::Index>(get_u64());
  const auto r0 = static_cast<Eigen::Index>(get_u64());
  const auto r1 = static_cast<Eigen::Index>(get_u64());
  const auto rank = static_cast<Eigen::Index>(get_u64());
  KoopmanModel model;
  in.read(reinterpret_cast<char *>(&model.rank_epsilon), 8);
  auto get = [&](Eigen::MatrixXd &m, Eigen::Index rows, Eigen::Index cols) {
    m.resize(rows, cols);
    in.read(reinterpret_cast<char *>(m.data()),
            static_cast<std::streamsize>(m.size() * 8));
    if (!in) throw Error("Truncated", "KPM1 payload ends early");
  };
  Eigen::MatrixXd tmp;
  model.cov.k = k;
  get(tmp, k, 1);
  model.cov.mu0 = tmp;
  get(tmp, k, 1);
  model.cov.mu1 = tmp;
  get(model.cov.c00, k, k);
  get(model.cov.c01, k, k);
  get(model.cov.c11, k, k);
  get(model.f0, k, r0);
  get(model.f1, k, r1);
  get(model.kbar, r0, r1);
  get(model.u, r0, rank);
  get(tmp, rank, 1);
  model.singular_values = tmp;
  get(tmp, rank, 1);
  model.singular_values_preclip = tmp;
  get(model.v, r1, rank);
  return model;
}

}  // namespace kinlab

#endif  // KINLAB_KOOPMAN_HPP
