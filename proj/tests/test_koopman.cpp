//
// Project kinlab - Copyright 2026 the kinlab authors.
// SPDX-License-Identifier: Apache-2.0
//

#include <catch2/catch_amalgamated.hpp>
#include <cstdio>
#include <filesystem>

#include "kinlab/generators.hpp"
#include "kinlab/koopman.hpp"
#include "kinlab/rng.hpp"

using namespace kinlab;

namespace {

FeatureSeries make_series(const Eigen::MatrixXd &values) {
  FeatureSeries s;
  s.values = values;
  return s;
}

FeatureSeries random_series(Eigen::Index frames, Eigen::Index dim,
                            std::uint64_t seed) {
  Rng rng(seed);
  Eigen::MatrixXd v(frames, dim);
  for (Eigen::Index t = 0; t < frames; ++t)
    for (Eigen::Index c = 0; c < dim; ++c) v(t, c) = rng.next_normal();
  return make_series(v);
}

FeatureSeries alternating_series(Eigen::Index frames) {
  Eigen::MatrixXd v(frames, 1);
  for (Eigen::Index t = 0; t < frames; ++t) v(t, 0) = (t % 2 == 0) ? 1 : -1;
  return make_series(v);
}

FeatureSeries markov_series(double p, std::int64_t length,
                            std::uint64_t seed) {
  MarkovSpec spec;
  spec.transition.resize(2, 2);
  spec.transition << 1 - p, p, p, 1 - p;
  spec.length = length;
  spec.seed = seed;
  return sample_markov(spec);
}

/// 500 two-frame trajectories with identical frames: exact identity
/// dynamics in d dimensions.
std::vector<FeatureSeries> identity_dynamics(Eigen::Index dim,
                                             std::uint64_t seed) {
  Rng rng(seed);
  std::vector<FeatureSeries> out;
  for (int s = 0; s < 500; ++s) {
    Eigen::MatrixXd v(2, dim);
    for (Eigen::Index c = 0; c < dim; ++c) {
      v(0, c) = rng.next_normal();
      v(1, c) = v(0, c);
    }
    out.push_back(make_series(v));
  }
  return out;
}

}  // namespace

TEST_CASE("covariances: constant series gives zero matrices") {
  FeatureSeries s = make_series(Eigen::MatrixXd::Constant(50, 2, 3.25));
  CovarianceSet cov = estimate_covariances(s, LagSpec{1});
  CHECK(cov.c00.cwiseAbs().maxCoeff() == 0.0);
  CHECK(cov.c01.cwiseAbs().maxCoeff() == 0.0);
  CHECK(cov.c11.cwiseAbs().maxCoeff() == 0.0);
  CHECK(cov.n_pairs == 49);
}

TEST_CASE("covariances: alternating series closed form") {
  CovarianceSet cov = estimate_covariances(alternating_series(10000),
                                           LagSpec{1});
  CHECK(cov.c00(0, 0) == Catch::Approx(1.0).margin(1e-3));
  CHECK(cov.c11(0, 0) == Catch::Approx(1.0).margin(1e-3));
  CHECK(cov.c01(0, 0) == Catch::Approx(-1.0).margin(1e-3));
}

TEST_CASE("covariances: match an explicit pair-sum oracle") {
  FeatureSeries a = random_series(37, 3, 1);
  FeatureSeries b = random_series(23, 3, 2);
  const Eigen::Index tau = 4;
  CovarianceSet cov = estimate_covariances({a, b}, LagSpec{tau});
  CHECK(cov.n_pairs == (37 - tau) + (23 - tau));

  // Direct evaluation of the defining sums over within-trajectory pairs.
  Eigen::VectorXd mu0 = Eigen::VectorXd::Zero(3), mu1 = mu0;
  double n = static_cast<double>(cov.n_pairs);
  for (const auto &s : {a, b}) {
    for (Eigen::Index t = 0; t + tau < s.n_frames(); ++t) {
      mu0 += s.values.row(t).transpose() / n;
      mu1 += s.values.row(t + tau).transpose() / n;
    }
  }
  Eigen::MatrixXd c00 = Eigen::MatrixXd::Zero(3, 3), c01 = c00, c11 = c00;
  for (const auto &s : {a, b}) {
    for (Eigen::Index t = 0; t + tau < s.n_frames(); ++t) {
      Eigen::VectorXd x0 = s.values.row(t).transpose() - mu0;
      Eigen::VectorXd x1 = s.values.row(t + tau).transpose() - mu1;
      c00 += x0 * x0.transpose() / n;
      c01 += x0 * x1.transpose() / n;
      c11 += x1 * x1.transpose() / n;
    }
  }
  CHECK((cov.mu0 - mu0).cwiseAbs().maxCoeff() <= 1e-12);
  CHECK((cov.mu1 - mu1).cwiseAbs().maxCoeff() <= 1e-12);
  CHECK((cov.c00 - c00).cwiseAbs().maxCoeff() <= 1e-12);
  CHECK((cov.c01 - c01).cwiseAbs().maxCoeff() <= 1e-12);
  CHECK((cov.c11 - c11).cwiseAbs().maxCoeff() <= 1e-12);
}

TEST_CASE("covariances: no pairs cross trajectory boundaries") {
  FeatureSeries a = random_series(20, 2, 3);
  FeatureSeries b = random_series(20, 2, 4);
  FeatureSeries joined;
  joined.values.resize(40, 2);
  joined.values << a.values, b.values;
  CovarianceSet split = estimate_covariances({a, b}, LagSpec{1});
  CovarianceSet naive = estimate_covariances(joined, LagSpec{1});
  CHECK(split.n_pairs == 38);
  CHECK(naive.n_pairs == 39);  // includes the one cross-boundary pair
  CHECK((split.c01 - naive.c01).cwiseAbs().maxCoeff() > 1e-6);
}

TEST_CASE("covariances: lag too large is rejected") {
  FeatureSeries s = random_series(5, 2, 5);
  CHECK_THROWS_MATCHES(estimate_covariances(s, LagSpec{5}), Error,
                       Catch::Matchers::MessageMatches(
                           Catch::Matchers::ContainsSubstring("LagTooLarge")));
}

TEST_CASE("inv_sqrt: identity and diagonal cases") {
  InvSqrt id = inv_sqrt(Eigen::MatrixXd::Identity(4, 4));
  CHECK(id.rank == 4);
  CHECK((id.factor * id.factor.transpose() -
         Eigen::MatrixXd::Identity(4, 4))
            .cwiseAbs()
            .maxCoeff() <= 1e-12);

  Eigen::MatrixXd d = Eigen::Vector2d(4.0, 9.0).asDiagonal();
  InvSqrt isq = inv_sqrt(d);
  Eigen::MatrixXd half_inv = isq.factor * isq.factor.transpose();
  CHECK(half_inv(0, 0) == Catch::Approx(0.25).margin(1e-12));
  CHECK(half_inv(1, 1) == Catch::Approx(1.0 / 9.0).margin(1e-12));
  CHECK(std::abs(half_inv(0, 1)) <= 1e-12);
}

TEST_CASE("inv_sqrt: F^T m F is the identity on the retained subspace") {
  Rng rng(6);
  for (int rep = 0; rep < 10; ++rep) {
    auto k = static_cast<Eigen::Index>(2 + rng.next_below(30));
    Eigen::MatrixXd a(k, k);
    for (Eigen::Index r = 0; r < k; ++r)
      for (Eigen::Index c = 0; c < k; ++c) a(r, c) = rng.next_normal();
    Eigen::MatrixXd m = a.transpose() * a;
    InvSqrt isq = inv_sqrt(m);
    Eigen::MatrixXd gram = isq.factor.transpose() * m * isq.factor;
    CHECK((gram - Eigen::MatrixXd::Identity(isq.rank, isq.rank))
              .cwiseAbs()
              .maxCoeff() <= 1e-10);
  }
}

TEST_CASE("inv_sqrt: rank deficiency and degenerate inputs") {
  Eigen::MatrixXd rank1 = Eigen::MatrixXd::Zero(3, 3);
  rank1(0, 0) = 2.0;
  InvSqrt isq = inv_sqrt(rank1);
  CHECK(isq.rank == 1);
  CHECK_THROWS_MATCHES(inv_sqrt(Eigen::MatrixXd::Zero(3, 3)), Error,
                       Catch::Matchers::MessageMatches(
                           Catch::Matchers::ContainsSubstring("RankZero")));
  Eigen::MatrixXd asym(2, 2);
  asym << 1, 1, 0, 1;
  CHECK_THROWS_AS(inv_sqrt(asym), Error);
}

TEST_CASE("koopman_matrix: identity, scalar, and zero cases") {
  CovarianceSet cov = estimate_covariances(random_series(5000, 3, 7),
                                           LagSpec{1});
  CovarianceSet same = cov;
  same.c01 = same.c00;
  Eigen::MatrixXd k = koopman_matrix(same);
  CHECK((k - Eigen::MatrixXd::Identity(3, 3)).cwiseAbs().maxCoeff() <= 1e-8);

  CovarianceSet alt = estimate_covariances(alternating_series(10000),
                                           LagSpec{1});
  CHECK(koopman_matrix(alt)(0, 0) == Catch::Approx(-1.0).margin(1e-3));

  CovarianceSet zero = cov;
  zero.c01.setZero();
  CHECK(koopman_matrix(zero).cwiseAbs().maxCoeff() == 0.0);
}

TEST_CASE("half_weighted: identity dynamics saturates every singular value") {
  KoopmanModel model = half_weighted(
      estimate_covariances(identity_dynamics(3, 8), LagSpec{1}));
  REQUIRE(model.rank() == 3);
  for (Eigen::Index i = 0; i < 3; ++i)
    CHECK(model.singular_values[i] == Catch::Approx(1.0).margin(1e-9));
  CHECK(vamp2_score(model) == Catch::Approx(4.0).margin(1e-8));
}

TEST_CASE("half_weighted: alternating series has a single unit value") {
  KoopmanModel model = half_weighted(
      estimate_covariances(alternating_series(10000), LagSpec{1}));
  REQUIRE(model.rank() == 1);
  CHECK(model.singular_values[0] == Catch::Approx(1.0).margin(1e-6));
}

TEST_CASE("half_weighted: iid noise scores at the floor") {
  KoopmanModel model = half_weighted(
      estimate_covariances(random_series(1000000, 3, 9), LagSpec{1}));
  for (Eigen::Index i = 0; i < model.rank(); ++i)
    CHECK(model.singular_values[i] <= 0.01);
  CHECK(vamp2_score(model) == Catch::Approx(1.0).margin(0.05));
}

TEST_CASE("half_weighted: SVD reconstruction and sign convention") {
  KoopmanModel model = half_weighted(
      estimate_covariances(markov_series(0.1, 100000, 10), LagSpec{1}));
  Eigen::MatrixXd rebuilt =
      model.u * model.singular_values_preclip.asDiagonal() *
      model.v.transpose();
  CHECK((rebuilt - model.kbar).cwiseAbs().maxCoeff() <= 1e-10);
  for (Eigen::Index i = 0; i < model.u.cols(); ++i) {
    Eigen::Index argmax = 0;
    model.u.col(i).cwiseAbs().maxCoeff(&argmax);
    CHECK(model.u(argmax, i) > 0.0);
  }
}

TEST_CASE("vamp2_score: markov chain eigenvalue oracle") {
  // 2-state symmetric chain: second transition-matrix eigenvalue is
  // 1 - 2p = 0.8, so the score is 1 + 0.8^2 = 1.64.
  KoopmanModel model = half_weighted(
      estimate_covariances(markov_series(0.1, 1000000, 11), LagSpec{1}));
  CHECK(vamp2_score(model) == Catch::Approx(1.64).margin(0.01));
  CHECK(vamp2_score_raw(model) == Catch::Approx(0.64).margin(0.01));
}

TEST_CASE("estimator consistency: error shrinks like 1/sqrt(T)") {
  auto sigma_error = [](std::int64_t length) {
    KoopmanModel model = half_weighted(
        estimate_covariances(markov_series(0.1, length, 12), LagSpec{1}));
    return std::abs(model.singular_values[0] - 0.8);
  };
  double err_small = sigma_error(10000);
  double err_large = sigma_error(1000000);
  CHECK(err_small < 0.05);
  CHECK(err_large < 0.005);
}

TEST_CASE("score bounds hold across random feature series") {
  Rng rng(13);
  for (int rep = 0; rep < 20; ++rep) {
    auto frames = static_cast<Eigen::Index>(50 + rng.next_below(400));
    auto dim = static_cast<Eigen::Index>(1 + rng.next_below(6));
    KoopmanModel model = half_weighted(estimate_covariances(
        random_series(frames, dim, 100 + static_cast<std::uint64_t>(rep)),
        LagSpec{1}));
    double score = vamp2_score(model);
    CHECK(score >= 1.0);
    CHECK(score <= static_cast<double>(model.rank()) + 1.0 + 1e-12);
  }
}

TEST_CASE("affine feature maps leave singular values unchanged") {
  FeatureSeries s = random_series(20000, 4, 14);
  // Slightly correlated dynamics so the values are not all near zero.
  for (Eigen::Index t = 1; t < s.n_frames(); ++t)
    s.values.row(t) = 0.5 * s.values.row(t - 1) + s.values.row(t);
  KoopmanModel base = half_weighted(estimate_covariances(s, LagSpec{1}));

  Rng rng(15);
  Eigen::MatrixXd a(4, 4);
  for (Eigen::Index r = 0; r < 4; ++r)
    for (Eigen::Index c = 0; c < 4; ++c) a(r, c) = rng.next_normal();
  a += 4.0 * Eigen::MatrixXd::Identity(4, 4);  // comfortably invertible
  FeatureSeries mapped = s;
  mapped.values = (s.values * a.transpose()).rowwise() +
                  Eigen::RowVector4d(1, -2, 3, 0.5);
  KoopmanModel moved = half_weighted(estimate_covariances(mapped,
                                                          LagSpec{1}));
  REQUIRE(moved.rank() == base.rank());
  CHECK((moved.singular_values - base.singular_values).cwiseAbs()
            .maxCoeff() <= 1e-8);
}

TEST_CASE("singular_functions: psi is whitened and separates Markov states") {
  FeatureSeries s = markov_series(0.1, 200000, 16);
  LagSpec lag{1};
  KoopmanModel model = half_weighted(estimate_covariances(s, lag));
  ProjectedSeries proj = singular_functions(model, s, lag);
  REQUIRE(proj.psi.rows() == s.n_frames() - 1);

  Eigen::MatrixXd centered =
      proj.psi.rowwise() - proj.psi.colwise().mean();
  Eigen::MatrixXd psi_cov = centered.transpose() * centered /
                            static_cast<double>(proj.psi.rows());
  CHECK((psi_cov - Eigen::MatrixXd::Identity(model.rank(), model.rank()))
            .cwiseAbs()
            .maxCoeff() <= 0.05);

  // Within-state spread of psi_1 must be tiny next to the state gap.
  std::vector<double> state0, state1;
  for (Eigen::Index t = 0; t + 1 < s.n_frames(); ++t)
    (s.values(t, 0) == 1.0 ? state0 : state1).push_back(proj.psi(t, 0));
  auto mean_of = [](const std::vector<double> &v) {
    double m = 0.0;
    for (double x : v) m += x;
    return m / static_cast<double>(v.size());
  };
  auto std_of = [&](const std::vector<double> &v) {
    double m = mean_of(v), ss = 0.0;
    for (double x : v) ss += (x - m) * (x - m);
    return std::sqrt(ss / static_cast<double>(v.size()));
  };
  double gap = std::abs(mean_of(state0) - mean_of(state1));
  CHECK(std_of(state0) <= 0.01 * gap);
  CHECK(std_of(state1) <= 0.01 * gap);
}

TEST_CASE("singular_functions: dimension mismatch is rejected") {
  FeatureSeries s = markov_series(0.1, 1000, 17);
  KoopmanModel model = half_weighted(estimate_covariances(s, LagSpec{1}));
  FeatureSeries wrong = random_series(100, 3, 18);
  CHECK_THROWS_AS(singular_functions(model, wrong, LagSpec{1}), Error);
}

TEST_CASE("linear_vamp: full rank equals the full model score") {
  FeatureSeries s = markov_series(0.1, 100000, 19);
  KoopmanModel full = half_weighted(estimate_covariances(s, LagSpec{1}));
  LinearVampResult lv = linear_vamp({s}, LagSpec{1}, full.rank());
  CHECK(lv.score == Catch::Approx(vamp2_score(full)).margin(1e-12));
}

TEST_CASE("linear_vamp: d = 1 on the Markov chain") {
  FeatureSeries s = markov_series(0.1, 1000000, 20);
  LinearVampResult lv = linear_vamp({s}, LagSpec{1}, 1);
  CHECK(lv.score == Catch::Approx(1.64).margin(0.01));
  CHECK(lv.projection.psi.cols() == 1);
}

TEST_CASE("linear_vamp: re-estimating on the projection is idempotent") {
  // Reversible chain: the projected series carries the same top singular
  // value as the original features.
  FeatureSeries s = markov_series(0.1, 200000, 21);
  LagSpec lag{1};
  LinearVampResult lv = linear_vamp({s}, lag, 1);

  FeatureSeries projected;
  projected.values = (s.values.rowwise() - lv.model.cov.mu0.transpose()) *
                     (lv.model.f0 * lv.model.u.leftCols(1));
  KoopmanModel again = half_weighted(estimate_covariances(projected, lag));
  CHECK(again.singular_values[0] ==
        Catch::Approx(lv.model.singular_values[0]).margin(1e-6));
}

TEST_CASE("linear_vamp: oversized d is rejected") {
  FeatureSeries s = markov_series(0.1, 10000, 22);
  CHECK_THROWS_AS(linear_vamp({s}, LagSpec{1}, 5), Error);
}

TEST_CASE("KPM1 round trip preserves the model bit for bit") {
  KoopmanModel model = half_weighted(
      estimate_covariances(markov_series(0.1, 50000, 23), LagSpec{1}));
  auto path = (std::filesystem::temp_directory_path() /
               "kinlab_test_model.kpm")
                  .string();
  save_koopman(model, path);
  KoopmanModel back = load_koopman(path);
  CHECK(back.singular_values == model.singular_values);
  CHECK(back.kbar == model.kbar);
  CHECK(back.f0 == model.f0);
  CHECK(back.u == model.u);
  CHECK(back.cov.c01 == model.cov.c01);
  CHECK(back.cov.mu0 == model.cov.mu0);
  std::remove(path.c_str());
}
