//
// Project kinlab - Copyright 2026 the kinlab authors.
// SPDX-License-Identifier: Apache-2.0
//
// Acceptance suite: one line per criterion, nonzero exit if any fail.
// Invoke as: acceptance <path-to-kinlab-cli>

#include <sys/wait.h>
#include <unistd.h>

#include <chrono>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <functional>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include "kinlab/checkpoint.hpp"
#include "kinlab/fmb.hpp"
#include "kinlab/generators.hpp"
#include "kinlab/koopman.hpp"
#include "kinlab/pretrain.hpp"
#include "kinlab/scaling.hpp"
#include "kinlab/split.hpp"
#include "kinlab/vamp_head.hpp"
#include "kinlab/xyz.hpp"

namespace fs = std::filesystem;
using namespace kinlab;

namespace {

std::string g_cli;

Eigen::Matrix3d random_rotation(Rng &rng) {
  Eigen::Matrix3d m;
  for (int r = 0; r < 3; ++r)
    for (int c = 0; c < 3; ++c) m(r, c) = rng.next_normal();
  Eigen::HouseholderQR<Eigen::Matrix3d> qr(m);
  Eigen::Matrix3d q = qr.householderQ();
  if (q.determinant() < 0) q.col(0) *= -1.0;
  return q;
}

Eigen::MatrixXd random_matrix(Eigen::Index r, Eigen::Index c, Rng &rng) {
  Eigen::MatrixXd m(r, c);
  for (Eigen::Index i = 0; i < r; ++i)
    for (Eigen::Index j = 0; j < c; ++j) m(i, j) = rng.next_normal();
  return m;
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

// --------------------------------------------------------------------------
// Criterion bodies. Each returns a detail string through `note` and a bool.

bool criterion_markov_oracle(std::string &note) {
  KoopmanModel model = half_weighted(
      estimate_covariances(markov_series(0.1, 1000000, 11), LagSpec{1}));
  double score = vamp2_score(model);
  char buf[96];
  std::snprintf(buf, sizeof(buf), "score %.4f, target 1.64 +/- 0.01", score);
  note = buf;
  return std::abs(score - 1.64) <= 0.01;
}

bool criterion_score_bounds(std::string &note) {
  Rng rng(101);
  int violations = 0;
  const int reps = 200;
  for (int rep = 0; rep < reps; ++rep) {
    Eigen::Index d = 1 + rep % 6;
    Eigen::Index length = 100 + (rep * 37) % 900;
    FeatureSeries series;
    series.values = random_matrix(length, d, rng);
    if (rep % 3 == 1) {
      // Strongly correlated rows push the score toward the ceiling.
      for (Eigen::Index t = 1; t < length; ++t)
        series.values.row(t) =
            0.95 * series.values.row(t - 1) + 0.05 * series.values.row(t);
    }
    // Rank-deficient features (a fully constant series has no score).
    if (rep % 5 == 2 && d >= 2) series.values.col(0).setConstant(1.0);
    double score = vamp2_score(
        half_weighted(estimate_covariances({series}, LagSpec{1})));
    if (!(score >= 1.0 - 1e-9 &&
          score <= static_cast<double>(d) + 1.0 + 1e-9))
      ++violations;
  }
  note = std::to_string(reps) + " random series, " +
         std::to_string(violations) + " bound violations";
  return violations == 0;
}

bool criterion_inv_sqrt(std::string &note) {
  Rng rng(202);
  double worst = 0.0;
  for (int rep = 0; rep < 100; ++rep) {
    Eigen::Index k = 1 + (rep * 64) / 100 + rep % 3;
    k = std::min<Eigen::Index>(k, 64);
    Eigen::MatrixXd r = random_matrix(k, k, rng);
    Eigen::MatrixXd m = r.transpose() * r / static_cast<double>(k) +
                        1e-3 * Eigen::MatrixXd::Identity(k, k);
    InvSqrt isq = inv_sqrt(m);
    Eigen::MatrixXd gram = isq.factor.transpose() * m * isq.factor;
    double err =
        (gram - Eigen::MatrixXd::Identity(isq.rank, isq.rank))
            .cwiseAbs()
            .maxCoeff();
    worst = std::max(worst, err);
  }
  char buf[96];
  std::snprintf(buf, sizeof(buf), "worst |F^T M F - I| = %.2e", worst);
  note = buf;
  return worst <= 1e-10;
}

double fd_descriptor_grads() {
  DescriptorConfig cfg;
  cfg.width = 4;
  cfg.depth = 2;
  cfg.cutoff = 4.0;
  cfg.n_rbf = 4;
  cfg.n_elements = 10;
  DescriptorModel model = init_model(cfg, 21);
  Rng rng(22);
  std::vector<int> z = {1, 6, 8, 6, 1};
  Eigen::MatrixX3d coords(5, 3);
  for (int i = 0; i < 5; ++i)
    for (int c = 0; c < 3; ++c) coords(i, c) = 3.0 * rng.next_double();
  RadiusGraph graph = build_radius_graph(coords, cfg.cutoff);

  Eigen::MatrixXd w_emb = random_matrix(5, cfg.width, rng);
  Eigen::MatrixXd w_noise = random_matrix(5, 3, rng);
  auto objective = [&](const Eigen::VectorXd &theta) {
    DescriptorModel m = model;
    m.params.unflatten(theta);
    ForwardResult out = forward(m, graph, z);
    return (out.embeddings.array() * w_emb.array()).sum() +
           (out.noise_pred.array() * w_noise.array()).sum();
  };

  DescriptorTrace trace;
  forward(model, graph, z, &trace);
  Eigen::VectorXd analytic =
      backward(model, graph, z, trace, w_emb, w_noise).flatten();
  Eigen::VectorXd theta = model.params.flatten();
  const double h = 1e-5;
  double scale = analytic.cwiseAbs().maxCoeff();
  double max_rel = 0.0;
  for (Eigen::Index p = 0; p < theta.size(); ++p) {
    Eigen::VectorXd up = theta, down = theta;
    up[p] += h;
    down[p] -= h;
    double fd = (objective(up) - objective(down)) / (2.0 * h);
    max_rel = std::max(max_rel,
                       std::abs(fd - analytic[p]) /
                           std::max(scale, std::abs(fd)));
  }
  return max_rel;
}

double fd_vamp2_batch_grads() {
  Rng rng(303);
  Eigen::MatrixXd x0 = random_matrix(64, 4, rng);
  Eigen::MatrixXd x1 = 0.6 * x0 + 0.8 * random_matrix(64, 4, rng);
  Vamp2Batch batch = vamp2_loss_and_grad(x0, x1);
  double scale = std::max(batch.grad_instant.cwiseAbs().maxCoeff(),
                          batch.grad_lagged.cwiseAbs().maxCoeff());
  const double h = 1e-5;
  double max_rel = 0.0;
  for (Eigen::Index r = 0; r < 64; ++r)
    for (Eigen::Index c = 0; c < 4; ++c) {
      auto probe = [&](Eigen::MatrixXd &m, double analytic) {
        double save = m(r, c);
        m(r, c) = save + h;
        double up = vamp2_loss_and_grad(x0, x1).loss;
        m(r, c) = save - h;
        double down = vamp2_loss_and_grad(x0, x1).loss;
        m(r, c) = save;
        double fd = (up - down) / (2.0 * h);
        max_rel = std::max(max_rel, std::abs(fd - analytic) /
                                        std::max(scale, std::abs(fd)));
      };
      probe(x0, batch.grad_instant(r, c));
      probe(x1, batch.grad_lagged(r, c));
    }
  return max_rel;
}

double fd_mixer_grads(MixerMode mode, std::uint64_t seed) {
  MixerConfig cfg;
  cfg.mode = mode;
  cfg.token_dim = 3;
  cfg.n_tokens = 4;
  cfg.hidden = 5;
  cfg.out_dim = 2;
  VampHeadModel model = init_vamp_head(cfg, seed);
  Rng rng(seed + 1);
  if (mode == MixerMode::kSelfAttention)
    model.token_bias = 0.3 * random_matrix(cfg.n_tokens, cfg.token_dim, rng);
  Eigen::MatrixXd tokens = random_matrix(cfg.n_tokens, cfg.token_dim, rng);
  Eigen::VectorXd weight = random_matrix(cfg.out_dim, 1, rng).col(0);

  MixerTrace trace;
  mix_tokens(model, tokens, &trace);
  VampHeadModel grads = zero_like(model);
  mix_backward(model, trace, weight, grads);
  Eigen::VectorXd analytic = grads.flatten();
  Eigen::VectorXd theta = model.flatten();
  double scale = analytic.cwiseAbs().maxCoeff();
  const double h = 1e-5;
  double max_rel = 0.0;
  for (Eigen::Index p = 0; p < theta.size(); ++p) {
    auto eval = [&](double delta) {
      Eigen::VectorXd t = theta;
      t[p] += delta;
      VampHeadModel m = model;
      m.unflatten(t);
      return weight.dot(mix_tokens(m, tokens));
    };
    double fd = (eval(h) - eval(-h)) / (2.0 * h);
    max_rel = std::max(max_rel, std::abs(fd - analytic[p]) /
                                    std::max(scale, std::abs(fd)));
  }
  return max_rel;
}

bool criterion_gradients(std::string &note) {
  double worst = fd_descriptor_grads();
  worst = std::max(worst, fd_vamp2_batch_grads());
  worst = std::max(worst, fd_mixer_grads(MixerMode::kSum, 31));
  worst = std::max(worst, fd_mixer_grads(MixerMode::kMlpMixer, 32));
  worst = std::max(worst, fd_mixer_grads(MixerMode::kSelfAttention, 33));
  char buf[96];
  std::snprintf(buf, sizeof(buf), "worst FD relative error %.2e", worst);
  note = buf;
  return worst <= 1e-4;
}

bool criterion_equivariance(std::string &note) {
  DescriptorConfig cfg;
  cfg.width = 6;
  cfg.depth = 2;
  cfg.cutoff = 5.0;
  cfg.n_rbf = 5;
  cfg.n_elements = 10;
  DescriptorModel model = init_model(cfg, 7);
  Rng rng(404);
  std::vector<int> z = {1, 6, 8, 6, 1, 7};
  Eigen::MatrixX3d coords(6, 3);
  for (int i = 0; i < 6; ++i)
    for (int c = 0; c < 3; ++c) coords(i, c) = 4.0 * rng.next_double();
  ForwardResult base =
      forward(model, build_radius_graph(coords, cfg.cutoff), z);
  double emb_scale = base.embeddings.cwiseAbs().maxCoeff();
  double noise_scale = base.noise_pred.cwiseAbs().maxCoeff();

  double worst = 0.0;
  for (int rep = 0; rep < 100; ++rep) {
    Eigen::Matrix3d rot = random_rotation(rng);
    Eigen::RowVector3d shift(rng.next_normal(), rng.next_normal(),
                             rng.next_normal());
    Eigen::MatrixX3d moved = (coords * rot.transpose()).rowwise() + shift;
    ForwardResult out =
        forward(model, build_radius_graph(moved, cfg.cutoff), z);
    worst = std::max(worst,
                     (out.embeddings - base.embeddings).cwiseAbs().maxCoeff() /
                         emb_scale);
    worst = std::max(
        worst, (out.noise_pred - base.noise_pred * rot.transpose())
                       .cwiseAbs()
                       .maxCoeff() /
                   noise_scale);
  }
  char buf[96];
  std::snprintf(buf, sizeof(buf),
                "100 rigid motions, worst relative error %.2e", worst);
  note = buf;
  return worst <= 1e-10;
}

bool criterion_linear_equivalence(std::string &note) {
  FeatureSeries series = markov_series(0.1, 50000, 46);
  FeatureSeries train = series, val = series;
  train.values = series.values.topRows(40000);
  val.values = series.values.bottomRows(10000);

  LinearVampResult closed = linear_vamp({val}, LagSpec{1}, 1);

  MixerConfig cfg;
  cfg.mode = MixerMode::kSum;
  cfg.token_dim = 2;
  cfg.out_dim = 1;
  VampTrainConfig tc;
  tc.epochs = 40;
  tc.batch_size = 5000;
  tc.learning_rate = 5e-3;
  tc.seed = 47;
  VampTrainResult result =
      train_vamp(init_vamp_head(cfg, 48), {train}, {val}, tc);
  char buf[96];
  std::snprintf(buf, sizeof(buf), "trained %.4f vs closed-form %.4f",
                result.best_val_score, closed.score);
  note = buf;
  return std::abs(result.best_val_score - closed.score) <= 0.02;
}

bool criterion_metastability(std::string &note) {
  LangevinSpec spec;
  spec.temperature = 0.4;
  spec.length = 400000;
  spec.seed = 55;
  FeatureSeries x = sample_langevin(spec);

  // Gaussian basis over the reaction coordinate.
  const int n_basis = 8;
  FeatureSeries feats;
  feats.dt = x.dt;
  feats.values.resize(x.n_frames(), n_basis);
  for (Eigen::Index t = 0; t < x.n_frames(); ++t)
    for (int b = 0; b < n_basis; ++b) {
      double center = -1.5 + 3.0 * b / (n_basis - 1);
      double u = (x.values(t, 0) - center) / 0.5;
      feats.values(t, b) = std::exp(-0.5 * u * u);
    }

  auto [train, val] =
      split_series(feats, SplitSpec{SplitMode::kTemporal, 0.8, 0});
  LinearVampResult lv = linear_vamp({train}, LagSpec{100}, 1);
  Eigen::MatrixXd map = lv.model.f0 * lv.model.u.leftCols(1);
  Eigen::VectorXd psi =
      (val.values.rowwise() - lv.model.cov.mu0.transpose()) * map;

  Eigen::Index val_offset = train.n_frames();
  Eigen::Index agree = 0, total = 0;
  for (Eigen::Index t = 0; t < val.n_frames(); ++t) {
    double basin = x.values(val_offset + t, 0);
    if (basin == 0.0 || psi[t] == 0.0) continue;
    ++total;
    if ((psi[t] > 0.0) == (basin > 0.0)) ++agree;
  }
  double frac = static_cast<double>(agree) / static_cast<double>(total);
  frac = std::max(frac, 1.0 - frac);  // overall sign is arbitrary
  char buf[96];
  std::snprintf(buf, sizeof(buf), "sign agreement %.1f%% of %lld val frames",
                100.0 * frac, static_cast<long long>(total));
  note = buf;
  return frac > 0.95;
}

bool criterion_pretraining(std::string &note) {
  std::vector<GeometrySample> corpus = make_toy_corpus(48, 60);
  std::vector<GeometrySample> train_set(corpus.begin(), corpus.begin() + 40);
  std::vector<GeometrySample> val_set(corpus.begin() + 40, corpus.end());

  DescriptorConfig dc;
  dc.width = 32;
  dc.depth = 3;
  dc.cutoff = 5.0;
  dc.n_rbf = 16;
  dc.n_elements = 10;
  TrainConfig tc;
  tc.epochs = 12;
  tc.batch_size = 8;
  tc.learning_rate = 2e-3;
  tc.seed = 61;
  DescriptorModel random_init = init_model(dc, 62);
  auto [trained, record] = train(random_init, train_set, val_set, tc);
  bool loss_ok = record.converged_loss < 0.9;

  auto labels = [](const std::vector<GeometrySample> &set) {
    std::vector<double> out;
    for (const auto &s : set) out.push_back(toy_property(s));
    return out;
  };
  FinetuneConfig fc;
  fc.epochs = 300;
  fc.seed = 63;
  FinetuneResult pre = finetune_scalar(trained, train_set, labels(train_set),
                                       val_set, labels(val_set), fc);
  FinetuneResult rnd =
      finetune_scalar(random_init, train_set, labels(train_set), val_set,
                      labels(val_set), fc);
  char buf[128];
  std::snprintf(buf, sizeof(buf),
                "val MSE %.3f (< 0.9), MAE pre %.3f vs random %.3f",
                record.converged_loss, pre.validation_mae,
                rnd.validation_mae);
  note = buf;
  return loss_ok && pre.validation_mae <= rnd.validation_mae;
}

bool criterion_power_law(std::string &note) {
  Rng rng(70);
  std::vector<ScalingPoint> points;
  double n = 1e3;
  for (int i = 0; i < 8; ++i, n *= 4.0) {
    double loss = 2.0 * std::pow(n, -0.3) + 0.05;
    loss *= 1.0 + 0.01 * (2.0 * rng.next_double() - 1.0);
    points.push_back({n, loss});
  }
  PowerLawFit fit = fit_power_law(points, true);
  bool alpha_ok = std::abs(fit.alpha - 0.3) <= 0.02;

  // Exact power law with a flat tail appended from the sixth point on.
  std::vector<ScalingPoint> tail;
  double m = 1e3;
  for (int i = 0; i < 10; ++i, m *= std::sqrt(10.0))
    tail.push_back({m, 2.0 * std::pow(std::min(m, 1e5), -0.3) + 0.01});
  std::vector<ScalingPoint> head(tail.begin(), tail.begin() + 5);
  SaturationReport report =
      detect_saturation(tail, fit_power_law(head, true));
  bool onset_ok = report.onset_n.has_value() && *report.onset_n == tail[5].n;

  char buf[96];
  std::snprintf(buf, sizeof(buf), "alpha %.3f (target 0.30 +/- 0.02), %s",
                fit.alpha,
                onset_ok ? "flat tail flagged at first point"
                         : "flat tail misflagged");
  note = buf;
  return alpha_ok && onset_ok;
}

int run_cli(const std::string &args) {
  std::string command = g_cli + " " + args + " >/dev/null 2>&1";
  int status = std::system(command.c_str());
  return WIFEXITED(status) ? WEXITSTATUS(status) : -1;
}

std::string slurp(const fs::path &path) {
  std::ifstream in(path, std::ios::binary);
  std::ostringstream buf;
  buf << in.rdbuf();
  return buf.str();
}

bool criterion_reproducibility(std::string &note) {
  fs::path root = fs::temp_directory_path() /
                  ("kinlab_acceptance_" + std::to_string(::getpid()));
  fs::create_directories(root);
  struct Cleanup {
    fs::path dir;
    ~Cleanup() {
      std::error_code ec;
      fs::remove_all(dir, ec);
    }
  } cleanup{root};

  auto write = [&](const std::string &name, const std::string &text) {
    std::ofstream out(root / name, std::ios::binary);
    out << text;
    return (root / name).string();
  };

  Trajectory traj;
  traj.id = "acceptance";
  traj.atomic_numbers = {6, 1, 1, 8, 1};
  Rng rng(71);
  for (int f = 0; f < 3; ++f) {
    Eigen::MatrixX3d frame(5, 3);
    for (int i = 0; i < 5; ++i)
      for (int c = 0; c < 3; ++c) frame(i, c) = 3.0 * rng.next_double();
    traj.frames.push_back(frame);
  }
  std::string xyz = write("traj.xyz", write_xyz(traj));
  std::string records = write("records.csv",
                              "axis_value,n_params,converged_loss\n"
                              "0,1000,0.4213\n1,8000,0.2531\n"
                              "2,64000,0.1729\n3,512000,0.1341\n");

  fs::path sim = root / "sim", pre = root / "pre";
  std::vector<std::pair<std::string, std::string>> commands = {
      {"simulate", "kind=markov\ntransition=0.9,0.1;0.1,0.9\nlength=5000\n"
                   "seed=7\nout_dir=" + sim.string() + "\n"},
      {"pretrain", "corpus_size=8\nepochs=2\nseed=3\nwidth=8\ndepth=2\n"
                   "n_rbf=4\nbatch_size=4\nout_dir=" + pre.string() + "\n"},
      {"embed", "checkpoint=" + (pre / "descriptor.gdm").string() +
                    "\ntrajectory=" + xyz +
                    "\nout_dir=" + (root / "emb").string() + "\n"},
      {"vamp", "features=" + (sim / "features.fmb").string() +
                   "\nlag=1\nmode=linear\nd=1\nout_dir=" +
                   (root / "vamp").string() + "\n"},
      {"sweep", "axis=width\nvalues=8,16\ncorpus_size=8\nepochs=2\nseed=11\n"
                "depth=2\nn_rbf=4\nbatch_size=4\nout_dir=" +
                    (root / "sweep").string() + "\n"},
      {"fit", "records=" + records + "\nout_dir=" + (root / "fit").string() +
                  "\n"},
  };

  for (const auto &[name, cfg_text] : commands) {
    std::string cfg = write(name + ".cfg", cfg_text);
    if (run_cli(name + " --config " + cfg) != 0) {
      note = name + ": first run failed";
      return false;
    }
    fs::path manifest = root / (name == "simulate" ? "sim"
                                : name == "pretrain" ? "pre"
                                : name == "embed" ? "emb"
                                                  : name) /
                        "manifest.json";
    if (name == "vamp") manifest = root / "vamp" / "manifest.json";
    std::string first = slurp(manifest);
    if (run_cli(name + " --force --config " + cfg) != 0) {
      note = name + ": rerun failed";
      return false;
    }
    if (slurp(manifest) != first) {
      note = name + ": manifest differs across reruns";
      return false;
    }
  }
  note = "6 commands, byte-identical manifests across reruns";
  return true;
}

bool criterion_budget_solver(std::string &note) {
  SweepGrid grid;
  grid.axis = SweepAxis::kAspectRatio;
  grid.base.n_rbf = 16;
  grid.base.n_elements = 10;
  grid.param_budget = 200000;
  std::vector<std::int64_t> counts;
  for (int depth = 2; depth <= 10; ++depth)
    counts.push_back(count_parameters(
        config_for_grid_point(grid, static_cast<double>(depth))));
  double worst = 0.0;
  for (std::size_t i = 0; i < counts.size(); ++i)
    for (std::size_t j = i + 1; j < counts.size(); ++j)
      worst = std::max(worst,
                       std::abs(static_cast<double>(counts[i] - counts[j])) /
                           static_cast<double>(grid.param_budget));
  char buf[96];
  std::snprintf(buf, sizeof(buf),
                "depths 2-10, worst pairwise spread %.1f%% of budget",
                100.0 * worst);
  note = buf;
  return worst <= 0.20;
}

}  // namespace

int main(int argc, char **argv) {
  if (argc < 2) {
    std::cerr << "usage: acceptance <path-to-kinlab-cli>\n";
    return 2;
  }
  g_cli = argv[1];

  struct Criterion {
    const char *title;
    double time_limit;  // seconds, 0 = untimed
    std::function<bool(std::string &)> body;
  };
  std::vector<Criterion> criteria = {
      {"markov-chain vamp-2 oracle", 10.0, criterion_markov_oracle},
      {"score bounds on random series", 0.0, criterion_score_bounds},
      {"inverse-square-root whitening contract", 0.0, criterion_inv_sqrt},
      {"gradient exactness (descriptor, vamp-2, mixers)", 60.0,
       criterion_gradients},
      {"equivariance under rigid motions", 0.0, criterion_equivariance},
      {"trained linear head matches closed form", 120.0,
       criterion_linear_equivalence},
      {"double-well metastability recovery", 120.0, criterion_metastability},
      {"denoising pre-training beats the zero predictor", 0.0,
       criterion_pretraining},
      {"power-law fit and saturation detector", 0.0, criterion_power_law},
      {"byte-identical CLI reruns", 0.0, criterion_reproducibility},
      {"aspect-ratio budget solver", 0.0, criterion_budget_solver},
  };

  int failures = 0;
  for (std::size_t i = 0; i < criteria.size(); ++i) {
    const auto &c = criteria[i];
    std::string note;
    bool ok = false;
    auto start = std::chrono::steady_clock::now();
    try {
      ok = c.body(note);
    } catch (const std::exception &e) {
      note = std::string("exception: ") + e.what();
      ok = false;
    }
    double elapsed =
        std::chrono::duration<double>(std::chrono::steady_clock::now() -
                                      start)
            .count();
    if (c.time_limit > 0.0 && elapsed > c.time_limit) {
      ok = false;
      note += " [over time limit]";
    }
    if (!ok) ++failures;
    std::printf("criterion %2zu %s %-48s %s (%.1f s)\n", i + 1,
                ok ? "PASS" : "FAIL", c.title, note.c_str(), elapsed);
  }
  if (failures > 0)
    std::printf("%d of %zu criteria failed\n", failures, criteria.size());
  else
    std::printf("all %zu criteria passed\n", criteria.size());
  return failures == 0 ? 0 : 1;
}
