//
// Project kinlab - Copyright 2026 the kinlab authors.
// SPDX-License-Identifier: Apache-2.0
//
// Pipeline driver: config-driven synthetic data generation, pre-training,
// embedding, kinetic model estimation, scaling sweeps and power-law fits.
// Every command reads one key=value config file and writes its artifacts
// plus a manifest.json into the configured output directory.

#include <CLI11.hpp>
#include <atomic>
#include <cstdio>
#include <mutex>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <thread>

#include "kinlab/checkpoint.hpp"
#include "kinlab/config.hpp"
#include "kinlab/fmb.hpp"
#include "kinlab/generators.hpp"
#include "kinlab/koopman.hpp"
#include "kinlab/manifest.hpp"
#include "kinlab/pretrain.hpp"
#include "kinlab/scaling.hpp"
#include "kinlab/split.hpp"
#include "kinlab/svg.hpp"
#include "kinlab/vamp_head.hpp"
#include "kinlab/xyz.hpp"

namespace fs = std::filesystem;
using namespace kinlab;

namespace {

std::string fmt_g(double v) {
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

void ensure_dir(const std::string &dir) {
  std::error_code ec;
  fs::create_directories(dir, ec);
  if (ec) throw Error("IoFailure", "cannot create directory " + dir);
}

void guard_overwrite(const fs::path &path, bool force) {
  if (!force && fs::exists(path))
    throw Error("RefuseOverwrite",
                path.string() + " exists (pass --force to overwrite)");
}

void write_text(const fs::path &path, const std::string &text) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error("IoFailure", "cannot write " + path.string());
  out << text;
}

// ---------------------------------------------------------------------------
// simulate

int cmd_simulate(const RunConfig &cfg, bool force) {
  validate_schema(cfg, {{"kind", "seed", "length", "out_dir"},
                        {"transition", "step_size", "temperature", "x0"}});
  const std::string kind = cfg_string(cfg, "kind");
  const std::string out_dir = cfg_string(cfg, "out_dir");
  ensure_dir(out_dir);
  fs::path fmb_path = fs::path(out_dir) / "features.fmb";
  guard_overwrite(fmb_path, force);

  FeatureSeries series;
  if (kind == "markov") {
    MarkovSpec spec;
    spec.transition = cfg_matrix(cfg, "transition");
    spec.length = cfg_int(cfg, "length");
    spec.seed = static_cast<std::uint64_t>(cfg_int(cfg, "seed"));
    series = sample_markov(spec);
  } else if (kind == "langevin") {
    LangevinSpec spec;
    spec.length = cfg_int(cfg, "length");
    spec.seed = static_cast<std::uint64_t>(cfg_int(cfg, "seed"));
    spec.step_size = cfg_double(cfg, "step_size", spec.step_size);
    spec.temperature = cfg_double(cfg, "temperature", spec.temperature);
    spec.x0 = cfg_double(cfg, "x0", spec.x0);
    series = sample_langevin(spec);
  } else {
    throw Error("InvalidConfig",
                "key 'kind': expected markov or langevin, got '" + kind +
                    "'");
  }
  write_fmb(series, fmb_path.string());
  write_manifest(out_dir, "simulate", cfg, {"features.fmb"});
  return 0;
}

// ---------------------------------------------------------------------------
// pretrain

DescriptorConfig descriptor_config_from(const RunConfig &cfg) {
  DescriptorConfig dc;
  dc.width = static_cast<int>(cfg_int(cfg, "width", 32));
  dc.depth = static_cast<int>(cfg_int(cfg, "depth", 3));
  dc.cutoff = cfg_double(cfg, "cutoff", 5.0);
  dc.n_rbf = static_cast<int>(cfg_int(cfg, "n_rbf", 16));
  // The element embedding is indexed by atomic number; 18 covers H..Cl.
  dc.n_elements = static_cast<int>(cfg_int(cfg, "n_elements", 18));
  return dc;
}

TrainConfig train_config_from(const RunConfig &cfg) {
  TrainConfig tc;
  tc.learning_rate = cfg_double(cfg, "learning_rate", tc.learning_rate);
  tc.batch_size = static_cast<int>(cfg_int(cfg, "batch_size", tc.batch_size));
  tc.epochs = static_cast<int>(cfg_int(cfg, "epochs", tc.epochs));
  tc.noise_level = cfg_double(cfg, "noise_level", tc.noise_level);
  tc.seed = static_cast<std::uint64_t>(cfg_int(cfg, "seed", 0));
  return tc;
}

std::pair<std::vector<GeometrySample>, std::vector<GeometrySample>>
toy_corpus_split(const RunConfig &cfg) {
  auto corpus_size = static_cast<std::size_t>(cfg_int(cfg, "corpus_size"));
  auto seed = static_cast<std::uint64_t>(cfg_int(cfg, "seed", 0));
  double val_fraction = cfg_double(cfg, "val_fraction", 0.2);
  auto corpus = make_toy_corpus(corpus_size, derive_seed(seed, 17));
  SplitSpec split{SplitMode::kRandom, 1.0 - val_fraction,
                  derive_seed(seed, 18)};
  auto [train_idx, val_idx] = split_indices(corpus.size(), split);
  std::vector<GeometrySample> train_set, val_set;
  for (auto i : train_idx) train_set.push_back(corpus[i]);
  for (auto i : val_idx) val_set.push_back(corpus[i]);
  return {std::move(train_set), std::move(val_set)};
}

std::string train_record_csv(const TrainRecord &record) {
  std::string csv = "epoch,train_loss,val_loss\n";
  for (std::size_t e = 0; e < record.train_loss.size(); ++e)
    csv += std::to_string(e) + "," + fmt_g(record.train_loss[e]) + "," +
           fmt_g(record.val_loss[e]) + "\n";
  return csv;
}

int cmd_pretrain(const RunConfig &cfg, bool force) {
  validate_schema(cfg,
                  {{"corpus_size", "epochs", "seed", "out_dir"},
                   {"val_fraction", "width", "depth", "cutoff", "n_rbf",
                    "n_elements", "learning_rate", "batch_size",
                    "noise_level"}});
  const std::string out_dir = cfg_string(cfg, "out_dir");
  ensure_dir(out_dir);
  fs::path ckpt = fs::path(out_dir) / "descriptor.gdm";
  fs::path csv = fs::path(out_dir) / "train_record.csv";
  guard_overwrite(ckpt, force);

  DescriptorConfig dc = descriptor_config_from(cfg);
  TrainConfig tc = train_config_from(cfg);
  auto [train_set, val_set] = toy_corpus_split(cfg);
  DescriptorModel model = init_model(dc, derive_seed(tc.seed, 19));
  auto [trained, record] = train(std::move(model), train_set, val_set, tc);

  save_descriptor(trained, ckpt.string());
  write_text(csv, train_record_csv(record));
  write_manifest(out_dir, "pretrain", cfg,
                 {"descriptor.gdm", "train_record.csv"});
  return 0;
}

// ---------------------------------------------------------------------------
// embed

int cmd_embed(const RunConfig &cfg, bool force) {
  validate_schema(cfg, {{"checkpoint", "trajectory", "out_dir"},
                        {"dt", "window_size"}});
  const std::string out_dir = cfg_string(cfg, "out_dir");
  ensure_dir(out_dir);
  fs::path out_path = fs::path(out_dir) / "embeddings.fmb";
  guard_overwrite(out_path, force);

  DescriptorModel model = load_descriptor(cfg_string(cfg, "checkpoint"));
  std::ifstream in(cfg_string(cfg, "trajectory"));
  if (!in)
    throw Error("IoFailure",
                "cannot open trajectory " + cfg_string(cfg, "trajectory"));
  std::ostringstream buf;
  buf << in.rdbuf();
  Trajectory traj = parse_xyz(buf.str(), cfg_double(cfg, "dt", 1.0));

  auto window = static_cast<Eigen::Index>(cfg_int(cfg, "window_size", 0));
  auto n_atoms = static_cast<Eigen::Index>(traj.atomic_numbers.size());
  std::vector<std::vector<Eigen::Index>> grouping;
  if (window == 0) {
    grouping.emplace_back();
    for (Eigen::Index i = 0; i < n_atoms; ++i) grouping[0].push_back(i);
  } else {
    if (window < 0 || window > n_atoms)
      throw Error("InvalidConfig", "key 'window_size': out of range");
    // Consecutive index windows; the remainder joins the last window.
    for (Eigen::Index start = 0; start < n_atoms; start += window) {
      if (n_atoms - start < window && !grouping.empty()) {
        for (Eigen::Index i = start; i < n_atoms; ++i)
          grouping.back().push_back(i);
        break;
      }
      grouping.emplace_back();
      for (Eigen::Index i = start; i < std::min(start + window, n_atoms);
           ++i)
        grouping.back().push_back(i);
    }
  }

  FeatureSeries series;
  series.source_id = traj.id;
  series.dt = traj.dt;
  auto m = static_cast<Eigen::Index>(grouping.size());
  series.values.resize(static_cast<Eigen::Index>(traj.n_frames()),
                       m * model.config.width);
  for (std::size_t f = 0; f < traj.frames.size(); ++f) {
    RadiusGraph graph =
        build_radius_graph(traj.frames[f], model.config.cutoff);
    ForwardResult fwd = forward(model, graph, traj.atomic_numbers);
    TokenSet tokens = pool(fwd.embeddings, grouping);
    for (Eigen::Index t = 0; t < m; ++t)
      series.values.row(static_cast<Eigen::Index>(f))
          .segment(t * model.config.width, model.config.width) =
          tokens.tokens.row(t);
  }
  write_fmb(series, out_path.string());
  write_manifest(out_dir, "embed", cfg, {"embeddings.fmb"});
  return 0;
}

// ---------------------------------------------------------------------------
// vamp

FeatureSeries project_linear(const FeatureSeries &series,
                             const Eigen::MatrixXd &map,
                             const Eigen::VectorXd &mean) {
  FeatureSeries out;
  out.source_id = series.source_id;
  out.dt = series.dt;
  out.values = (series.values.rowwise() - mean.transpose()) * map;
  return out;
}

std::string scores_json(const std::string &mode, double train_score,
                        double val_score,
                        const std::vector<double> &train_history,
                        const std::vector<double> &val_history) {
  std::string json = "{\n  \"mode\": \"" + mode + "\",\n";
  json += "  \"train_score\": " + fmt_g(train_score) + ",\n";
  json += "  \"val_score\": " + fmt_g(val_score) + ",\n";
  auto emit = [&](const char *key, const std::vector<double> &v) {
    json += std::string("  \"") + key + "\": [";
    for (std::size_t i = 0; i < v.size(); ++i)
      json += (i ? ", " : "") + fmt_g(v[i]);
    json += "]";
  };
  emit("train_history", train_history);
  json += ",\n";
  emit("val_history", val_history);
  json += "\n}\n";
  return json;
}

int cmd_vamp(const RunConfig &cfg, bool force) {
  validate_schema(cfg,
                  {{"features", "lag", "mode", "d", "out_dir"},
                   {"token_dim", "hidden", "epochs", "batch_size",
                    "learning_rate", "seed", "split_fraction",
                    "rank_epsilon"}});
  const std::string out_dir = cfg_string(cfg, "out_dir");
  ensure_dir(out_dir);
  fs::path json_path = fs::path(out_dir) / "scores.json";
  guard_overwrite(json_path, force);

  FeatureSeries series = read_fmb(cfg_string(cfg, "features"));
  LagSpec lag{cfg_int(cfg, "lag")};
  auto d = static_cast<Eigen::Index>(cfg_int(cfg, "d"));
  double rank_epsilon = cfg_double(cfg, "rank_epsilon", 1e-6);
  const std::string mode = cfg_string(cfg, "mode");

  SplitSpec split{SplitMode::kTemporal, cfg_double(cfg, "split_fraction", 0.8),
                  0};
  auto [train_series, val_series] = split_series(series, split);

  std::vector<std::string> artifacts = {"scores.json",
                                        "singular_functions.svg"};
  std::string json;
  FeatureSeries psi_series;  // first projected component for the plot

  if (mode == "linear") {
    LinearVampResult result = linear_vamp({train_series}, lag, d,
                                          rank_epsilon);
    // Validation score of the fitted projection: map the held-out frames
    // through psi and rescore the d-dimensional series.
    Eigen::MatrixXd map = result.model.f0 * result.model.u.leftCols(d);
    FeatureSeries val_proj =
        project_linear(val_series, map, result.model.cov.mu0);
    double val_score = vamp2_score(
        half_weighted(estimate_covariances({val_proj}, lag), rank_epsilon));
    save_koopman(result.model, (fs::path(out_dir) / "koopman.kpm").string());
    artifacts.push_back("koopman.kpm");
    json = scores_json(mode, result.score, val_score, {}, {});
    psi_series = project_linear(val_series, map, result.model.cov.mu0);
  } else {
    MixerConfig mc;
    if (mode == "sum")
      mc.mode = MixerMode::kSum;
    else if (mode == "mlp_mixer")
      mc.mode = MixerMode::kMlpMixer;
    else if (mode == "self_attention")
      mc.mode = MixerMode::kSelfAttention;
    else
      throw Error("InvalidConfig", "key 'mode': unknown mode '" + mode + "'");
    mc.token_dim = static_cast<int>(
        cfg_int(cfg, "token_dim", series.dim()));
    if (mc.token_dim < 1 || series.dim() % mc.token_dim != 0)
      throw Error("InvalidConfig",
                  "key 'token_dim': must divide the feature dimension");
    mc.n_tokens = static_cast<int>(series.dim()) / mc.token_dim;
    mc.hidden = static_cast<int>(cfg_int(cfg, "hidden", 16));
    mc.out_dim = static_cast<int>(d);

    VampTrainConfig tc;
    tc.epochs = static_cast<int>(cfg_int(cfg, "epochs", tc.epochs));
    tc.batch_size =
        static_cast<int>(cfg_int(cfg, "batch_size", tc.batch_size));
    tc.learning_rate = cfg_double(cfg, "learning_rate", tc.learning_rate);
    tc.seed = static_cast<std::uint64_t>(cfg_int(cfg, "seed", 0));
    tc.rank_epsilon = rank_epsilon;
    tc.tau = lag.tau;

    VampHeadModel head = init_vamp_head(mc, derive_seed(tc.seed, 23));
    VampTrainResult result =
        train_vamp(std::move(head), {train_series}, {val_series}, tc);
    save_vamp_head(result.model,
                   (fs::path(out_dir) / "vamp_head.vhm").string());
    artifacts.push_back("vamp_head.vhm");
    double train_score =
        evaluate_vamp_head(result.model, {train_series}, lag, rank_epsilon);
    json = scores_json(mode, train_score, result.best_val_score,
                       result.train_score, result.val_score);
    psi_series = detail::project_series(result.model, val_series);
  }

  // Scatter of the first projected coordinate against the first raw feature.
  std::vector<double> xs, ys;
  for (Eigen::Index t = 0; t < psi_series.n_frames(); ++t) {
    xs.push_back(val_series.values(t, 0));
    ys.push_back(psi_series.values(t, 0));
  }
  SvgPlot plot("feature[0]", "projection[0]");
  plot.add_points(xs, ys, "steelblue");
  plot.save((fs::path(out_dir) / "singular_functions.svg").string());

  write_text(json_path, json);
  write_manifest(out_dir, "vamp", cfg, artifacts);
  return 0;
}

// ---------------------------------------------------------------------------
// sweep

int cmd_sweep(const RunConfig &cfg, bool force, int jobs) {
  validate_schema(cfg,
                  {{"axis", "values", "corpus_size", "epochs", "seed",
                    "out_dir"},
                   {"param_budget", "val_fraction", "width", "depth",
                    "cutoff", "n_rbf", "n_elements", "learning_rate",
                    "batch_size", "noise_level"}});
  const std::string out_dir = cfg_string(cfg, "out_dir");
  ensure_dir(out_dir);
  fs::path csv_path = fs::path(out_dir) / "records.csv";
  guard_overwrite(csv_path, force);

  SweepGrid grid;
  const std::string axis = cfg_string(cfg, "axis");
  if (axis == "width")
    grid.axis = SweepAxis::kWidth;
  else if (axis == "depth")
    grid.axis = SweepAxis::kDepth;
  else if (axis == "cutoff")
    grid.axis = SweepAxis::kCutoff;
  else if (axis == "aspect_ratio")
    grid.axis = SweepAxis::kAspectRatio;
  else
    throw Error("InvalidConfig", "key 'axis': unknown axis '" + axis + "'");
  grid.values = cfg_double_list(cfg, "values");
  grid.base = descriptor_config_from(cfg);
  grid.train = train_config_from(cfg);
  grid.param_budget = cfg_int(cfg, "param_budget", 0);
  grid.validate();

  auto [train_set, val_set] = toy_corpus_split(cfg);

  std::vector<ScalingRecord> records(grid.values.size());
  std::atomic<std::size_t> next{0};
  std::atomic<bool> failed{false};
  std::string failure;
  std::mutex failure_mutex;
  auto worker = [&]() {
    for (;;) {
      std::size_t i = next.fetch_add(1);
      if (i >= grid.values.size() || failed.load()) return;
      try {
        ScalingRecord rec;
        rec.axis_value = grid.values[i];
        rec.config = config_for_grid_point(grid, grid.values[i]);
        DescriptorModel model = init_model(rec.config, grid.train.seed);
        auto [trained, record] =
            train(std::move(model), train_set, val_set, grid.train);
        (void)trained;
        rec.n_params = count_parameters(rec.config);
        rec.samples_seen =
            static_cast<std::int64_t>(record.train_loss.size()) *
            static_cast<std::int64_t>(train_set.size());
        rec.compute_proxy = static_cast<double>(rec.n_params) *
                            static_cast<double>(rec.samples_seen);
        rec.first_epoch_loss = record.first_epoch_loss;
        rec.converged_loss = record.converged_loss;
        records[i] = rec;
      } catch (const std::exception &e) {
        std::scoped_lock lock(failure_mutex);
        failed.store(true);
        failure = std::string(e.what()) + " (grid value " +
                  std::to_string(grid.values[i]) + ")";
      }
    }
  };
  if (jobs <= 1) {
    worker();
  } else {
    std::vector<std::thread> pool;
    for (int j = 0; j < jobs; ++j) pool.emplace_back(worker);
    for (auto &t : pool) t.join();
  }
  if (failed.load()) throw Error("NumericalFailure", failure);

  std::string csv =
      "axis_value,width,depth,cutoff,n_rbf,n_params,samples_seen,"
      "compute_proxy,first_epoch_loss,converged_loss\n";
  for (const auto &rec : records) {
    csv += fmt_g(rec.axis_value) + "," + std::to_string(rec.config.width) +
           "," + std::to_string(rec.config.depth) + "," +
           fmt_g(rec.config.cutoff) + "," +
           std::to_string(rec.config.n_rbf) + "," +
           std::to_string(rec.n_params) + "," +
           std::to_string(rec.samples_seen) + "," +
           fmt_g(rec.compute_proxy) + "," + fmt_g(rec.first_epoch_loss) +
           "," + fmt_g(rec.converged_loss) + "\n";
  }
  write_text(csv_path, csv);

  std::vector<double> ns, first, conv;
  for (const auto &rec : records) {
    ns.push_back(static_cast<double>(rec.n_params));
    first.push_back(rec.first_epoch_loss);
    conv.push_back(rec.converged_loss);
  }
  SvgPlot plot("parameters N", "denoising loss", true, true);
  plot.add_polyline(ns, first, "darkorange");
  plot.add_polyline(ns, conv, "steelblue");
  plot.add_points(ns, conv, "steelblue");
  plot.save((fs::path(out_dir) / "loss_vs_n.svg").string());

  write_manifest(out_dir, "sweep", cfg, {"records.csv", "loss_vs_n.svg"});
  return 0;
}

// ---------------------------------------------------------------------------
// fit

std::vector<ScalingPoint> read_records_csv(const std::string &path,
                                           const std::string &loss_column) {
  std::ifstream in(path);
  if (!in) throw Error("InvalidConfig", "cannot open records file " + path);
  std::string header;
  if (!std::getline(in, header))
    throw Error("InvalidConfig", "records file is empty");
  std::vector<std::string> columns;
  {
    std::istringstream hs(header);
    std::string col;
    while (std::getline(hs, col, ',')) columns.push_back(col);
  }
  auto column_index = [&](const std::string &name) {
    for (std::size_t i = 0; i < columns.size(); ++i)
      if (columns[i] == name) return i;
    throw Error("InvalidConfig", "records file lacks column '" + name + "'");
  };
  std::size_t n_col = column_index("n_params");
  std::size_t l_col = column_index(loss_column);

  std::vector<ScalingPoint> points;
  std::string line;
  while (std::getline(in, line)) {
    if (detail::strip(line).empty()) continue;
    std::vector<std::string> cells;
    std::istringstream ls(line);
    std::string cell;
    while (std::getline(ls, cell, ',')) cells.push_back(cell);
    if (cells.size() != columns.size())
      throw Error("InvalidConfig", "records row has wrong field count");
    try {
      ScalingPoint p;
      p.n = std::stod(cells[n_col]);
      p.loss = std::stod(cells[l_col]);
      points.push_back(p);
    } catch (const std::exception &) {
      throw Error("InvalidConfig", "records row has a non-numeric cell");
    }
  }
  return points;
}

int cmd_fit(const RunConfig &cfg, bool force) {
  validate_schema(cfg,
                  {{"records", "out_dir"}, {"with_floor", "loss_column"}});
  const std::string out_dir = cfg_string(cfg, "out_dir");
  ensure_dir(out_dir);
  fs::path json_path = fs::path(out_dir) / "fit.json";
  guard_overwrite(json_path, force);

  bool with_floor = cfg_bool(cfg, "with_floor", true);
  std::vector<ScalingPoint> points = read_records_csv(
      cfg_string(cfg, "records"),
      cfg_string(cfg, "loss_column", "converged_loss"));
  PowerLawFit fit = fit_power_law(points, with_floor);
  SaturationReport saturation = detect_saturation(points, fit);

  std::string json = "{\n";
  json += "  \"a\": " + fmt_g(fit.a) + ",\n";
  json += "  \"alpha\": " + fmt_g(fit.alpha) + ",\n";
  json += "  \"c\": " + fmt_g(fit.c) + ",\n";
  json += "  \"residual\": " + fmt_g(fit.residual) + ",\n";
  json += "  \"n_min\": " + fmt_g(fit.n_min) + ",\n";
  json += "  \"n_max\": " + fmt_g(fit.n_max) + ",\n";
  json += "  \"saturation_onset\": " +
          (saturation.onset_n ? fmt_g(*saturation.onset_n)
                              : std::string("null")) +
          ",\n  \"deviation\": [";
  for (std::size_t i = 0; i < saturation.deviation.size(); ++i)
    json += (i ? ", " : "") + fmt_g(saturation.deviation[i]);
  json += "]\n}\n";
  write_text(json_path, json);

  std::vector<ScalingPoint> sorted = points;
  std::sort(sorted.begin(), sorted.end(),
            [](const ScalingPoint &x, const ScalingPoint &y) {
              return x.n < y.n;
            });
  std::vector<double> xs, ys, fys;
  for (const auto &p : sorted) {
    xs.push_back(p.n);
    ys.push_back(p.loss);
    fys.push_back(fit.a * std::pow(p.n, -fit.alpha) + fit.c);
  }
  SvgPlot plot("parameters N", "loss", true, true);
  plot.add_points(xs, ys, "steelblue");
  plot.add_polyline(xs, fys, "crimson", /*dashed=*/true);
  plot.save((fs::path(out_dir) / "fit.svg").string());

  write_manifest(out_dir, "fit", cfg, {"fit.json", "fit.svg"});
  return 0;
}

}  // namespace

int main(int argc, char **argv) {
  CLI::App app{"kinlab: kinetic models from geometric descriptors"};
  app.require_subcommand(1);

  struct SubArgs {
    std::string config;
    bool force = false;
  };
  std::map<std::string, SubArgs> args;
  int jobs = 1;
  for (const char *name :
       {"simulate", "pretrain", "embed", "vamp", "sweep", "fit"}) {
    auto *sub = app.add_subcommand(name);
    sub->add_option("--config", args[name].config, "key=value config file")
        ->required();
    sub->add_flag("--force", args[name].force,
                  "overwrite existing artifacts");
    if (std::string(name) == "sweep")
      sub->add_option("--jobs", jobs, "parallel grid workers");
  }
  app.get_subcommand("simulate")->description(
      "generate synthetic feature trajectories");
  app.get_subcommand("pretrain")->description(
      "denoising pre-training on the toy cluster corpus");
  app.get_subcommand("embed")->description(
      "run a descriptor checkpoint over an XYZ trajectory");
  app.get_subcommand("vamp")->description(
      "estimate a kinetic model (closed-form or trained head)");
  app.get_subcommand("sweep")->description(
      "scaling sweep over width/depth/cutoff/aspect ratio");
  app.get_subcommand("fit")->description(
      "power-law fit and saturation report over sweep records");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp &e) {
    return app.exit(e);
  } catch (const CLI::ParseError &e) {
    app.exit(e);
    return 2;
  }

  const std::string name = app.get_subcommands().front()->get_name();
  try {
    RunConfig cfg = load_config(args[name].config);
    bool force = args[name].force;
    if (name == "simulate") return cmd_simulate(cfg, force);
    if (name == "pretrain") return cmd_pretrain(cfg, force);
    if (name == "embed") return cmd_embed(cfg, force);
    if (name == "vamp") return cmd_vamp(cfg, force);
    if (name == "sweep") return cmd_sweep(cfg, force, jobs);
    if (name == "fit") return cmd_fit(cfg, force);
  } catch (const Error &e) {
    std::cerr << "error: " << e.what() << "\n";
    return std::string(e.kind()) == "InvalidConfig" ? 2 : 1;
  } catch (const std::exception &e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  return 0;
}
