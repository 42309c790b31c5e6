// npode: generate, train, evaluate, predict, plot and params commands over
// the NP-ODE surrogate library. Every command is driven by a flat key/value
// config file plus a few overriding flags, and is deterministic given
// (config, seed).
#include <chrono>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "npode/checkpoint.hpp"
#include "npode/runconfig.hpp"
#include "npode/svgplot.hpp"

namespace fs = std::filesystem;
using namespace npode;
using cli::RunConfig;
using data::Dataset;
using data::Table;

// exit codes: 0 success, then one per failure family
constexpr int kExitConfig = 2;
constexpr int kExitData = 3;
constexpr int kExitTraining = 4;
constexpr int kExitIo = 5;

struct CommonFlags {
  std::string config_path;
  std::string out_dir = ".";
  long long seed = -1;       // overrides every *.seed key when >= 0
  std::string model_kind;    // overrides model.kind
  std::string ci;            // overrides eval.ci
};

static RunConfig resolve_config(const CommonFlags& fl) {
  RunConfig cfg = fl.config_path.empty() ? RunConfig{} : cli::load_config(fl.config_path);
  if (fl.seed >= 0) {
    cfg.data_seed = static_cast<std::uint64_t>(fl.seed);
    cfg.split_seed = static_cast<std::uint64_t>(fl.seed);
    cfg.train_seed = static_cast<std::uint64_t>(fl.seed);
  }
  if (!fl.model_kind.empty()) cfg.model_kind = fl.model_kind;
  if (!fl.ci.empty()) cfg.ci = fl.ci;
  cfg.validate();
  return cfg;
}

static void write_file(const fs::path& path, const std::string& content) {
  std::ofstream f(path);
  if (!f) throw IoError("cannot write " + path.string());
  f << content;
}

static void ensure_out_dir(const std::string& dir) {
  std::error_code ec;
  fs::create_directories(dir, ec);
  if (ec) throw IoError("cannot create output directory " + dir);
}

static Dataset make_dataset(const RunConfig& cfg) {
  if (cfg.dataset_source == "spiral") {
    data::SpiralConfig sc;
    sc.n_points = cfg.spiral_n;
    sc.x_min = cfg.spiral_x_min;
    sc.x_max = cfg.spiral_x_max;
    sc.noise_std = cfg.spiral_noise;
    sc.seed = cfg.data_seed;
    return data::generate_spiral(sc);
  }
  if (cfg.dataset_source == "synthetic6")
    return data::generate_synthetic6(cfg.synthetic6_n, cfg.synthetic6_noise, cfg.data_seed);
  return data::load_csv(cfg.dataset_path);
}

static data::SplitResult make_split(const Dataset& ds, const RunConfig& cfg) {
  data::SplitSpec spec;
  spec.test_count = cfg.test_count;
  spec.nested_train_sizes = cfg.nested_sizes;
  spec.seed = cfg.split_seed;
  return data::split_train_test(ds, spec);
}

static metrics::CiKind ci_kind_for(const RunConfig& cfg, const Dataset& ds) {
  if (cfg.ci == "one_sigma") return metrics::CiKind::OneSigma;
  if (cfg.ci == "ci95") return metrics::CiKind::Ci95;
  // per-study defaults: one sigma for the spiral curves, 95% for tabular data
  return ds.provenance == "spiral" ? metrics::CiKind::OneSigma : metrics::CiKind::Ci95;
}

static std::string meta_sidecar(const RunConfig& cfg, const Dataset& ds) {
  nlohmann::json j = {{"provenance", ds.provenance},
                      {"rows", ds.n()},
                      {"x_cols", ds.m()},
                      {"y_cols", ds.p()},
                      {"dataset_seed", cfg.data_seed},
                      {"written_at", static_cast<long long>(std::time(nullptr))}};
  return j.dump(1) + "\n";
}

// ---- generate ----

static int cmd_generate(const CommonFlags& fl) {
  RunConfig cfg = resolve_config(fl);
  Dataset ds = make_dataset(cfg);
  ensure_out_dir(fl.out_dir);
  data::save_csv(ds, (fs::path(fl.out_dir) / "data.csv").string());
  write_file(fs::path(fl.out_dir) / "data.meta.json", meta_sidecar(cfg, ds));
  write_file(fs::path(fl.out_dir) / "resolved.cfg", cli::resolved_text(cfg));
  std::cout << "wrote " << ds.n() << " rows (" << ds.m() << " inputs, " << ds.p()
            << " outputs) to " << fl.out_dir << "/data.csv\n";
  return 0;
}

// ---- train ----

static model::ModelConfig model_config_for(const RunConfig& cfg, const Dataset& ds) {
  model::ModelConfig mc;
  mc.input_dim = ds.m();
  mc.output_dim = ds.p();
  mc.feature = cfg.feature;
  mc.heads = cfg.heads;
  mc.encoder_depth = cfg.encoder_depth;
  mc.std_floor = cfg.std_floor;
  mc.solver.step = cfg.solver_step;
  mc.decoder = cfg.model_kind == "np" ? model::DecoderKind::Mlp : model::DecoderKind::NpOde;
  return mc;
}

static train::TrainConfig train_config_for(const RunConfig& cfg) {
  train::TrainConfig tc;
  tc.iterations = cfg.iterations;
  tc.learning_rate = cfg.learning_rate;
  tc.seed = cfg.train_seed;
  tc.context_low = cfg.context_low;
  tc.context_high = cfg.context_high;
  tc.latent_samples_predict = cfg.latent_samples_predict;
  tc.kl_per_target = cfg.kl_per_target;
  tc.clip_norm = cfg.clip_norm;
  return tc;
}

// Fitted GP per output column plus the normalization it was fitted under.
static nlohmann::json gp_bundle_json(const std::vector<gp::GpModel>& gps,
                                     const data::NormState& norm) {
  nlohmann::json arr = nlohmann::json::array();
  for (const auto& g : gps) arr.push_back(train::to_json(g));
  return {{"format", "npode-gp-bundle-v1"},
          {"models", arr},
          {"norm_x", train::detail::minmax_to_json(norm.x)},
          {"norm_y", train::detail::minmax_to_json(norm.y)}};
}

static std::pair<std::vector<gp::GpModel>, data::NormState> load_gp_bundle(
    const std::string& path) {
  std::ifstream f(path);
  if (!f) throw IoError("cannot open " + path);
  nlohmann::json j;
  try {
    f >> j;
  } catch (const std::exception& e) {
    throw IoError(path + ": " + e.what());
  }
  if (!j.contains("format") || j.at("format") != "npode-gp-bundle-v1")
    throw IoError(path + ": unrecognized format tag");
  std::vector<gp::GpModel> gps;
  for (const auto& m : j.at("models")) gps.push_back(train::gp_from_json(m));
  data::NormState norm;
  norm.x = train::detail::minmax_from_json(j.at("norm_x"));
  norm.y = train::detail::minmax_from_json(j.at("norm_y"));
  return {gps, norm};
}

static int cmd_train(const CommonFlags& fl) {
  RunConfig cfg = resolve_config(fl);
  Dataset raw = make_dataset(cfg);
  auto split = make_split(raw, cfg);
  Dataset train_n = data::normalize(split.train);
  ensure_out_dir(fl.out_dir);
  auto t0 = std::chrono::steady_clock::now();

  if (cfg.model_kind == "gp-matern" || cfg.model_kind == "gp-poly") {
    gp::KernelKind kind = cfg.model_kind == "gp-matern" ? gp::KernelKind::Matern
                                                        : gp::KernelKind::Polynomial;
    std::vector<gp::GpModel> gps;
    for (long c = 0; c < train_n.p(); ++c) {
      std::vector<double> y(train_n.n());
      for (long i = 0; i < train_n.n(); ++i) y[i] = train_n.Y.at(i, c);
      gps.push_back(gp::gp_fit(train_n.X, y, kind));
    }
    write_file(fs::path(fl.out_dir) / "gp.json",
               gp_bundle_json(gps, train_n.norm).dump(1) + "\n");
    write_file(fs::path(fl.out_dir) / "resolved.cfg", cli::resolved_text(cfg));
    double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    std::cout << "fitted " << cfg.model_kind << " (log ml";
    for (const auto& g : gps) std::cout << " " << g.log_marginal;
    std::cout << ") in " << secs << " s\n";
    return 0;
  }

  model::ModelConfig mc = model_config_for(cfg, raw);
  train::TrainConfig tc = train_config_for(cfg);
  ad::Rng init(tc.seed);
  auto m0 = model::make_model(mc, init);
  auto res = train::train(m0, train_n, tc);

  train::Checkpoint ck;
  ck.model = res.model;
  ck.tcfg = tc;
  ck.norm = train_n.norm;
  ck.iteration = res.iterations_run;
  ck.final_loss = res.final_loss;
  train::save_checkpoint(ck, (fs::path(fl.out_dir) / "checkpoint.json").string());
  write_file(fs::path(fl.out_dir) / "trace.csv", train::trace_csv(res.trace));
  write_file(fs::path(fl.out_dir) / "resolved.cfg", cli::resolved_text(cfg));
  double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  std::cout << "final loss " << res.final_loss << " after " << res.iterations_run
            << " iterations in " << secs << " s\n";
  return 0;
}

// ---- evaluate / predict ----

struct PhysicalPrediction {
  metrics::Prediction pred;  // physical units
  Table y_true;              // physical units
};

// Predict the test rows in normalized space and map means and spreads back to
// physical units using the stored training normalization.
static PhysicalPrediction model_predict_physical(const train::Checkpoint& ck,
                                                 const Dataset& raw_train,
                                                 const Dataset& raw_test,
                                                 std::uint64_t seed) {
  Dataset train_n = data::normalize_with(raw_train, ck.norm);
  Dataset test_n = data::normalize_with(raw_test, ck.norm);
  auto pn = train::predict(ck.model, train_n, test_n.X, ck.tcfg, seed);
  PhysicalPrediction out{{Table(raw_test.n(), raw_test.p()), Table(raw_test.n(), raw_test.p())},
                         raw_test.Y};
  for (long i = 0; i < raw_test.n(); ++i)
    for (long j = 0; j < raw_test.p(); ++j) {
      out.pred.mean.at(i, j) = data::denormalize_value(pn.mean.at(i, j), ck.norm.y[j]);
      out.pred.std.at(i, j) = data::denormalize_scale(pn.std.at(i, j), ck.norm.y[j]);
    }
  return out;
}

static PhysicalPrediction gp_predict_physical(const std::vector<gp::GpModel>& gps,
                                              const data::NormState& norm,
                                              const Dataset& raw_test) {
  Dataset test_n = data::normalize_with(raw_test, norm);
  PhysicalPrediction out{{Table(raw_test.n(), raw_test.p()), Table(raw_test.n(), raw_test.p())},
                         raw_test.Y};
  for (long j = 0; j < raw_test.p(); ++j) {
    auto p = gp::gp_predict(gps[j], test_n.X);
    for (long i = 0; i < raw_test.n(); ++i) {
      out.pred.mean.at(i, j) = data::denormalize_value(p.mean.at(i, 0), norm.y[j]);
      out.pred.std.at(i, j) = data::denormalize_scale(p.std.at(i, 0), norm.y[j]);
    }
  }
  return out;
}

static bool is_gp_bundle(const std::string& path) {
  std::ifstream f(path);
  if (!f) throw IoError("cannot open " + path);
  nlohmann::json j;
  try {
    f >> j;
  } catch (const std::exception& e) {
    throw IoError(path + ": " + e.what());
  }
  return j.contains("format") && j.at("format") == "npode-gp-bundle-v1";
}

// eval.csv: inputs, then per output truth/mean/std/interval/covered columns
static std::string eval_points_csv(const Dataset& raw_test, const metrics::EvalReport& rep) {
  std::ostringstream os;
  os.precision(17);
  for (long j = 0; j < raw_test.m(); ++j) os << (j ? "," : "") << "x" << (j + 1);
  for (long j = 0; j < raw_test.p(); ++j) {
    std::string t = std::to_string(j + 1);
    os << ",y" << t << "_true,y" << t << "_mean,y" << t << "_std,y" << t << "_lo,y" << t
       << "_hi,y" << t << "_covered";
  }
  os << "\n";
  for (long i = 0; i < raw_test.n(); ++i) {
    for (long j = 0; j < raw_test.m(); ++j) os << (j ? "," : "") << raw_test.X.at(i, j);
    for (long j = 0; j < raw_test.p(); ++j)
      os << "," << rep.y_true.at(i, j) << "," << rep.pred.mean.at(i, j) << ","
         << rep.pred.std.at(i, j) << "," << rep.intervals[i][j].low << ","
         << rep.intervals[i][j].high << "," << (rep.cover.covered[i] ? 1 : 0);
    os << "\n";
  }
  return os.str();
}

static int cmd_evaluate(const CommonFlags& fl, const std::string& model_path) {
  RunConfig cfg = resolve_config(fl);
  Dataset raw = make_dataset(cfg);
  auto split = make_split(raw, cfg);
  metrics::CiKind kind = ci_kind_for(cfg, raw);

  PhysicalPrediction test_pp, train_pp;
  if (is_gp_bundle(model_path)) {
    auto [gps, norm] = load_gp_bundle(model_path);
    if (static_cast<long>(gps.size()) != raw.p() ||
        static_cast<long>(norm.x.size()) != raw.m())
      throw ContractError("evaluate: model expects " + std::to_string(norm.x.size()) +
                          " inputs / " + std::to_string(gps.size()) + " outputs, data has " +
                          std::to_string(raw.m()) + " / " + std::to_string(raw.p()));
    test_pp = gp_predict_physical(gps, norm, split.test);
    train_pp = gp_predict_physical(gps, norm, split.train);
  } else {
    train::Checkpoint ck = train::load_checkpoint(model_path);
    if (ck.model.cfg.input_dim != raw.m() || ck.model.cfg.output_dim != raw.p())
      throw ContractError("evaluate: model expects " +
                          std::to_string(ck.model.cfg.input_dim) + " inputs / " +
                          std::to_string(ck.model.cfg.output_dim) + " outputs, data has " +
                          std::to_string(raw.m()) + " / " + std::to_string(raw.p()));
    test_pp = model_predict_physical(ck, split.train, split.test, cfg.train_seed + 1);
    train_pp = model_predict_physical(ck, split.train, split.train, cfg.train_seed + 2);
  }

  metrics::EvalReport rep = metrics::evaluate(test_pp.y_true, test_pp.pred, kind);
  metrics::EvalReport train_rep = metrics::evaluate(train_pp.y_true, train_pp.pred, kind);
  if (train_rep.rmse_value > rep.rmse_value)
    std::cerr << "warning: training rmse " << train_rep.rmse_value
              << " exceeds test rmse " << rep.rmse_value << "\n";

  ensure_out_dir(fl.out_dir);
  write_file(fs::path(fl.out_dir) / "eval.csv", eval_points_csv(split.test, rep));
  write_file(fs::path(fl.out_dir) / "report.csv", rep.csv());
  write_file(fs::path(fl.out_dir) / "summary.txt", rep.summary() + "\n");
  write_file(fs::path(fl.out_dir) / "resolved.cfg", cli::resolved_text(cfg));
  std::cout << rep.summary() << "\n";
  return 0;
}

static int cmd_predict(const CommonFlags& fl, const std::string& model_path,
                       const std::string& targets_path) {
  RunConfig cfg = resolve_config(fl);
  Dataset targets = data::load_csv(targets_path);  // y columns present but unused
  PhysicalPrediction pp;
  if (is_gp_bundle(model_path)) {
    auto [gps, norm] = load_gp_bundle(model_path);
    pp = gp_predict_physical(gps, norm, targets);
  } else {
    train::Checkpoint ck = train::load_checkpoint(model_path);
    Dataset raw = make_dataset(cfg);
    auto split = make_split(raw, cfg);
    pp = model_predict_physical(ck, split.train, targets, cfg.train_seed + 3);
  }
  ensure_out_dir(fl.out_dir);
  std::ostringstream os;
  os.precision(17);
  for (long j = 0; j < targets.m(); ++j) os << (j ? "," : "") << "x" << (j + 1);
  for (long j = 0; j < targets.p(); ++j)
    os << ",y" << (j + 1) << "_mean,y" << (j + 1) << "_std";
  os << "\n";
  for (long i = 0; i < targets.n(); ++i) {
    for (long j = 0; j < targets.m(); ++j) os << (j ? "," : "") << targets.X.at(i, j);
    for (long j = 0; j < targets.p(); ++j)
      os << "," << pp.pred.mean.at(i, j) << "," << pp.pred.std.at(i, j);
    os << "\n";
  }
  write_file(fs::path(fl.out_dir) / "predictions.csv", os.str());
  std::cout << "wrote " << targets.n() << " predictions to " << fl.out_dir
            << "/predictions.csv\n";
  return 0;
}

// ---- plot ----

struct EvalTable {
  std::vector<std::string> header;
  std::vector<std::vector<double>> rows;

  long col(const std::string& name) const {
    for (size_t i = 0; i < header.size(); ++i)
      if (header[i] == name) return static_cast<long>(i);
    throw DataError("plot: report is missing column " + name);
  }
};

static EvalTable read_eval_csv(const std::string& path) {
  std::ifstream f(path);
  if (!f) throw IoError("cannot open " + path);
  EvalTable t;
  std::string line;
  if (!std::getline(f, line)) throw DataError(path + ": empty report");
  t.header = data::split_line(line);
  while (std::getline(f, line)) {
    if (line.empty()) continue;
    auto fields = data::split_line(line);
    std::vector<double> row;
    for (const auto& s : fields) row.push_back(std::stod(s));
    t.rows.push_back(row);
  }
  return t;
}

static int cmd_plot(const CommonFlags& fl, const std::string& report_path,
                    const std::string& reference_path) {
  EvalTable t = read_eval_csv(report_path);
  long m = 0, p = 0;
  for (const auto& h : t.header) {
    if (h.size() > 1 && h[0] == 'x' && h.find('_') == std::string::npos) ++m;
    if (h.size() > 1 && h[0] == 'y' && h.find("_true") != std::string::npos) ++p;
  }
  if (m == 0 || p == 0) throw DataError("plot: report has no x/y_true columns");

  Dataset ref;
  if (!reference_path.empty()) ref = data::load_csv(reference_path);

  ensure_out_dir(fl.out_dir);
  std::ostringstream series;
  series.precision(17);
  std::string svg;
  if (m == 1) {
    // curve panels over x, sorted; band edges are exactly mean +- std
    std::vector<size_t> order(t.rows.size());
    for (size_t i = 0; i < order.size(); ++i) order[i] = i;
    long xcol = t.col("x1");
    std::sort(order.begin(), order.end(),
              [&](size_t a, size_t b) { return t.rows[a][xcol] < t.rows[b][xcol]; });
    std::vector<cli::CurveSeries> panels(p);
    series << "dimension,x,truth,mean,band_lo,band_hi\n";
    for (long j = 0; j < p; ++j) {
      std::string tag = "y" + std::to_string(j + 1);
      long ct = t.col(tag + "_true"), cm = t.col(tag + "_mean"), cs = t.col(tag + "_std");
      panels[j].label = tag;
      for (size_t k : order) {
        double x = t.rows[k][xcol], mean = t.rows[k][cm], sd = t.rows[k][cs];
        panels[j].x.push_back(x);
        panels[j].mean.push_back(mean);
        panels[j].std.push_back(sd);
        panels[j].truth.push_back(t.rows[k][ct]);
        series << tag << "," << x << "," << t.rows[k][ct] << "," << mean << ","
               << mean - sd << "," << mean + sd << "\n";
      }
      if (ref.n() > 0 && ref.p() > j) {
        for (long i = 0; i < ref.n(); ++i) {
          panels[j].ref_x.push_back(ref.X.at(i, 0));
          panels[j].ref_y.push_back(ref.Y.at(i, j));
        }
      }
    }
    svg = cli::svg_curves(panels);
  } else {
    std::vector<cli::BarSeries> panels(p);
    series << "dimension,index,truth,mean,lo,hi\n";
    for (long j = 0; j < p; ++j) {
      std::string tag = "y" + std::to_string(j + 1);
      long ct = t.col(tag + "_true"), cm = t.col(tag + "_mean");
      long cl = t.col(tag + "_lo"), ch = t.col(tag + "_hi");
      panels[j].label = tag;
      for (size_t k = 0; k < t.rows.size(); ++k) {
        panels[j].truth.push_back(t.rows[k][ct]);
        panels[j].mean.push_back(t.rows[k][cm]);
        panels[j].low.push_back(t.rows[k][cl]);
        panels[j].high.push_back(t.rows[k][ch]);
        series << tag << "," << k << "," << t.rows[k][ct] << "," << t.rows[k][cm] << ","
               << t.rows[k][cl] << "," << t.rows[k][ch] << "\n";
      }
    }
    svg = cli::svg_bars(panels);
  }
  write_file(fs::path(fl.out_dir) / "plot.svg", svg);
  write_file(fs::path(fl.out_dir) / "plot_series.csv", series.str());
  std::cout << "wrote " << fl.out_dir << "/plot.svg\n";
  return 0;
}

// ---- params ----

static int cmd_params(const CommonFlags& fl, bool write_files) {
  RunConfig cfg = resolve_config(fl);
  auto ode = model::decoder_parameter_report(model::DecoderKind::NpOde, cfg.feature);
  auto mlp = model::decoder_parameter_report(model::DecoderKind::Mlp, cfg.feature);
  std::ostringstream os;
  os << "npode decoder\n" << ode.text() << "\nnp decoder\n" << mlp.text() << "\nratio "
     << static_cast<double>(mlp.total) / static_cast<double>(ode.total) << "x\n";
  std::cout << os.str();
  if (write_files) {
    ensure_out_dir(fl.out_dir);
    write_file(fs::path(fl.out_dir) / "params.txt", os.str());
    write_file(fs::path(fl.out_dir) / "params_npode.csv", ode.csv());
    write_file(fs::path(fl.out_dir) / "params_np.csv", mlp.csv());
  }
  return 0;
}

int main(int argc, char** argv) {
  CLI::App app{"NP-ODE stochastic surrogate toolkit"};
  app.require_subcommand(1);

  CommonFlags fl;
  std::string model_path, targets_path, report_path, reference_path;
  bool params_write = false;

  auto add_common = [&](CLI::App* sub) {
    sub->add_option("--config", fl.config_path, "config file (section.key = value lines)");
    sub->add_option("--out", fl.out_dir, "output directory");
    sub->add_option("--seed", fl.seed, "override every seed in the config");
    sub->add_option("--model", fl.model_kind, "model kind: npode, np, gp-matern, gp-poly");
    sub->add_option("--ci", fl.ci, "confidence interval kind: one_sigma or ci95");
  };

  CLI::App* generate = app.add_subcommand("generate", "write a dataset CSV");
  add_common(generate);
  CLI::App* trainc = app.add_subcommand("train", "train a model or fit a GP");
  add_common(trainc);
  CLI::App* evaluate = app.add_subcommand("evaluate", "score a model on the test split");
  add_common(evaluate);
  evaluate->add_option("--checkpoint", model_path, "model file")->required();
  CLI::App* predict = app.add_subcommand("predict", "predict at target inputs");
  add_common(predict);
  predict->add_option("--checkpoint", model_path, "model file")->required();
  predict->add_option("--targets", targets_path, "CSV of target rows")->required();
  CLI::App* plot = app.add_subcommand("plot", "render an evaluation report as SVG");
  add_common(plot);
  plot->add_option("--report", report_path, "eval.csv from evaluate")->required();
  plot->add_option("--reference", reference_path, "noiseless reference CSV");
  CLI::App* params = app.add_subcommand("params", "decoder parameter-count table");
  add_common(params);
  params->add_flag("--write", params_write, "also write params files to --out");

  CLI11_PARSE(app, argc, argv);

  try {
    if (*generate) return cmd_generate(fl);
    if (*trainc) return cmd_train(fl);
    if (*evaluate) return cmd_evaluate(fl, model_path);
    if (*predict) return cmd_predict(fl, model_path, targets_path);
    if (*plot) return cmd_plot(fl, report_path, reference_path);
    if (*params) return cmd_params(fl, params_write);
  } catch (const ConfigError& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return kExitConfig;
  } catch (const DataError& e) {
    std::cerr << "data error: " << e.what() << "\n";
    return kExitData;
  } catch (const TrainingError& e) {
    std::cerr << "training error: " << e.what() << "\n";
    return kExitTraining;
  } catch (const IoError& e) {
    std::cerr << "io error: " << e.what() << "\n";
    return kExitIo;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  return 1;
}
