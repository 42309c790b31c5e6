#pragma once

#include <fstream>
#include <string>

#include <json.hpp>

#include "npode/gp.hpp"
#include "npode/training.hpp"

namespace npode::train {

using nlohmann::json;

inline constexpr const char* kCheckpointFormat = "npode-checkpoint-v1";
inline constexpr const char* kGpFormat = "npode-gp-v1";

struct Checkpoint {
  NpOdeModel model;
  TrainConfig tcfg;
  data::NormState norm;
  long iteration = 0;
  double final_loss = 0;
};

namespace detail {

inline json minmax_to_json(const std::vector<std::pair<double, double>>& v) {
  json out = json::array();
  for (auto& [lo, hi] : v) out.push_back({lo, hi});
  return out;
}

inline std::vector<std::pair<double, double>> minmax_from_json(const json& j) {
  std::vector<std::pair<double, double>> out;
  for (auto& e : j) out.emplace_back(e[0].get<double>(), e[1].get<double>());
  return out;
}

}  // namespace detail

inline json to_json(const model::ModelConfig& c) {
  return {{"input_dim", c.input_dim},
          {"output_dim", c.output_dim},
          {"feature", c.feature},
          {"heads", c.heads},
          {"encoder_depth", c.encoder_depth},
          {"decoder", model::decoder_kind_name(c.decoder)},
          {"solver", {c.solver.d_start, c.solver.d_end, c.solver.step}},
          {"std_floor", c.std_floor}};
}

inline model::ModelConfig model_config_from_json(const json& j) {
  model::ModelConfig c;
  c.input_dim = j.at("input_dim").get<long>();
  c.output_dim = j.at("output_dim").get<long>();
  c.feature = j.at("feature").get<long>();
  c.heads = j.at("heads").get<long>();
  c.encoder_depth = j.at("encoder_depth").get<long>();
  c.decoder = j.at("decoder").get<std::string>() == "npode" ? model::DecoderKind::NpOde
                                                            : model::DecoderKind::Mlp;
  c.solver.d_start = j.at("solver")[0].get<double>();
  c.solver.d_end = j.at("solver")[1].get<double>();
  c.solver.step = j.at("solver")[2].get<double>();
  c.std_floor = j.at("std_floor").get<double>();
  return c;
}

inline json to_json(const TrainConfig& c) {
  return {{"iterations", c.iterations},
          {"learning_rate", c.learning_rate},
          {"seed", c.seed},
          {"context_low", c.context_low},
          {"context_high", c.context_high},
          {"latent_samples_train", c.latent_samples_train},
          {"latent_samples_predict", c.latent_samples_predict},
          {"kl_per_target", c.kl_per_target},
          {"clip_norm", c.clip_norm},
          {"trace_every", c.trace_every}};
}

inline TrainConfig train_config_from_json(const json& j) {
  TrainConfig c;
  c.iterations = j.at("iterations").get<long>();
  c.learning_rate = j.at("learning_rate").get<double>();
  c.seed = j.at("seed").get<std::uint64_t>();
  c.context_low = j.at("context_low").get<double>();
  c.context_high = j.at("context_high").get<double>();
  c.latent_samples_train = j.at("latent_samples_train").get<long>();
  c.latent_samples_predict = j.at("latent_samples_predict").get<long>();
  c.kl_per_target = j.at("kl_per_target").get<bool>();
  c.clip_norm = j.at("clip_norm").get<double>();
  c.trace_every = j.at("trace_every").get<long>();
  return c;
}

inline json to_json(const Checkpoint& ck) {
  json params = json::object();
  NpOdeModel m = ck.model;
  model::for_each_param(m, [&](const std::string& name, Tensor& p) {
    json shape = json::array();
    for (long i = 0; i < p.rank(); ++i) shape.push_back(p.dim(i));
    params[name] = {{"shape", shape},
                    {"values", std::vector<double>(p.data(), p.data() + p.numel())}};
  });
  return {{"format", kCheckpointFormat},
          {"model_config", to_json(ck.model.cfg)},
          {"train_config", to_json(ck.tcfg)},
          {"norm_x", detail::minmax_to_json(ck.norm.x)},
          {"norm_y", detail::minmax_to_json(ck.norm.y)},
          {"iteration", ck.iteration},
          {"final_loss", ck.final_loss},
          {"params", params}};
}

inline Checkpoint checkpoint_from_json(const json& j) {
  if (!j.contains("format") || j.at("format") != kCheckpointFormat)
    throw IoError("checkpoint: unrecognized format tag");
  Checkpoint ck;
  model::ModelConfig mc = model_config_from_json(j.at("model_config"));
  ad::Rng rng(0);
  ck.model = model::make_model(mc, rng);
  ck.tcfg = train_config_from_json(j.at("train_config"));
  ck.norm.x = detail::minmax_from_json(j.at("norm_x"));
  ck.norm.y = detail::minmax_from_json(j.at("norm_y"));
  ck.iteration = j.at("iteration").get<long>();
  ck.final_loss = j.at("final_loss").get<double>();
  const json& params = j.at("params");
  model::for_each_param(ck.model, [&](const std::string& name, Tensor& p) {
    if (!params.contains(name)) throw IoError("checkpoint: missing parameter " + name);
    auto vals = params.at(name).at("values").get<std::vector<double>>();
    if (static_cast<long>(vals.size()) != p.numel())
      throw IoError("checkpoint: size mismatch for " + name);
    std::copy(vals.begin(), vals.end(), p.data());
  });
  return ck;
}

inline void save_checkpoint(const Checkpoint& ck, const std::string& path) {
  std::ofstream f(path);
  if (!f) throw IoError("cannot write " + path);
  f << to_json(ck).dump(1) << "\n";
}

inline Checkpoint load_checkpoint(const std::string& path) {
  std::ifstream f(path);
  if (!f) throw IoError("cannot open " + path);
  json j;
  try {
    f >> j;
  } catch (const std::exception& e) {
    throw IoError(path + ": " + e.what());
  }
  return checkpoint_from_json(j);
}

// ---- fitted GP baselines, same versioned-format discipline ----

inline json to_json(const gp::GpModel& m) {
  return {{"format", kGpFormat},
          {"kernel", gp::kernel_kind_name(m.kind)},
          {"lengthscale", m.hyper.lengthscale},
          {"signal_var", m.hyper.signal_var},
          {"noise_var", m.hyper.noise_var},
          {"gamma", m.hyper.gamma},
          {"offset", m.hyper.offset},
          {"degree", m.hyper.degree},
          {"matern_nu", m.hyper.matern_nu},
          {"x_rows", m.X.rows},
          {"x_cols", m.X.cols},
          {"x", m.X.v},
          {"y", m.y}};
}

inline gp::GpModel gp_from_json(const json& j) {
  if (!j.contains("format") || j.at("format") != kGpFormat)
    throw IoError("gp model: unrecognized format tag");
  gp::GpModel m;
  m.kind = j.at("kernel").get<std::string>() == "matern" ? gp::KernelKind::Matern
                                                         : gp::KernelKind::Polynomial;
  m.hyper.lengthscale = j.at("lengthscale").get<double>();
  m.hyper.signal_var = j.at("signal_var").get<double>();
  m.hyper.noise_var = j.at("noise_var").get<double>();
  m.hyper.gamma = j.at("gamma").get<double>();
  m.hyper.offset = j.at("offset").get<double>();
  m.hyper.degree = j.at("degree").get<int>();
  m.hyper.matern_nu = j.at("matern_nu").get<double>();
  m.X = data::Table(j.at("x_rows").get<long>(), j.at("x_cols").get<long>());
  m.X.v = j.at("x").get<std::vector<double>>();
  m.y = j.at("y").get<std::vector<double>>();
  return gp::gp_refit(m);  // rebuild the factorization from the stored data
}

inline void save_gp(const gp::GpModel& m, const std::string& path) {
  std::ofstream f(path);
  if (!f) throw IoError("cannot write " + path);
  f << to_json(m).dump(1) << "\n";
}

inline gp::GpModel load_gp(const std::string& path) {
  std::ifstream f(path);
  if (!f) throw IoError("cannot open " + path);
  json j;
  try {
    f >> j;
  } catch (const std::exception& e) {
    throw IoError(path + ": " + e.what());
  }
  return gp_from_json(j);
}

}  // namespace npode::train
