#pragma once

#include <cstdint>
#include <fstream>
#include <map>
#include <sstream>
#include <string>
#include <vector>

#include "npode/errors.hpp"

namespace npode::cli {

// Flat `section.key = value` configuration. Unknown keys are rejected by name;
// every run writes back the fully resolved (defaults filled) form.
struct RunConfig {
  // dataset
  std::string dataset_source = "spiral";  // spiral | synthetic6 | csv
  std::string dataset_path;               // csv source only
  long spiral_n = 200;
  double spiral_x_min = 0.0;
  double spiral_x_max = 4.0 * M_PI;
  double spiral_noise = 0.01;
  long synthetic6_n = 106;
  double synthetic6_noise = 0.05;
  std::uint64_t data_seed = 0;
  // split
  long test_count = 50;
  std::vector<long> nested_sizes;
  std::uint64_t split_seed = 0;
  // model
  std::string model_kind = "npode";  // npode | np | gp-matern | gp-poly
  long feature = 128;
  long heads = 8;
  long encoder_depth = 3;
  double std_floor = 0.01;
  double solver_step = 0.05;
  // training
  long iterations = 10000;
  double learning_rate = 1e-4;
  std::uint64_t train_seed = 0;
  double context_low = 0.3;
  double context_high = 0.9;
  long latent_samples_predict = 1;
  bool kl_per_target = true;
  double clip_norm = 10.0;
  // evaluation
  std::string ci = "auto";  // auto | one_sigma | ci95

  void validate() const {
    if (dataset_source != "spiral" && dataset_source != "synthetic6" &&
        dataset_source != "csv")
      throw ConfigError("config: dataset.source must be spiral, synthetic6 or csv");
    if (dataset_source == "csv" && dataset_path.empty())
      throw ConfigError("config: dataset.path required for csv source");
    if (spiral_noise < 0 || synthetic6_noise < 0)
      throw ConfigError("config: noise_std must be >= 0");
    if (model_kind != "npode" && model_kind != "np" && model_kind != "gp-matern" &&
        model_kind != "gp-poly")
      throw ConfigError("config: model.kind must be npode, np, gp-matern or gp-poly");
    if (ci != "auto" && ci != "one_sigma" && ci != "ci95")
      throw ConfigError("config: eval.ci must be auto, one_sigma or ci95");
    if (test_count <= 0) throw ConfigError("config: split.test_count must be > 0");
  }
};

namespace detail {

inline std::string trim(const std::string& s) {
  size_t a = s.find_first_not_of(" \t");
  if (a == std::string::npos) return "";
  size_t b = s.find_last_not_of(" \t");
  return s.substr(a, b - a + 1);
}

template <class T>
inline T parse_num(const std::string& key, const std::string& v) {
  std::istringstream is(v);
  T out;
  is >> out;
  if (is.fail() || !is.eof())
    throw ConfigError("config: cannot parse value '" + v + "' for key " + key);
  return out;
}

inline bool parse_bool(const std::string& key, const std::string& v) {
  if (v == "true" || v == "1") return true;
  if (v == "false" || v == "0") return false;
  throw ConfigError("config: cannot parse boolean '" + v + "' for key " + key);
}

inline std::vector<long> parse_list(const std::string& key, const std::string& v) {
  std::vector<long> out;
  std::istringstream is(v);
  std::string item;
  while (std::getline(is, item, ',')) out.push_back(parse_num<long>(key, trim(item)));
  return out;
}

}  // namespace detail

inline void apply_key(RunConfig& c, const std::string& key, const std::string& value) {
  using namespace detail;
  if (key == "dataset.source") c.dataset_source = value;
  else if (key == "dataset.path") c.dataset_path = value;
  else if (key == "spiral.n_points") c.spiral_n = parse_num<long>(key, value);
  else if (key == "spiral.x_min") c.spiral_x_min = parse_num<double>(key, value);
  else if (key == "spiral.x_max") c.spiral_x_max = parse_num<double>(key, value);
  else if (key == "spiral.noise_std") c.spiral_noise = parse_num<double>(key, value);
  else if (key == "synthetic6.n") c.synthetic6_n = parse_num<long>(key, value);
  else if (key == "synthetic6.noise_std") c.synthetic6_noise = parse_num<double>(key, value);
  else if (key == "dataset.seed") c.data_seed = parse_num<std::uint64_t>(key, value);
  else if (key == "split.test_count") c.test_count = parse_num<long>(key, value);
  else if (key == "split.nested_sizes") c.nested_sizes = parse_list(key, value);
  else if (key == "split.seed") c.split_seed = parse_num<std::uint64_t>(key, value);
  else if (key == "model.kind") c.model_kind = value;
  else if (key == "model.feature") c.feature = parse_num<long>(key, value);
  else if (key == "model.heads") c.heads = parse_num<long>(key, value);
  else if (key == "model.encoder_depth") c.encoder_depth = parse_num<long>(key, value);
  else if (key == "model.std_floor") c.std_floor = parse_num<double>(key, value);
  else if (key == "model.solver_step") c.solver_step = parse_num<double>(key, value);
  else if (key == "train.iterations") c.iterations = parse_num<long>(key, value);
  else if (key == "train.learning_rate") c.learning_rate = parse_num<double>(key, value);
  else if (key == "train.seed") c.train_seed = parse_num<std::uint64_t>(key, value);
  else if (key == "train.context_low") c.context_low = parse_num<double>(key, value);
  else if (key == "train.context_high") c.context_high = parse_num<double>(key, value);
  else if (key == "train.latent_samples_predict")
    c.latent_samples_predict = parse_num<long>(key, value);
  else if (key == "train.kl_per_target") c.kl_per_target = parse_bool(key, value);
  else if (key == "train.clip_norm") c.clip_norm = parse_num<double>(key, value);
  else if (key == "eval.ci") c.ci = value;
  else throw ConfigError("config: unknown key '" + key + "'");
}

inline RunConfig parse_config_text(const std::string& text) {
  RunConfig c;
  std::istringstream is(text);
  std::string line;
  long lineno = 0;
  while (std::getline(is, line)) {
    ++lineno;
    std::string s = detail::trim(line);
    if (s.empty() || s[0] == '#') continue;
    size_t eq = s.find('=');
    if (eq == std::string::npos)
      throw ConfigError("config: line " + std::to_string(lineno) + " is not key = value");
    apply_key(c, detail::trim(s.substr(0, eq)), detail::trim(s.substr(eq + 1)));
  }
  return c;
}

inline RunConfig load_config(const std::string& path) {
  std::ifstream f(path);
  if (!f) throw IoError("cannot open config " + path);
  std::ostringstream os;
  os << f.rdbuf();
  return parse_config_text(os.str());
}

inline std::string resolved_text(const RunConfig& c) {
  std::ostringstream os;
  os.precision(17);
  os << "dataset.source = " << c.dataset_source << "\n";
  if (!c.dataset_path.empty()) os << "dataset.path = " << c.dataset_path << "\n";
  os << "spiral.n_points = " << c.spiral_n << "\n"
     << "spiral.x_min = " << c.spiral_x_min << "\n"
     << "spiral.x_max = " << c.spiral_x_max << "\n"
     << "spiral.noise_std = " << c.spiral_noise << "\n"
     << "synthetic6.n = " << c.synthetic6_n << "\n"
     << "synthetic6.noise_std = " << c.synthetic6_noise << "\n"
     << "dataset.seed = " << c.data_seed << "\n"
     << "split.test_count = " << c.test_count << "\n";
  if (!c.nested_sizes.empty()) {
    os << "split.nested_sizes = ";
    for (size_t i = 0; i < c.nested_sizes.size(); ++i)
      os << (i ? "," : "") << c.nested_sizes[i];
    os << "\n";
  }
  os << "split.seed = " << c.split_seed << "\n"
     << "model.kind = " << c.model_kind << "\n"
     << "model.feature = " << c.feature << "\n"
     << "model.heads = " << c.heads << "\n"
     << "model.encoder_depth = " << c.encoder_depth << "\n"
     << "model.std_floor = " << c.std_floor << "\n"
     << "model.solver_step = " << c.solver_step << "\n"
     << "train.iterations = " << c.iterations << "\n"
     << "train.learning_rate = " << c.learning_rate << "\n"
     << "train.seed = " << c.train_seed << "\n"
     << "train.context_low = " << c.context_low << "\n"
     << "train.context_high = " << c.context_high << "\n"
     << "train.latent_samples_predict = " << c.latent_samples_predict << "\n"
     << "train.kl_per_target = " << (c.kl_per_target ? "true" : "false") << "\n"
     << "train.clip_norm = " << c.clip_norm << "\n"
     << "eval.ci = " << c.ci << "\n";
  return os.str();
}

}  // namespace npode::cli
