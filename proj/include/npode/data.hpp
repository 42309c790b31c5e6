#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <fstream>
#include <sstream>
#include <string>
#include <utility>
#include <vector>

#include "npode/errors.hpp"
#include "npode/rng.hpp"

namespace npode::data {

using ad::Rng;

struct Table {
  long rows = 0;
  long cols = 0;
  std::vector<double> v;

  Table() = default;
  Table(long r, long c) : rows(r), cols(c), v(r * c, 0.0) {}
  double& at(long r, long c) { return v[r * cols + c]; }
  double at(long r, long c) const { return v[r * cols + c]; }
  bool empty() const { return rows == 0; }
};

// Per-column (min, max) captured when a dataset is normalized into [-2, 2].
struct NormState {
  std::vector<std::pair<double, double>> x;
  std::vector<std::pair<double, double>> y;
  bool present() const { return !x.empty() || !y.empty(); }
};

struct Dataset {
  Table X;  // [n x m]
  Table Y;  // [n x p]
  std::string provenance;  // spiral | csv | synthetic6
  bool normalized = false;
  NormState norm;
  Table noiseless;  // spiral only: the exact curve, same shape as Y

  long n() const { return X.rows; }
  long m() const { return X.cols; }
  long p() const { return Y.cols; }

  Dataset subset(const std::vector<int>& idx) const {
    Dataset out = *this;
    out.X = Table(static_cast<long>(idx.size()), m());
    out.Y = Table(static_cast<long>(idx.size()), p());
    if (!noiseless.empty()) out.noiseless = Table(static_cast<long>(idx.size()), p());
    for (size_t i = 0; i < idx.size(); ++i) {
      for (long j = 0; j < m(); ++j) out.X.at(i, j) = X.at(idx[i], j);
      for (long j = 0; j < p(); ++j) {
        out.Y.at(i, j) = Y.at(idx[i], j);
        if (!noiseless.empty()) out.noiseless.at(i, j) = noiseless.at(idx[i], j);
      }
    }
    return out;
  }

  // rows of (x_i, y_i) concatenated, the encoder input layout
  std::vector<double> xy_rows() const {
    std::vector<double> out;
    out.reserve(n() * (m() + p()));
    for (long i = 0; i < n(); ++i) {
      for (long j = 0; j < m(); ++j) out.push_back(X.at(i, j));
      for (long j = 0; j < p(); ++j) out.push_back(Y.at(i, j));
    }
    return out;
  }
};

// ---- generators ----

struct SpiralConfig {
  long n_points = 200;
  double x_min = 0.0;
  double x_max = 4.0 * M_PI;
  double y0_1 = 1.0;
  double y0_2 = 0.0;
  double scale = 4.0;
  double noise_std = 0.01;
  std::uint64_t seed = 0;
};

// Exact flow of dy/dx = [[-0.1,-1],[1,-0.1]] y: e^{-0.1 x} times a rotation.
inline std::pair<double, double> spiral_flow(double x, double y1, double y2) {
  double decay = std::exp(-0.1 * x);
  double c = std::cos(x), s = std::sin(x);
  return {decay * (c * y1 - s * y2), decay * (s * y1 + c * y2)};
}

inline Dataset generate_spiral(const SpiralConfig& cfg) {
  if (cfg.n_points < 2) throw ConfigError("spiral: n_points must be >= 2");
  if (cfg.noise_std < 0) throw ConfigError("spiral: noise_std must be >= 0");
  Dataset ds;
  ds.provenance = "spiral";
  ds.X = Table(cfg.n_points, 1);
  ds.Y = Table(cfg.n_points, 2);
  ds.noiseless = Table(cfg.n_points, 2);
  Rng rng(cfg.seed);
  for (long i = 0; i < cfg.n_points; ++i) {
    double x = cfg.x_min + (cfg.x_max - cfg.x_min) * i / double(cfg.n_points - 1);
    auto [y1, y2] = spiral_flow(x, cfg.y0_1, cfg.y0_2);
    ds.X.at(i, 0) = x;
    ds.noiseless.at(i, 0) = cfg.scale * y1;
    ds.noiseless.at(i, 1) = cfg.scale * y2;
    ds.Y.at(i, 0) = ds.noiseless.at(i, 0) + rng.normal(0.0, cfg.noise_std);
    ds.Y.at(i, 1) = ds.noiseless.at(i, 1) + rng.normal(0.0, cfg.noise_std);
  }
  return ds;
}

// Input ranges of the six tabular factors (two mechanical, four corrosion).
inline const std::vector<std::pair<double, double>>& synthetic6_ranges() {
  static const std::vector<std::pair<double, double>> r = {
      {55.0, 95.0},      // Young's modulus
      {1.0, 5.0},        // yield strength
      {-280.0, -210.0},  // cathodic Tafel slope
      {2e-8, 2e-7},      // cathodic exchange current
      {250.0, 290.0},    // anodic Tafel slope
      {1e-13, 5e-13},    // anodic exchange current
  };
  return r;
}

// Smooth response over the unit-normalized inputs u_i = (x_i - lo_i)/(hi_i - lo_i):
//   y = 0.8 + 1.2 u1 - 0.7 u2 + 0.9 u3 u4 + 0.6 exp(-3 (u5 - 0.5)^2) + 0.4 u6^2
// Always positive over the input box, so MAPE is well defined.
inline double synthetic6_response(const std::vector<double>& u) {
  return 0.8 + 1.2 * u[0] - 0.7 * u[1] + 0.9 * u[2] * u[3] +
         0.6 * std::exp(-3.0 * (u[4] - 0.5) * (u[4] - 0.5)) + 0.4 * u[5] * u[5];
}

inline Dataset generate_synthetic6(long n, double noise_std, std::uint64_t seed) {
  if (n < 2) throw ConfigError("synthetic6: n must be >= 2");
  if (noise_std < 0) throw ConfigError("synthetic6: noise_std must be >= 0");
  const auto& ranges = synthetic6_ranges();
  Dataset ds;
  ds.provenance = "synthetic6";
  ds.X = Table(n, 6);
  ds.Y = Table(n, 1);
  Rng rng(seed);
  for (long i = 0; i < n; ++i) {
    std::vector<double> u(6);
    for (long j = 0; j < 6; ++j) {
      u[j] = rng.uniform();
      ds.X.at(i, j) = ranges[j].first + u[j] * (ranges[j].second - ranges[j].first);
    }
    ds.Y.at(i, 0) = synthetic6_response(u) + rng.normal(0.0, noise_std);
  }
  return ds;
}

// ---- normalization (all variables into [-2, 2]) ----

inline double normalize_value(double v, std::pair<double, double> mm) {
  return (v - mm.first) / (mm.second - mm.first) * 4.0 - 2.0;
}

inline double denormalize_value(double v, std::pair<double, double> mm) {
  return (v + 2.0) / 4.0 * (mm.second - mm.first) + mm.first;
}

// Linear scale factor for spreads (standard deviations carry no offset).
inline double denormalize_scale(double s, std::pair<double, double> mm) {
  return s * (mm.second - mm.first) / 4.0;
}

inline Dataset normalize(const Dataset& raw) {
  auto column_minmax = [](const Table& t, long c, const char* kind) {
    double lo = t.at(0, c), hi = t.at(0, c);
    for (long i = 1; i < t.rows; ++i) {
      lo = std::min(lo, t.at(i, c));
      hi = std::max(hi, t.at(i, c));
    }
    if (!(hi > lo))
      throw DataError(std::string("normalize: constant ") + kind + " column " +
                      std::to_string(c + 1));
    return std::pair{lo, hi};
  };
  Dataset ds = raw;
  ds.normalized = true;
  ds.norm = {};
  for (long c = 0; c < ds.m(); ++c) {
    auto mm = column_minmax(ds.X, c, "x");
    ds.norm.x.push_back(mm);
    for (long i = 0; i < ds.n(); ++i) ds.X.at(i, c) = normalize_value(ds.X.at(i, c), mm);
  }
  for (long c = 0; c < ds.p(); ++c) {
    auto mm = column_minmax(ds.Y, c, "y");
    ds.norm.y.push_back(mm);
    for (long i = 0; i < ds.n(); ++i) ds.Y.at(i, c) = normalize_value(ds.Y.at(i, c), mm);
    if (!ds.noiseless.empty())
      for (long i = 0; i < ds.n(); ++i)
        ds.noiseless.at(i, c) = normalize_value(ds.noiseless.at(i, c), mm);
  }
  return ds;
}

// Applies an already-captured normalization (e.g. the training set's) to raw
// rows of another dataset.
inline Dataset normalize_with(const Dataset& raw, const NormState& norm) {
  if (static_cast<long>(norm.x.size()) != raw.m() ||
      static_cast<long>(norm.y.size()) != raw.p())
    throw ContractError("normalize_with: state shape mismatch");
  Dataset ds = raw;
  ds.normalized = true;
  ds.norm = norm;
  for (long c = 0; c < ds.m(); ++c)
    for (long i = 0; i < ds.n(); ++i) ds.X.at(i, c) = normalize_value(ds.X.at(i, c), norm.x[c]);
  for (long c = 0; c < ds.p(); ++c) {
    for (long i = 0; i < ds.n(); ++i) ds.Y.at(i, c) = normalize_value(ds.Y.at(i, c), norm.y[c]);
    if (!ds.noiseless.empty())
      for (long i = 0; i < ds.n(); ++i)
        ds.noiseless.at(i, c) = normalize_value(ds.noiseless.at(i, c), norm.y[c]);
  }
  return ds;
}

inline std::vector<double> denormalize(const Dataset& ds, const std::vector<double>& values,
                                       long y_column) {
  if (!ds.normalized || y_column >= static_cast<long>(ds.norm.y.size()))
    throw ContractError("denormalize: no normalization state for column " +
                        std::to_string(y_column));
  std::vector<double> out(values.size());
  for (size_t i = 0; i < values.size(); ++i)
    out[i] = denormalize_value(values[i], ds.norm.y[y_column]);
  return out;
}

// ---- CSV + sidecar ----

inline void save_csv(const Dataset& ds, const std::string& path) {
  std::ofstream f(path);
  if (!f) throw IoError("cannot write " + path);
  f.precision(17);
  for (long j = 0; j < ds.m(); ++j) f << (j ? "," : "") << "x" << (j + 1);
  for (long j = 0; j < ds.p(); ++j) f << ",y" << (j + 1);
  f << "\n";
  for (long i = 0; i < ds.n(); ++i) {
    for (long j = 0; j < ds.m(); ++j) f << (j ? "," : "") << ds.X.at(i, j);
    for (long j = 0; j < ds.p(); ++j) f << "," << ds.Y.at(i, j);
    f << "\n";
  }
}

inline std::vector<std::string> split_line(const std::string& line) {
  std::vector<std::string> out;
  std::string cur;
  for (char c : line) {
    if (c == ',') {
      out.push_back(cur);
      cur.clear();
    } else if (c != '\r') {
      cur += c;
    }
  }
  out.push_back(cur);
  return out;
}

// Columns named x1..xm are inputs and y1..yp outputs, in any column order.
inline Dataset load_csv(const std::string& path) {
  std::ifstream f(path);
  if (!f) throw IoError("cannot open " + path);
  std::string line;
  if (!std::getline(f, line)) throw DataError(path + ": empty file, header required");
  auto header = split_line(line);
  std::vector<long> x_at(header.size(), -1), y_at(header.size(), -1);
  long m = 0, p = 0;
  for (size_t c = 0; c < header.size(); ++c) {
    const std::string& h = header[c];
    if (h.size() >= 2 && (h[0] == 'x' || h[0] == 'y')) {
      long idx;
      try {
        idx = std::stol(h.substr(1));
      } catch (...) {
        throw DataError(path + ": unrecognized column '" + h + "'");
      }
      if (idx < 1) throw DataError(path + ": unrecognized column '" + h + "'");
      if (h[0] == 'x') {
        x_at[c] = idx - 1;
        m = std::max(m, idx);
      } else {
        y_at[c] = idx - 1;
        p = std::max(p, idx);
      }
    } else {
      throw DataError(path + ": unrecognized column '" + h + "'");
    }
  }
  if (m == 0 || p == 0) throw DataError(path + ": header must contain x* and y* columns");

  Dataset ds;
  ds.provenance = "csv";
  std::vector<double> xs, ys;
  long row = 1;
  while (std::getline(f, line)) {
    ++row;
    if (line.empty()) continue;
    auto fields = split_line(line);
    if (fields.size() != header.size())
      throw DataError(path + ": row " + std::to_string(row) + " has " +
                      std::to_string(fields.size()) + " fields, expected " +
                      std::to_string(header.size()));
    std::vector<double> xr(m), yr(p);
    for (size_t c = 0; c < fields.size(); ++c) {
      double val;
      size_t used = 0;
      try {
        val = std::stod(fields[c], &used);
      } catch (...) {
        used = 0;
      }
      if (used != fields[c].size() || fields[c].empty() || !std::isfinite(val))
        throw DataError(path + ": row " + std::to_string(row) + ", column '" + header[c] +
                        "': cannot parse '" + fields[c] + "'");
      if (x_at[c] >= 0) xr[x_at[c]] = val;
      else yr[y_at[c]] = val;
    }
    xs.insert(xs.end(), xr.begin(), xr.end());
    ys.insert(ys.end(), yr.begin(), yr.end());
  }
  ds.X = Table(static_cast<long>(xs.size()) / m, m);
  ds.X.v = xs;
  ds.Y = Table(static_cast<long>(ys.size()) / p, p);
  ds.Y.v = ys;
  if (ds.n() == 0) throw DataError(path + ": no data rows");
  return ds;
}

// ---- train/test splitting ----

struct SplitSpec {
  long test_count = 0;
  std::vector<long> nested_train_sizes;  // strictly increasing, optional
  std::uint64_t seed = 0;
};

struct SplitResult {
  Dataset train;
  Dataset test;
  std::vector<int> train_indices;  // into the source dataset
  std::vector<int> test_indices;
  // Monotone nested subsets of the training set (indices into `train`).
  std::vector<std::vector<int>> nested;

  Dataset nested_train(size_t i) const { return train.subset(nested[i]); }
};

inline SplitResult split_train_test(const Dataset& ds, const SplitSpec& spec) {
  long n = ds.n();
  if (spec.test_count <= 0 || spec.test_count >= n)
    throw ContractError("split: test_count " + std::to_string(spec.test_count) +
                        " invalid for n = " + std::to_string(n));
  for (size_t i = 0; i < spec.nested_train_sizes.size(); ++i) {
    long s = spec.nested_train_sizes[i];
    if (s <= 0 || s > n - spec.test_count || (i && s <= spec.nested_train_sizes[i - 1]))
      throw ContractError("split: nested sizes must be strictly increasing and <= " +
                          std::to_string(n - spec.test_count));
  }
  Rng rng(spec.seed);
  auto perm = rng.permutation(static_cast<int>(n));
  SplitResult out;
  out.test_indices.assign(perm.begin(), perm.begin() + spec.test_count);
  out.train_indices.assign(perm.begin() + spec.test_count, perm.end());
  std::sort(out.test_indices.begin(), out.test_indices.end());
  std::sort(out.train_indices.begin(), out.train_indices.end());
  out.train = ds.subset(out.train_indices);
  out.test = ds.subset(out.test_indices);
  if (!spec.nested_train_sizes.empty()) {
    // successively adding points keeps each subset inside the next
    auto order = rng.permutation(static_cast<int>(out.train_indices.size()));
    for (long s : spec.nested_train_sizes) {
      std::vector<int> idx(order.begin(), order.begin() + s);
      std::sort(idx.begin(), idx.end());
      out.nested.push_back(idx);
    }
  }
  return out;
}

}  // namespace npode::data
