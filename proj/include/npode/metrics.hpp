#pragma once

#include <cmath>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "npode/data.hpp"

namespace npode::metrics {

using data::Table;

// Plain (off-tape) predictive distribution over a set of points.
struct Prediction {
  Table mean;  // [n x p]
  Table std;   // [n x p]
};

// sqrt( (1/(N p)) sum_i ||y_i - yhat_i||^2 ); for p = 2 this is the published
// 1/(2N) form.
inline double rmse(const Table& y_true, const Table& y_pred) {
  if (y_true.rows != y_pred.rows || y_true.cols != y_pred.cols || y_true.rows == 0)
    throw ContractError("rmse: shape mismatch or empty input");
  double s = 0;
  for (size_t i = 0; i < y_true.v.size(); ++i) {
    double d = y_true.v[i] - y_pred.v[i];
    s += d * d;
  }
  return std::sqrt(s / static_cast<double>(y_true.v.size()));
}

// (1/N) sum |y_i - yhat_i| / |y_i|, as a fraction.
inline double mape(const std::vector<double>& y_true, const std::vector<double>& y_pred) {
  if (y_true.size() != y_pred.size() || y_true.empty())
    throw ContractError("mape: shape mismatch or empty input");
  double s = 0;
  for (size_t i = 0; i < y_true.size(); ++i) {
    if (y_true[i] == 0.0)
      throw DomainError("mape: y_true is zero at row " + std::to_string(i + 1) +
                        ", relative error undefined");
    s += std::fabs(y_true[i] - y_pred[i]) / std::fabs(y_true[i]);
  }
  return s / static_cast<double>(y_true.size());
}

enum class CiKind { OneSigma, Ci95 };

inline double ci_multiplier(CiKind k) { return k == CiKind::OneSigma ? 1.0 : 1.96; }

struct Interval {
  double low = 0;
  double high = 0;
};

// Per-point, per-output-dimension intervals: mean +- multiplier * std.
inline std::vector<std::vector<Interval>> confidence_interval(const Prediction& pred,
                                                              CiKind kind) {
  double mult = ci_multiplier(kind);
  std::vector<std::vector<Interval>> out(pred.mean.rows);
  for (long i = 0; i < pred.mean.rows; ++i) {
    out[i].resize(pred.mean.cols);
    for (long j = 0; j < pred.mean.cols; ++j) {
      double s = pred.std.at(i, j);
      if (!(s > 0)) throw ContractError("confidence_interval: non-positive std");
      out[i][j] = {pred.mean.at(i, j) - mult * s, pred.mean.at(i, j) + mult * s};
    }
  }
  return out;
}

struct CoverageResult {
  double fraction = 0;                 // all output dims inside
  std::vector<bool> covered;           // per point
  std::vector<double> per_dimension;   // per output dim
};

inline CoverageResult coverage(const Table& y_true,
                               const std::vector<std::vector<Interval>>& intervals) {
  if (y_true.rows != static_cast<long>(intervals.size()))
    throw ContractError("coverage: row count mismatch");
  CoverageResult out;
  out.per_dimension.assign(y_true.cols, 0.0);
  long hits = 0;
  for (long i = 0; i < y_true.rows; ++i) {
    bool all = true;
    for (long j = 0; j < y_true.cols; ++j) {
      double y = y_true.at(i, j);
      bool in = intervals[i][j].low <= y && y <= intervals[i][j].high;
      all &= in;
      if (in) out.per_dimension[j] += 1.0;
    }
    out.covered.push_back(all);
    if (all) ++hits;
  }
  for (auto& d : out.per_dimension) d /= static_cast<double>(y_true.rows);
  out.fraction = static_cast<double>(hits) / static_cast<double>(y_true.rows);
  return out;
}

struct EvalReport {
  double rmse_value = 0;
  std::optional<double> mape_value;  // fraction; single-output, nonzero truths only
  CiKind ci_kind = CiKind::OneSigma;
  Table y_true;
  Prediction pred;
  std::vector<std::vector<Interval>> intervals;
  CoverageResult cover;

  std::string summary() const {
    std::ostringstream os;
    os.precision(6);
    os << "rmse=" << rmse_value;
    if (mape_value) os << " mape=" << *mape_value;
    os << " coverage=" << cover.fraction
       << " ci=" << (ci_kind == CiKind::OneSigma ? "one_sigma" : "ci95");
    return os.str();
  }

  std::string csv() const {
    std::ostringstream os;
    os.precision(17);
    long p = y_true.cols;
    for (long j = 1; j <= p; ++j)
      os << (j > 1 ? "," : "") << "y_true_" << j << ",y_mean_" << j << ",y_std_" << j
         << ",ci_low_" << j << ",ci_high_" << j;
    os << ",covered\n";
    for (long i = 0; i < y_true.rows; ++i) {
      for (long j = 0; j < p; ++j)
        os << (j ? "," : "") << y_true.at(i, j) << "," << pred.mean.at(i, j) << ","
           << pred.std.at(i, j) << "," << intervals[i][j].low << ","
           << intervals[i][j].high;
      os << "," << (cover.covered[i] ? 1 : 0) << "\n";
    }
    return os.str();
  }
};

inline EvalReport evaluate(const Table& y_true, const Prediction& pred, CiKind kind) {
  EvalReport rep;
  rep.y_true = y_true;
  rep.pred = pred;
  rep.ci_kind = kind;
  rep.rmse_value = rmse(y_true, pred.mean);
  rep.intervals = confidence_interval(pred, kind);
  rep.cover = coverage(y_true, rep.intervals);
  if (y_true.cols == 1) {
    bool zero = false;
    for (long i = 0; i < y_true.rows; ++i) zero |= y_true.at(i, 0) == 0.0;
    if (!zero) rep.mape_value = mape(y_true.v, pred.mean.v);
  }
  return rep;
}

}  // namespace npode::metrics
