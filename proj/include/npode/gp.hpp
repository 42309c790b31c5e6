#pragma once

#include <cmath>
#include <string>
#include <vector>

#include "npode/metrics.hpp"

namespace npode::gp {

using data::Table;
using metrics::Prediction;

enum class KernelKind { Matern, Polynomial };

inline const char* kernel_kind_name(KernelKind k) {
  return k == KernelKind::Matern ? "matern" : "polynomial";
}

// Matern covariance of distance r; nu is 5/2 (default) or 3/2.
inline double matern_of_r(double r, double lengthscale, double signal_var, double nu) {
  double a = (nu > 2.0 ? std::sqrt(5.0) : std::sqrt(3.0)) * r / lengthscale;
  double poly = nu > 2.0 ? 1.0 + a + a * a / 3.0 : 1.0 + a;
  return signal_var * poly * std::exp(-a);
}

inline double matern_kernel(const std::vector<double>& x, const std::vector<double>& z,
                            double lengthscale, double signal_var, double nu = 2.5) {
  double r2 = 0;
  for (size_t i = 0; i < x.size(); ++i) r2 += (x[i] - z[i]) * (x[i] - z[i]);
  return matern_of_r(std::sqrt(r2), lengthscale, signal_var, nu);
}

inline double polynomial_kernel(const std::vector<double>& x, const std::vector<double>& z,
                                double gamma, double offset, int degree) {
  double dot = 0;
  for (size_t i = 0; i < x.size(); ++i) dot += x[i] * z[i];
  return std::pow(gamma * dot + offset, degree);
}

struct GpHyper {
  double lengthscale = 1.0;
  double signal_var = 1.0;
  double noise_var = 1e-6;
  double gamma = 0.1;
  double offset = 0.0;
  int degree = 3;
  double matern_nu = 2.5;
};

struct GpModel {
  KernelKind kind = KernelKind::Matern;
  GpHyper hyper;
  Table X;                     // training inputs
  std::vector<double> y;       // training targets (single output)
  std::vector<double> chol;    // lower factor L of K + noise I, n x n
  std::vector<double> alpha;   // (K + noise I)^{-1} y
  double log_marginal = 0;
  double jitter = 0;

  long n() const { return X.rows; }

  double kernel(const std::vector<double>& a, const std::vector<double>& b) const {
    if (kind == KernelKind::Matern)
      return matern_kernel(a, b, hyper.lengthscale, hyper.signal_var, hyper.matern_nu);
    return polynomial_kernel(a, b, hyper.gamma, hyper.offset, hyper.degree);
  }

  std::vector<double> row(long i) const {
    std::vector<double> out(X.cols);
    for (long j = 0; j < X.cols; ++j) out[j] = X.at(i, j);
    return out;
  }
};

// In-place lower Cholesky; false when the matrix is not positive definite.
inline bool cholesky(std::vector<double>& a, long n) {
  for (long i = 0; i < n; ++i) {
    for (long j = 0; j <= i; ++j) {
      double s = a[i * n + j];
      for (long k = 0; k < j; ++k) s -= a[i * n + k] * a[j * n + k];
      if (i == j) {
        if (!(s > 0)) return false;
        a[i * n + j] = std::sqrt(s);
      } else {
        a[i * n + j] = s / a[j * n + j];
      }
    }
    for (long j = i + 1; j < n; ++j) a[i * n + j] = 0.0;
  }
  return true;
}

inline void solve_lower(const std::vector<double>& l, long n, std::vector<double>& b) {
  for (long i = 0; i < n; ++i) {
    double s = b[i];
    for (long k = 0; k < i; ++k) s -= l[i * n + k] * b[k];
    b[i] = s / l[i * n + i];
  }
}

inline void solve_upper_t(const std::vector<double>& l, long n, std::vector<double>& b) {
  for (long i = n - 1; i >= 0; --i) {
    double s = b[i];
    for (long k = i + 1; k < n; ++k) s -= l[k * n + i] * b[k];
    b[i] = s / l[i * n + i];
  }
}

namespace detail {

struct FitAttempt {
  bool ok = false;
  double log_marginal = -1e300;
  std::vector<double> chol, alpha;
  double jitter = 0;
};

inline FitAttempt try_fit(const GpModel& proto, const GpHyper& h) {
  GpModel g = proto;
  g.hyper = h;
  long n = g.n();
  std::vector<std::vector<double>> rows(n);
  for (long i = 0; i < n; ++i) rows[i] = g.row(i);
  std::vector<double> k(n * n);
  for (long i = 0; i < n; ++i)
    for (long j = 0; j <= i; ++j) k[i * n + j] = k[j * n + i] = g.kernel(rows[i], rows[j]);

  FitAttempt out;
  for (double jitter = 1e-10; jitter <= 1.0001e-4; jitter *= 10.0) {
    std::vector<double> a = k;
    for (long i = 0; i < n; ++i) a[i * n + i] += h.noise_var + jitter;
    if (!cholesky(a, n)) continue;
    std::vector<double> alpha = g.y;
    solve_lower(a, n, alpha);
    solve_upper_t(a, n, alpha);
    double quad = 0, logdet = 0;
    for (long i = 0; i < n; ++i) {
      quad += g.y[i] * alpha[i];
      logdet += std::log(a[i * n + i]);
    }
    out.ok = true;
    out.log_marginal = -0.5 * quad - logdet - 0.5 * n * std::log(2.0 * M_PI);
    out.chol = std::move(a);
    out.alpha = std::move(alpha);
    out.jitter = jitter;
    break;
  }
  return out;
}

inline std::vector<double> log_spaced(double lo, double hi, int count) {
  std::vector<double> out;
  for (int i = 0; i < count; ++i)
    out.push_back(std::exp(std::log(lo) + (std::log(hi) - std::log(lo)) * i /
                                              double(count - 1)));
  return out;
}

}  // namespace detail

// Exact GP regression; hyperparameters by log-marginal-likelihood grid search,
// Cholesky with jitter escalation from 1e-10 up to 1e-4.
inline GpModel gp_fit(const Table& x, const std::vector<double>& y, KernelKind kind,
                      double matern_nu = 2.5) {
  if (x.rows < 2) throw ContractError("gp_fit: need at least 2 rows");
  if (static_cast<long>(y.size()) != x.rows)
    throw ContractError("gp_fit: X/y row mismatch");
  GpModel proto;
  proto.kind = kind;
  proto.X = x;
  proto.y = y;

  std::vector<GpHyper> grid;
  auto noises = detail::log_spaced(1e-6, 1.0, 7);
  if (kind == KernelKind::Matern) {
    for (double l : detail::log_spaced(0.05, 5.0, 9))
      for (double s2 : {0.25, 1.0, 4.0})
        for (double nv : noises) {
          GpHyper h;
          h.lengthscale = l;
          h.signal_var = s2;
          h.noise_var = nv;
          h.matern_nu = matern_nu;
          grid.push_back(h);
        }
  } else {
    for (double gmm : detail::log_spaced(0.01, 1.0, 5))
      for (double c : {0.0, 1.0})
        for (int d : {2, 3})
          for (double nv : noises) {
            GpHyper h;
            h.gamma = gmm;
            h.offset = c;
            h.degree = d;
            h.noise_var = nv;
            grid.push_back(h);
          }
  }

  GpModel best = proto;
  detail::FitAttempt best_fit;
  bool any = false;
  for (const auto& h : grid) {
    auto attempt = detail::try_fit(proto, h);
    if (attempt.ok && (!any || attempt.log_marginal > best_fit.log_marginal)) {
      any = true;
      best.hyper = h;
      best_fit = std::move(attempt);
    }
  }
  if (!any)
    throw Error("gp_fit: kernel matrix not positive definite at maximum jitter");
  best.chol = std::move(best_fit.chol);
  best.alpha = std::move(best_fit.alpha);
  best.log_marginal = best_fit.log_marginal;
  best.jitter = best_fit.jitter;
  return best;
}

// Refits the stored (X, y) with pinned hyperparameters (no grid search).
inline GpModel gp_refit(const GpModel& m) {
  auto attempt = detail::try_fit(m, m.hyper);
  if (!attempt.ok) throw Error("gp_refit: kernel matrix not positive definite");
  GpModel out = m;
  out.chol = std::move(attempt.chol);
  out.alpha = std::move(attempt.alpha);
  out.log_marginal = attempt.log_marginal;
  out.jitter = attempt.jitter;
  return out;
}

// Posterior mean and standard deviation; the predictive variance includes the
// fitted observation noise.
inline Prediction gp_predict(const GpModel& m, const Table& x_targets) {
  if (m.chol.empty()) throw ContractError("gp_predict: model not fitted");
  long n = m.n(), t = x_targets.rows;
  Prediction out{Table(t, 1), Table(t, 1)};
  std::vector<std::vector<double>> rows(n);
  for (long i = 0; i < n; ++i) rows[i] = m.row(i);
  for (long i = 0; i < t; ++i) {
    std::vector<double> xs(x_targets.cols);
    for (long j = 0; j < x_targets.cols; ++j) xs[j] = x_targets.at(i, j);
    std::vector<double> ks(n);
    double mean = 0;
    for (long j = 0; j < n; ++j) {
      ks[j] = m.kernel(rows[j], xs);
      mean += ks[j] * m.alpha[j];
    }
    solve_lower(m.chol, n, ks);
    double reduce = 0;
    for (long j = 0; j < n; ++j) reduce += ks[j] * ks[j];
    double var = m.kernel(xs, xs) + m.hyper.noise_var - reduce;
    out.mean.at(i, 0) = mean;
    out.std.at(i, 0) = std::sqrt(std::max(var, m.hyper.noise_var * 1e-12 + 1e-300));
  }
  return out;
}

}  // namespace npode::gp
