#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>

#include "npode/gp.hpp"
#include "npode/rng.hpp"

using namespace npode;
using namespace npode::gp;
using npode::data::Table;

TEST_CASE("matern kernel closed forms") {
  std::vector<double> x{0.0}, z{1.0};
  CHECK(matern_kernel(x, x, 1.0, 2.5) == doctest::Approx(2.5).epsilon(1e-12));
  double s5 = std::sqrt(5.0);
  CHECK(matern_kernel(x, z, 1.0, 1.0) ==
        doctest::Approx((1.0 + s5 + 5.0 / 3.0) * std::exp(-s5)).epsilon(1e-12));
  CHECK(matern_kernel(x, z, 1.0, 1.0) == doctest::Approx(0.52399).epsilon(1e-4));
  // symmetry on random pairs
  ad::Rng rng(1);
  for (int t = 0; t < 10; ++t) {
    std::vector<double> a{rng.normal(0, 1), rng.normal(0, 1)};
    std::vector<double> b{rng.normal(0, 1), rng.normal(0, 1)};
    CHECK(matern_kernel(a, b, 0.7, 1.3) ==
          doctest::Approx(matern_kernel(b, a, 0.7, 1.3)).epsilon(1e-14));
    CHECK(polynomial_kernel(a, b, 0.5, 1.0, 3) ==
          doctest::Approx(polynomial_kernel(b, a, 0.5, 1.0, 3)).epsilon(1e-12));
  }
  // nu = 3/2 variant: (1 + sqrt(3) r / l) e^{-sqrt(3) r / l}
  double s3 = std::sqrt(3.0);
  CHECK(matern_kernel(x, z, 1.0, 1.0, 1.5) ==
        doctest::Approx((1.0 + s3) * std::exp(-s3)).epsilon(1e-12));
}

TEST_CASE("polynomial kernel closed forms") {
  std::vector<double> x{1.0, 1.0}, o{1.0, -1.0};
  CHECK(polynomial_kernel(x, o, 1.0, 1.0, 2) == doctest::Approx(1.0).epsilon(1e-12));
  CHECK(polynomial_kernel(x, o, 1.0, 1.0, 3) == doctest::Approx(1.0).epsilon(1e-12));
  CHECK(polynomial_kernel(x, x, 1.0, 0.0, 2) == doctest::Approx(4.0).epsilon(1e-12));
}

static Table column(const std::vector<double>& v) {
  Table t(static_cast<long>(v.size()), 1);
  t.v = v;
  return t;
}

TEST_CASE("gp fit and predict on a smooth function") {
  // y = sin(x) on [-2, 2]
  std::vector<double> xs, ys;
  for (int i = 0; i < 15; ++i) {
    double x = -2.0 + 4.0 * i / 14.0;
    xs.push_back(x);
    ys.push_back(std::sin(x));
  }
  GpModel m = gp_fit(column(xs), ys, KernelKind::Matern);
  // interpolation: low-noise fit should come close at training points
  auto pr = gp_predict(m, column(xs));
  for (size_t i = 0; i < xs.size(); ++i) {
    CHECK(std::abs(pr.mean.at(i, 0) - ys[i]) < 1e-2);
    CHECK(pr.std.at(i, 0) > 0);
  }
  // predictive variance never below fitted noise
  for (size_t i = 0; i < xs.size(); ++i) {
    double v = pr.std.at(i, 0) * pr.std.at(i, 0);
    CHECK(v >= m.hyper.noise_var - 1e-10);
  }
  // far from data the matern posterior reverts to the prior
  Table far(1, 1);
  far.at(0, 0) = 100.0;
  auto fp = gp_predict(m, far);
  CHECK(std::abs(fp.mean.at(0, 0)) < 1e-6);
  CHECK(fp.std.at(0, 0) * fp.std.at(0, 0) ==
        doctest::Approx(m.hyper.signal_var + m.hyper.noise_var).epsilon(1e-6));
}

TEST_CASE("gp on pure noise selects noise over signal") {
  // inputs clustered well inside the smallest grid lengthscale, so any signal
  // hypothesis implies strong correlation the i.i.d. draw contradicts
  ad::Rng rng(7);
  std::vector<double> xs, ys;
  for (int i = 0; i < 25; ++i) {
    xs.push_back(0.05 * i / 24.0);
    ys.push_back(rng.normal(0.0, 1.0));
  }
  GpModel m = gp_fit(column(xs), ys, KernelKind::Matern);
  CHECK(m.hyper.noise_var > m.hyper.signal_var);
}

TEST_CASE("duplicated inputs fit via jitter") {
  std::vector<double> xs{0.0, 0.0, 1.0, 2.0}, ys{0.5, 0.5, 1.0, 1.5};
  GpModel m = gp_fit(column(xs), ys, KernelKind::Matern);
  CHECK(m.n() == 4);
  auto pr = gp_predict(m, column({0.5}));
  CHECK(std::isfinite(pr.mean.at(0, 0)));
}

TEST_CASE("cholesky reconstructs the kernel matrix") {
  std::vector<double> xs, ys;
  ad::Rng rng(3);
  for (int i = 0; i < 12; ++i) {
    xs.push_back(rng.uniform() * 4.0 - 2.0);
    ys.push_back(std::cos(xs.back()));
  }
  GpModel m = gp_fit(column(xs), ys, KernelKind::Polynomial);
  long n = m.n();
  // L L^T == K + (noise + jitter) I, relative Frobenius error < 1e-8
  double num = 0, den = 0;
  for (long i = 0; i < n; ++i)
    for (long j = 0; j < n; ++j) {
      double ll = 0;
      for (long k = 0; k < n; ++k) ll += m.chol[i * n + k] * m.chol[j * n + k];
      double kij = m.kernel(m.row(i), m.row(j));
      if (i == j) kij += m.hyper.noise_var + m.jitter;
      num += (ll - kij) * (ll - kij);
      den += kij * kij;
    }
  CHECK(std::sqrt(num / den) < 1e-8);
}

TEST_CASE("predictions invariant to training row permutation") {
  std::vector<double> xs{-1.5, -0.5, 0.3, 0.9, 1.7}, ys;
  for (double x : xs) ys.push_back(x * x);
  GpModel a = gp_fit(column(xs), ys, KernelKind::Matern);
  std::vector<double> xp{1.7, -0.5, 0.9, -1.5, 0.3}, yp;
  for (double x : xp) yp.push_back(x * x);
  GpModel b = gp_fit(column(xp), yp, KernelKind::Matern);
  Table q(3, 1);
  q.at(0, 0) = -1.0;
  q.at(1, 0) = 0.0;
  q.at(2, 0) = 1.2;
  auto pa = gp_predict(a, q);
  auto pb = gp_predict(b, q);
  for (long i = 0; i < 3; ++i) {
    CHECK(std::abs(pa.mean.at(i, 0) - pb.mean.at(i, 0)) < 1e-8);
    CHECK(std::abs(pa.std.at(i, 0) - pb.std.at(i, 0)) < 1e-8);
  }
}

TEST_CASE("winner maximizes log marginal likelihood and refit matches") {
  std::vector<double> xs, ys;
  for (int i = 0; i < 10; ++i) {
    xs.push_back(i / 9.0 * 4.0 - 2.0);
    ys.push_back(std::tanh(xs.back()));
  }
  GpModel m = gp_fit(column(xs), ys, KernelKind::Matern);
  GpModel r = gp_refit(m);
  CHECK(r.log_marginal == doctest::Approx(m.log_marginal).epsilon(1e-12));
  // a perturbed hyperparameter must not beat the winner
  GpModel worse = m;
  worse.hyper.lengthscale *= 1.7;
  GpModel w = gp_refit(worse);
  CHECK(w.log_marginal <= m.log_marginal + 1e-9);
}

TEST_CASE("noise monotonicity of predictive variance") {
  std::vector<double> xs{-1.0, 0.0, 1.0}, ys{1.0, 0.0, 1.0};
  GpModel m = gp_fit(column(xs), ys, KernelKind::Matern);
  GpModel noisier = m;
  noisier.hyper.noise_var = m.hyper.noise_var * 10 + 0.01;
  noisier = gp_refit(noisier);
  Table q(5, 1);
  for (long i = 0; i < 5; ++i) q.at(i, 0) = -2.0 + i;
  auto pa = gp_predict(m, q);
  auto pb = gp_predict(noisier, q);
  for (long i = 0; i < 5; ++i)
    CHECK(pb.std.at(i, 0) >= pa.std.at(i, 0) - 1e-10);
}

TEST_CASE("fit preconditions") {
  Table one(1, 1);
  CHECK_THROWS_AS(gp_fit(one, {1.0}, KernelKind::Matern), ContractError);
  Table two(2, 1);
  CHECK_THROWS_AS(gp_fit(two, {1.0}, KernelKind::Matern), ContractError);
}
