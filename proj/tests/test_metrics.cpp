#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>

#include "npode/metrics.hpp"
#include "npode/rng.hpp"

using namespace npode;
using namespace npode::metrics;
using npode::data::Table;

TEST_CASE("rmse direct evaluations") {
  Table a(1, 2), b(1, 2);
  a.at(0, 0) = 1.0;
  CHECK(rmse(a, a) == 0.0);
  CHECK(rmse(a, b) == doctest::Approx(std::sqrt(0.5)).epsilon(1e-12));
  CHECK(rmse(a, b) == doctest::Approx(0.70711).epsilon(1e-5));

  Table c(2, 1), d(2, 1);
  c.at(0, 0) = 1.0;
  c.at(1, 0) = -1.0;  // errors {1, -1} against zero
  CHECK(rmse(c, d) == doctest::Approx(1.0).epsilon(1e-12));

  Table e(1, 3);
  CHECK_THROWS_AS(rmse(a, e), ContractError);
}

TEST_CASE("mape direct evaluations and zero guard") {
  CHECK(mape({1.0, 2.0}, {1.0, 2.0}) == 0.0);
  CHECK(mape({1.0, 2.0}, {1.1, 1.8}) == doctest::Approx(0.10).epsilon(1e-12));
  CHECK(mape({-2.0}, {-1.0}) == doctest::Approx(0.5).epsilon(1e-12));
  // scale invariance
  CHECK(mape({3.0, -7.0}, {2.5, -8.0}) ==
        doctest::Approx(mape({30.0, -70.0}, {25.0, -80.0})).epsilon(1e-12));
  try {
    mape({1.0, 0.0}, {1.0, 1.0});
    CHECK(false);
  } catch (const DomainError& e) {
    CHECK(std::string(e.what()).find("2") != std::string::npos);
  }
}

TEST_CASE("confidence intervals") {
  Prediction p{Table(2, 1), Table(2, 1)};
  p.mean.at(0, 0) = 0.0;
  p.std.at(0, 0) = 1.0;
  p.mean.at(1, 0) = 3.0;
  p.std.at(1, 0) = 0.5;
  auto ci95 = confidence_interval(p, CiKind::Ci95);
  CHECK(ci95[0][0].low == doctest::Approx(-1.96).epsilon(1e-12));
  CHECK(ci95[0][0].high == doctest::Approx(1.96).epsilon(1e-12));
  auto one = confidence_interval(p, CiKind::OneSigma);
  CHECK(one[1][0].low == doctest::Approx(2.5).epsilon(1e-12));
  CHECK(one[1][0].high == doctest::Approx(3.5).epsilon(1e-12));
  // width ratio exactly 1.96
  double w95 = ci95[1][0].high - ci95[1][0].low;
  double w1 = one[1][0].high - one[1][0].low;
  CHECK(w95 / w1 == doctest::Approx(1.96).epsilon(1e-12));

  Prediction bad = p;
  bad.std.at(0, 0) = 0.0;
  CHECK_THROWS_AS(confidence_interval(bad, CiKind::Ci95), ContractError);
}

TEST_CASE("coverage extremes") {
  Table y(3, 1);
  y.at(0, 0) = 1.0;
  y.at(1, 0) = -5.0;
  y.at(2, 0) = 100.0;
  std::vector<std::vector<Interval>> huge(3, {Interval{-1e18, 1e18}});
  CHECK(coverage(y, huge).fraction == 1.0);
  std::vector<std::vector<Interval>> wrong(3, {Interval{7.0, 7.0}});
  CHECK(coverage(y, wrong).fraction == 0.0);
}

TEST_CASE("ci95 Monte Carlo coverage near 0.95") {
  const long n = 10000;
  ad::Rng rng(123);
  Prediction p{Table(n, 1), Table(n, 1)};
  Table y(n, 1);
  for (long i = 0; i < n; ++i) {
    double mu = rng.uniform() * 4.0 - 2.0;
    double sd = 0.2 + rng.uniform();
    p.mean.at(i, 0) = mu;
    p.std.at(i, 0) = sd;
    y.at(i, 0) = mu + rng.normal(0.0, sd);
  }
  auto cov = coverage(y, confidence_interval(p, CiKind::Ci95));
  CHECK(cov.fraction > 0.93);
  CHECK(cov.fraction < 0.97);
  CHECK(std::abs(cov.fraction - 0.95) < 0.01);
}

TEST_CASE("evaluate report wiring") {
  Table y(4, 1);
  Prediction p{Table(4, 1), Table(4, 1)};
  for (long i = 0; i < 4; ++i) {
    y.at(i, 0) = 1.0 + i;
    p.mean.at(i, 0) = 1.1 + i;
    p.std.at(i, 0) = 0.5;
  }
  EvalReport r = evaluate(y, p, CiKind::Ci95);
  CHECK(r.rmse_value == doctest::Approx(0.1).epsilon(1e-9));
  REQUIRE(r.mape_value.has_value());
  CHECK(*r.mape_value == doctest::Approx((0.1 / 1 + 0.1 / 2 + 0.1 / 3 + 0.1 / 4) / 4)
                             .epsilon(1e-9));
  CHECK(r.cover.fraction == 1.0);
  CHECK(r.intervals.size() == 4);
  CHECK(!r.summary().empty());
  // one header plus one row per point
  std::string csv = r.csv();
  long lines = std::count(csv.begin(), csv.end(), '\n');
  CHECK(lines == 5);
}
