#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <cstdio>
#include <fstream>
#include <set>

#include "npode/data.hpp"

using namespace npode;
using namespace npode::data;

static const double kPi = 3.14159265358979323846;

TEST_CASE("spiral closed form at x=0 and x=pi/2") {
  SpiralConfig cfg;
  cfg.noise_std = 0.0;
  cfg.n_points = 5;
  cfg.x_max = 2.0 * kPi;
  Dataset ds = generate_spiral(cfg);
  CHECK(ds.n() == 5);
  CHECK(ds.m() == 1);
  CHECK(ds.p() == 2);
  CHECK(ds.provenance == "spiral");
  CHECK(ds.Y.at(0, 0) == doctest::Approx(4.0).epsilon(1e-12));
  CHECK(ds.Y.at(0, 1) == doctest::Approx(0.0).scale(1).epsilon(1e-12));

  auto [y1, y2] = spiral_flow(kPi / 2.0, 1.0, 0.0);
  CHECK(4.0 * y1 == doctest::Approx(0.0).scale(1).epsilon(1e-12));
  CHECK(4.0 * y2 == doctest::Approx(4.0 * std::exp(-0.05 * kPi)).epsilon(1e-10));
  CHECK(4.0 * y2 == doctest::Approx(3.4186).epsilon(1e-4));
}

TEST_CASE("spiral noise variance in band") {
  SpiralConfig cfg;
  cfg.noise_std = 0.1;
  cfg.seed = 11;
  Dataset ds = generate_spiral(cfg);
  REQUIRE(ds.n() == 200);
  REQUIRE(ds.noiseless.rows == 200);
  for (long d = 0; d < 2; ++d) {
    double s2 = 0;
    for (long i = 0; i < ds.n(); ++i) {
      double e = ds.Y.at(i, d) - ds.noiseless.at(i, d);
      s2 += e * e;
    }
    s2 /= ds.n();
    CHECK(s2 > 0.6 * 0.01);
    CHECK(s2 < 1.5 * 0.01);
  }
}

TEST_CASE("spiral noiseless curve satisfies the ODE") {
  // central-difference dy/dx vs A y, A = [[-0.1,-1],[1,-0.1]]
  double h = 1e-3;
  for (double x : {0.5, 2.0, 7.0}) {
    auto [m1, m2] = spiral_flow(x - h, 1.0, 0.0);
    auto [p1, p2] = spiral_flow(x + h, 1.0, 0.0);
    auto [c1, c2] = spiral_flow(x, 1.0, 0.0);
    double d1 = (p1 - m1) / (2 * h);
    double d2 = (p2 - m2) / (2 * h);
    CHECK(std::abs(d1 - (-0.1 * c1 - c2)) < 1e-3);
    CHECK(std::abs(d2 - (c1 - 0.1 * c2)) < 1e-3);
  }
}

TEST_CASE("synthetic6 determinism, ranges, midpoint response") {
  Dataset a = generate_synthetic6(40, 0.0, 5);
  Dataset b = generate_synthetic6(40, 0.0, 5);
  CHECK(a.n() == 40);
  CHECK(a.m() == 6);
  CHECK(a.p() == 1);
  for (long i = 0; i < a.n(); ++i) {
    for (long j = 0; j < 6; ++j) CHECK(a.X.at(i, j) == b.X.at(i, j));
    CHECK(a.Y.at(i, 0) == b.Y.at(i, 0));
  }
  auto ranges = synthetic6_ranges();
  REQUIRE(ranges.size() == 6);
  for (long i = 0; i < a.n(); ++i)
    for (long j = 0; j < 6; ++j) {
      CHECK(a.X.at(i, j) >= ranges[j].first);
      CHECK(a.X.at(i, j) <= ranges[j].second);
    }
  // all unit inputs 0.5: 0.8 + 0.6 - 0.35 + 0.225 + 0.6 + 0.1
  std::vector<double> mid(6, 0.5);
  CHECK(synthetic6_response(mid) ==
        doctest::Approx(0.8 + 1.2 * 0.5 - 0.7 * 0.5 + 0.9 * 0.25 + 0.6 + 0.4 * 0.25)
            .epsilon(1e-12));
}

TEST_CASE("normalize endpoints, midpoint, and the [55,95] case") {
  std::pair<double, double> mm{55.0, 95.0};
  CHECK(normalize_value(55.0, mm) == doctest::Approx(-2.0));
  CHECK(normalize_value(95.0, mm) == doctest::Approx(2.0));
  CHECK(normalize_value(75.0, mm) == doctest::Approx(0.0).scale(1));
  CHECK(normalize_value(65.0, mm) == doctest::Approx(-1.0));
  CHECK(denormalize_value(0.0, mm) == doctest::Approx(75.0));
  CHECK(denormalize_scale(1.0, mm) == doctest::Approx(10.0));
}

TEST_CASE("normalize dataset and round trip") {
  Dataset ds = generate_synthetic6(30, 0.05, 3);
  Dataset nd = normalize(ds);
  CHECK(nd.normalized);
  CHECK(nd.norm.present());
  for (long i = 0; i < nd.n(); ++i) {
    for (long j = 0; j < nd.m(); ++j) {
      CHECK(nd.X.at(i, j) >= -2.0 - 1e-9);
      CHECK(nd.X.at(i, j) <= 2.0 + 1e-9);
      double raw = denormalize_value(nd.X.at(i, j), nd.norm.x[j]);
      CHECK(std::abs(raw - ds.X.at(i, j)) < 1e-12 * std::abs(ds.X.at(i, j)) + 1e-12);
    }
    double raw = denormalize_value(nd.Y.at(i, 0), nd.norm.y[0]);
    CHECK(std::abs(raw - ds.Y.at(i, 0)) < 1e-10);
  }
}

TEST_CASE("normalize rejects constant column") {
  Dataset ds;
  ds.X = Table(3, 1);
  ds.Y = Table(3, 1);
  for (long i = 0; i < 3; ++i) {
    ds.X.at(i, 0) = 7.0;
    ds.Y.at(i, 0) = i;
  }
  CHECK_THROWS_AS(normalize(ds), DataError);
}

TEST_CASE("csv round trip and errors") {
  Dataset ds = generate_synthetic6(7, 0.1, 9);
  const char* path = "test_data_roundtrip.csv";
  save_csv(ds, path);
  Dataset rd = load_csv(path);
  CHECK(rd.n() == 7);
  CHECK(rd.m() == 6);
  CHECK(rd.p() == 1);
  for (long i = 0; i < 7; ++i) {
    for (long j = 0; j < 6; ++j)
      CHECK(rd.X.at(i, j) == ds.X.at(i, j));
    CHECK(rd.Y.at(i, 0) == ds.Y.at(i, 0));
  }
  std::remove(path);

  {
    std::ofstream f("test_data_bad.csv");
    f << "x1,y1\n1.0,2.0\n3.0,\n";
  }
  try {
    load_csv("test_data_bad.csv");
    CHECK(false);
  } catch (const DataError& e) {
    CHECK(std::string(e.what()).find("row 3") != std::string::npos);
  }
  std::remove("test_data_bad.csv");

  {
    std::ofstream f("test_data_noy.csv");
    f << "x1,x2\n1.0,2.0\n";
  }
  CHECK_THROWS_AS(load_csv("test_data_noy.csv"), DataError);
  std::remove("test_data_noy.csv");
  CHECK_THROWS_AS(load_csv("test_data_missing_file.csv"), IoError);
}

TEST_CASE("split determinism, partition, nested monotonicity") {
  Dataset ds = generate_synthetic6(106, 0.05, 21);
  SplitSpec spec;
  spec.test_count = 20;
  spec.nested_train_sizes = {30, 50, 60, 70, 80};
  spec.seed = 4;
  SplitResult s1 = split_train_test(ds, spec);
  SplitResult s2 = split_train_test(ds, spec);
  CHECK(s1.test_indices == s2.test_indices);
  CHECK(s1.train.n() == 86);
  CHECK(s1.test.n() == 20);
  std::set<int> tr(s1.train_indices.begin(), s1.train_indices.end());
  for (int i : s1.test_indices) CHECK(tr.count(i) == 0);
  REQUIRE(s1.nested.size() == 5);
  for (size_t k = 1; k < s1.nested.size(); ++k) {
    std::set<int> cur(s1.nested[k].begin(), s1.nested[k].end());
    for (int i : s1.nested[k - 1]) CHECK(cur.count(i) == 1);
  }
  CHECK(s1.nested[0].size() == 30);
  CHECK(s1.nested[4].size() == 80);
  CHECK(s1.nested_train(0).n() == 30);

  SplitSpec bad = spec;
  bad.test_count = 200;
  CHECK_THROWS_AS(split_train_test(ds, bad), ContractError);
}
