#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <vector>

#include "npode/gradcheck.hpp"
#include "npode/model.hpp"

using namespace npode;
using namespace npode::ad;
using namespace npode::model;

namespace {

Tensor random_tensor(Shape shape, Rng& rng, double std = 1.0) {
  Tensor t(std::move(shape));
  for (long i = 0; i < t.numel(); ++i) t[i] = rng.normal(0.0, std);
  return t;
}

// dy/dx = [[-0.1,-1],[1,-0.1]] y as a tape function; state [1 x 2].
Tensor spiral_field(Tape& t, const Tensor& y) {
  static const Tensor a_t({2, 2}, {-0.1, 1.0, -1.0, -0.1});  // A^T for row vector y
  return t.matmul(y, a_t);
}

// closed-form flow e^{-0.1 x} (cos x, sin x) from y0 = (1, 0)
std::pair<double, double> spiral_exact(double x) {
  return {std::exp(-0.1 * x) * std::cos(x), std::exp(-0.1 * x) * std::sin(x)};
}

double spiral_euler_error(double step) {
  Tape t;
  OdeSolverConfig cfg{0.0, 1.0, step};
  Tensor y = euler_steps(t, Tensor({1, 2}, {1.0, 0.0}), cfg,
                         [](Tape& tt, const Tensor& s, double) { return spiral_field(tt, s); });
  auto [ex, ey] = spiral_exact(1.0);
  return std::hypot(y[0] - ex, y[1] - ey);
}

}  // namespace

TEST_CASE("assemble_decoder_input placement and width") {
  Tape t;
  const long f = 128;
  Tensor z = Tensor::zeros({1, f}), d = Tensor::zeros({1, f});
  Tensor x({1, 1}, {0.0});
  Tensor w0 = assemble_decoder_input(t, d, z, x, f);
  CHECK(w0.shape() == Shape{1, 384});
  for (long i = 0; i < 384; ++i) CHECK(w0[i] == 0.0);

  d[0] = 2.0;
  z[0] = 3.0;
  x[0] = 5.0;
  Tensor w = assemble_decoder_input(t, d, z, x, f);
  for (long i = 0; i < 384; ++i) {
    double expect = i == 0 ? 2.0 : i == 128 ? 3.0 : i == 256 ? 5.0 : 0.0;
    CHECK(w[i] == expect);
  }

  Rng rng(4);
  for (long m : {1L, 3L, 64L, 128L}) {
    Tensor xt = random_tensor({2, m}, rng);
    CHECK(assemble_decoder_input(t, Tensor::zeros({2, f}), Tensor::zeros({2, f}), xt, f)
              .shape() == Shape{2, 384});
  }
  CHECK_THROWS_AS(
      assemble_decoder_input(t, Tensor::zeros({1, 4}), Tensor::zeros({1, 4}),
                             Tensor::zeros({1, 5}), 4),
      ConfigError);
}

TEST_CASE("ode_derivative zero weights, shape contract and hand oracle") {
  Rng rng(5);
  Tape t;
  const long c = 3, len = 6;
  OdeNetParams zero{Tensor::zeros({1, c, 3}), Tensor::zeros({c + 1, c, 3}),
                    Tensor::zeros({c + 1, c, 3})};
  Tensor state = random_tensor({c, len}, rng);
  Tensor g = ode_derivative(t, zero, state, 0.3);
  CHECK(g.shape() == state.shape());
  for (long i = 0; i < g.numel(); ++i) CHECK(g[i] == 0.0);

  OdeNetParams net = make_ode_net(c, rng);
  for (int rep = 0; rep < 3; ++rep) {
    Tensor s = random_tensor({2, c, len}, rng);
    CHECK(ode_derivative(t, net, s, 0.1).shape() == s.shape());
  }
  CHECK_THROWS_AS(ode_derivative(t, net, random_tensor({c + 1, len}, rng), 0.0),
                  DimensionError);

  // 2-channel length-4 hand-unrolled check: conv_a passes the depth channel
  // through an identity tap into channel 0, conv_b taps tanh(depth) into both.
  const long c2 = 2, l2 = 4;
  OdeNetParams hand{Tensor::zeros({1, c2, 3}), Tensor::zeros({c2 + 1, c2, 3}),
                    Tensor::zeros({c2 + 1, c2, 3})};
  // conv_a: input channel 2 (the depth channel) -> output channel 0, center tap
  hand.conv_a[(2 * c2 + 0) * 3 + 1] = 1.0;
  // conv_b: output channel j reads tanh-ed channel 0 with center tap weight (j+1)
  hand.conv_b[(0 * c2 + 0) * 3 + 1] = 1.0;
  hand.conv_b[(0 * c2 + 1) * 3 + 1] = 2.0;
  double depth = 0.7;
  Tensor s2 = random_tensor({c2, l2}, rng);
  Tensor d2 = ode_derivative(t, hand, s2, depth);
  double th = std::tanh(depth);
  for (long l = 0; l < l2; ++l) {
    CHECK(d2.at(0, l) == doctest::Approx(th));
    CHECK(d2.at(1, l) == doctest::Approx(2.0 * th));
  }
}

TEST_CASE("euler_integrate zero field and scalar exponential oracle") {
  Rng rng(6);
  Tape t;
  const long c = 2, len = 5;
  OdeNetParams zero{Tensor::zeros({1, c, 3}), Tensor::zeros({c + 1, c, 3}),
                    Tensor::zeros({c + 1, c, 3})};
  Tensor s0 = random_tensor({c, len}, rng);
  Tensor sf = euler_integrate(t, zero, s0, {0.0, 1.0, 0.05});
  CHECK(sf.values() == s0.values());

  // dy/dD = y, y(0) = 1, two steps of 0.5 -> (1 + 0.5)^2 = 2.25
  Tensor y = euler_steps(t, Tensor::scalar(1.0), OdeSolverConfig{0.0, 1.0, 0.5},
                         [](Tape& tt, const Tensor& s, double) { return s; });
  CHECK(y[0] == doctest::Approx(2.25));

  CHECK_THROWS_AS((OdeSolverConfig{0.0, 1.0, 0.3}).steps(), ConfigError);
  CHECK_THROWS_AS((OdeSolverConfig{0.0, -1.0, 0.1}).steps(), ConfigError);
  CHECK(OdeSolverConfig{}.steps() == 20);
}

TEST_CASE("euler is first order on the spiral field") {
  // halving the step roughly halves the error
  double e_01 = spiral_euler_error(0.1);
  double e_005 = spiral_euler_error(0.05);
  double e_0025 = spiral_euler_error(0.025);
  CHECK(e_01 / e_005 == doctest::Approx(2.0).epsilon(0.2));
  CHECK(e_005 / e_0025 == doctest::Approx(2.0).epsilon(0.2));
  double r1 = std::log2(e_01 / e_005), r2 = std::log2(e_005 / e_0025);
  CHECK(r1 > 0.8);
  CHECK(r1 < 1.2);
  CHECK(r2 > 0.8);
  CHECK(r2 < 1.2);
}

TEST_CASE("decode_npode zero derivative reduces to heads on lifted input") {
  Rng rng(7);
  const long f = 4, p = 2;
  Tape t;
  OdeNetParams ode{conv_init({1, f, 3}, rng), Tensor::zeros({f + 1, f, 3}),
                   Tensor::zeros({f + 1, f, 3})};
  OutputHeads heads{make_fc(f * 3 * f, p, rng), make_fc(f * 3 * f, p, rng)};
  Tensor w = random_tensor({2, 3 * f}, rng);
  Predictive out = decode_npode(t, ode, heads, w, {0.0, 1.0, 0.25}, 0.01);

  Tensor lifted = t.conv1d(t.reshape(w, {2, 1, 3 * f}), ode.lift);
  Predictive direct = apply_heads(t, heads, t.reshape(lifted, {2, f * 3 * f}), 0.01);
  for (long i = 0; i < out.mean.numel(); ++i) {
    CHECK(out.mean[i] == doctest::Approx(direct.mean[i]).epsilon(1e-12));
    CHECK(out.std[i] == doctest::Approx(direct.std[i]).epsilon(1e-12));
  }
}

TEST_CASE("predictive std stays above the floor for random parameters") {
  Rng rng(8);
  const long f = 4, p = 3;
  for (int rep = 0; rep < 5; ++rep) {
    Tape t;
    OdeNetParams ode = make_ode_net(f, rng);
    OutputHeads heads{make_fc(f * 3 * f, p, rng), make_fc(f * 3 * f, p, rng)};
    Tensor w = random_tensor({3, 3 * f}, rng);
    Predictive out = decode_npode(t, ode, heads, w, {0.0, 1.0, 0.5}, 0.01);
    CHECK(out.mean.shape() == Shape{3, p});
    CHECK(out.std.shape() == Shape{3, p});
    for (long i = 0; i < out.std.numel(); ++i) CHECK(out.std[i] > 0.01);

    MlpDecoderParams mlp;
    for (int i = 0; i < 3; ++i) mlp.layers.push_back(make_fc(3 * f, 3 * f, rng));
    OutputHeads mheads{make_fc(3 * f, p, rng), make_fc(3 * f, p, rng)};
    Predictive mout = decode_mlp(t, mlp, mheads, w, 0.01);
    for (long i = 0; i < mout.std.numel(); ++i) CHECK(mout.std[i] > 0.01);
  }
}

TEST_CASE("decode_mlp zero weights and single-layer hand reduction") {
  Rng rng(9);
  const long f = 2, p = 1;
  Tape t;
  MlpDecoderParams zero;
  for (int i = 0; i < 3; ++i)
    zero.layers.push_back({Tensor::zeros({3 * f, 3 * f}), Tensor::zeros({3 * f})});
  OutputHeads heads{make_fc(3 * f, p, rng), make_fc(3 * f, p, rng)};
  Tensor w = random_tensor({1, 3 * f}, rng);
  Predictive out = decode_mlp(t, zero, heads, w, 0.01);
  CHECK(out.mean[0] == doctest::Approx(heads.mean.b[0]));
  CHECK(out.std[0] ==
        doctest::Approx(0.01 + std::log1p(std::exp(heads.raw_std.b[0]))));

  // identity layers: heads applied to w itself
  MlpDecoderParams ident;
  for (int i = 0; i < 3; ++i) {
    Tensor wi = Tensor::zeros({3 * f, 3 * f});
    for (long j = 0; j < 3 * f; ++j) wi.at(j, j) = 1.0;
    ident.layers.push_back({wi, Tensor::zeros({3 * f})});
  }
  Tensor wpos({1, 3 * f}, {0.5, 1.0, 0.25, 2.0, 0.75, 1.5});  // positive: relu transparent
  Predictive pid = decode_mlp(t, ident, heads, wpos, 0.01);
  Predictive direct = apply_heads(t, heads, wpos, 0.01);
  CHECK(pid.mean[0] == doctest::Approx(direct.mean[0]));
  CHECK(pid.std[0] == doctest::Approx(direct.std[0]));
}

TEST_CASE("parameter counts reproduce the published decoder table") {
  auto npode_rep = decoder_parameter_report(DecoderKind::NpOde, 128);
  CHECK(npode_rep.total == 99456);
  CHECK(npode_rep.rows[0].count == 384);
  CHECK(npode_rep.rows[0].shape == "(1,128,3,1)");
  CHECK(npode_rep.rows[1].count == 49536);
  CHECK(npode_rep.rows[1].shape == "(129,128,3,1)");
  CHECK(npode_rep.rows[2].count == 49536);

  auto mlp_rep = decoder_parameter_report(DecoderKind::Mlp, 128);
  CHECK(mlp_rep.total == 442368);
  for (auto& r : mlp_rep.rows) {
    CHECK(r.count == 147456);
    CHECK(r.shape == "(384,384)");
  }

  CHECK(fc_count_row("fc", 2, 3).count == 6);
}

TEST_CASE("npode count is step-count independent; mlp grows with depth") {
  // the conv report does not depend on the solver config at all
  auto rep = decoder_parameter_report(DecoderKind::NpOde, 128);
  for (double step : {0.1, 0.05, 0.025}) {
    OdeSolverConfig cfg{0.0, 1.0, step};
    CHECK(cfg.steps() > 0);
    CHECK(decoder_parameter_report(DecoderKind::NpOde, 128).total == rep.total);
  }
  // each additional FC layer would add another 147456
  auto mlp_rep = decoder_parameter_report(DecoderKind::Mlp, 128);
  CHECK(mlp_rep.total == static_cast<long>(mlp_rep.rows.size()) * 147456);
}

TEST_CASE("full tiny decoder gradient passes finite differences") {
  Rng rng(10);
  const long f = 4, p = 2;  // state 4 channels x length 12, 2 steps
  OdeNetParams ode = make_ode_net(f, rng);
  OutputHeads heads{make_fc(f * 3 * f, p, rng), make_fc(f * 3 * f, p, rng)};
  Tensor w = random_tensor({2, 3 * f}, rng);
  OdeSolverConfig cfg{0.0, 1.0, 0.5};

  auto scalar = [&](const std::vector<double>& cv) {
    OdeNetParams o2 = ode;
    o2.conv_a = Tensor({f + 1, f, 3}, cv);
    Tape t;
    OdeNetParams bo{t.leaf(o2.lift), t.leaf(o2.conv_a), t.leaf(o2.conv_b)};
    OutputHeads bh{{t.leaf(heads.mean.W), t.leaf(heads.mean.b)},
                   {t.leaf(heads.raw_std.W), t.leaf(heads.raw_std.b)}};
    Predictive out = decode_npode(t, bo, bh, w, cfg, 0.01);
    Tensor loss = t.add(t.sum(t.mul(out.mean, out.mean)), t.sum(out.std));
    return loss[0];
  };

  std::vector<double> point = ode.conv_a.values();
  Tape t;
  OdeNetParams bo{t.leaf(ode.lift), t.leaf(ode.conv_a), t.leaf(ode.conv_b)};
  OutputHeads bh{{t.leaf(heads.mean.W), t.leaf(heads.mean.b)},
                 {t.leaf(heads.raw_std.W), t.leaf(heads.raw_std.b)}};
  Predictive out = decode_npode(t, bo, bh, w, cfg, 0.01);
  Tensor loss = t.add(t.sum(t.mul(out.mean, out.mean)), t.sum(out.std));
  t.backward(loss);
  auto rep = check_gradient(scalar, point, t.grad(bo.conv_a).values(), 1e-5, 1e-4);
  CHECK(rep.pass(1e-4));
}
