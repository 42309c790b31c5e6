#pragma once

#include <cmath>
#include <sstream>
#include <string>
#include <vector>

#include "npode/encoder.hpp"

namespace npode::model {

enum class DecoderKind { NpOde, Mlp };

inline const char* decoder_kind_name(DecoderKind k) {
  return k == DecoderKind::NpOde ? "npode" : "np";
}

// Integration window for the continuous-depth decoder. Defaults give 20 Euler
// steps over a unit depth interval.
struct OdeSolverConfig {
  double d_start = 0.0;
  double d_end = 1.0;
  double step = 0.05;

  long steps() const {
    if (!(step > 0.0) || !(d_end > d_start))
      throw ConfigError("ode solver: need step > 0 and d_end > d_start");
    double k = (d_end - d_start) / step;
    long n = static_cast<long>(std::llround(k));
    if (n < 1 || std::fabs(k - static_cast<double>(n)) > 1e-9)
      throw ConfigError("ode solver: (d_end - d_start)/step = " + std::to_string(k) +
                        " is not a positive integer step count");
    return n;
  }
};

// Conv weights of the ODE decoder: one lifting conv applied before the
// integration loop, and the two derivative convs that each see the C state
// channels plus one constant depth channel.
struct OdeNetParams {
  Tensor lift;    // [1 x C x 3]
  Tensor conv_a;  // [C+1 x C x 3]
  Tensor conv_b;  // [C+1 x C x 3]

  long channels() const { return lift.dim(1); }
};

inline Tensor conv_init(Shape shape, Rng& rng) {
  Tensor w(shape);
  double std = 1.0 / std::sqrt(static_cast<double>(shape[0] * shape[2]));
  for (long i = 0; i < w.numel(); ++i) w[i] = rng.normal(0.0, std);
  return w;
}

inline OdeNetParams make_ode_net(long channels, Rng& rng) {
  return {conv_init({1, channels, 3}, rng), conv_init({channels + 1, channels, 3}, rng),
          conv_init({channels + 1, channels, 3}, rng)};
}

// Two FC heads mapping the flattened final state to the predictive mean and
// raw std.
struct OutputHeads {
  FcLayer mean;
  FcLayer raw_std;
};

struct MlpDecoderParams {
  std::vector<FcLayer> layers;  // [3F x 3F] each
};

struct Predictive {
  Tensor mean;  // [T x p]
  Tensor std;   // [T x p], entries > floor
};

// w = (d_C, z, x_target zero-padded to the feature width) as a length-3F row
// per target.
inline Tensor assemble_decoder_input(Tape& t, const Tensor& d_c, const Tensor& z,
                                     const Tensor& x_target, long feature) {
  long m = x_target.dim(1), rows = x_target.dim(0);
  if (m > feature)
    throw ConfigError("decoder input: x dimension " + std::to_string(m) +
                      " exceeds feature width " + std::to_string(feature) +
                      " (increase the feature width)");
  std::vector<Tensor> parts = {d_c, z, x_target};
  if (m < feature) parts.push_back(Tensor::zeros({rows, feature - m}));
  return t.concat(parts, 1);
}

// g(state, D): append the depth channel, conv, tanh, append again, conv.
// Output shape equals the state shape, so the state is closed under steps.
inline Tensor ode_derivative(Tape& t, const OdeNetParams& p, const Tensor& state,
                             double depth) {
  bool batched = state.rank() == 3;
  long c = batched ? state.dim(1) : state.dim(0);
  if (c != p.channels())
    throw DimensionError("ode_derivative: state channels " + std::to_string(c) +
                         " != net channels " + std::to_string(p.channels()));
  long b = batched ? state.dim(0) : 1;
  long len = batched ? state.dim(2) : state.dim(1);
  long axis = batched ? 1 : 0;
  Tensor depth_ch = Tensor::full(batched ? Shape{b, 1, len} : Shape{1, len}, depth);
  Tensor h = t.tanh(t.conv1d(t.concat({state, depth_ch}, axis), p.conv_a));
  return t.conv1d(t.concat({h, depth_ch}, axis), p.conv_b);
}

// Fixed-step Euler: exactly (d_end - d_start)/step iterations of
// state <- state + step * deriv(state, D). Gradients flow through every
// unrolled step.
template <class Deriv>
Tensor euler_steps(Tape& t, Tensor state, const OdeSolverConfig& cfg, Deriv deriv) {
  long n = cfg.steps();
  double depth = cfg.d_start;
  for (long i = 0; i < n; ++i) {
    state = t.add(state, t.scale(deriv(t, state, depth), cfg.step));
    depth += cfg.step;
  }
  return state;
}

inline Tensor euler_integrate(Tape& t, const OdeNetParams& p, const Tensor& state0,
                              const OdeSolverConfig& cfg) {
  return euler_steps(t, state0, cfg, [&p](Tape& tt, const Tensor& s, double d) {
    return ode_derivative(tt, p, s, d);
  });
}

inline Predictive apply_heads(Tape& t, const OutputHeads& heads, const Tensor& flat,
                              double std_floor) {
  Tensor mean = fc_forward(t, heads.mean, flat);
  Tensor std = t.add_scalar(t.softplus(fc_forward(t, heads.raw_std, flat)), std_floor);
  return {mean, std};
}

// Continuous-depth decoder: lift w to C channels, integrate, flatten, heads.
inline Predictive decode_npode(Tape& t, const OdeNetParams& ode, const OutputHeads& heads,
                               const Tensor& w, const OdeSolverConfig& cfg,
                               double std_floor) {
  long rows = w.dim(0), len = w.dim(1);
  Tensor state = t.conv1d(t.reshape(w, {rows, 1, len}), ode.lift);
  Tensor final = euler_integrate(t, ode, state, cfg);
  return apply_heads(t, heads, t.reshape(final, {rows, ode.channels() * len}), std_floor);
}

// Baseline decoder: stacked FC layers with ReLU between, then the same heads.
inline Predictive decode_mlp(Tape& t, const MlpDecoderParams& mlp, const OutputHeads& heads,
                             const Tensor& w, double std_floor) {
  Tensor h = w;
  for (size_t i = 0; i < mlp.layers.size(); ++i) {
    h = fc_forward(t, mlp.layers[i], h);
    if (i + 1 < mlp.layers.size()) h = t.relu(h);
  }
  return apply_heads(t, heads, h, std_floor);
}

// ---- parameter counting ----

struct ParamCountRow {
  std::string layer;
  std::string shape;
  long count = 0;
};

struct ParamCountReport {
  std::vector<ParamCountRow> rows;
  long total = 0;

  std::string text() const {
    std::ostringstream os;
    for (const auto& r : rows) os << r.layer << "\t" << r.shape << "\t" << r.count << "\n";
    os << "total\t\t" << total << "\n";
    return os.str();
  }
  std::string csv() const {
    std::ostringstream os;
    os << "layer,shape,count\n";
    for (const auto& r : rows) os << r.layer << "," << r.shape << "," << r.count << "\n";
    os << "total,," << total << "\n";
    return os.str();
  }
};

inline ParamCountRow fc_count_row(const std::string& name, long in, long out) {
  return {name, "(" + std::to_string(in) + "," + std::to_string(out) + ")", in * out};
}

inline ParamCountRow conv_count_row(const std::string& name, long in, long out, long k) {
  return {name,
          "(" + std::to_string(in) + "," + std::to_string(out) + "," + std::to_string(k) +
              ",1)",
          in * out * k};
}

// Weight-only decoder parameter table for the given feature width; biases are
// excluded from the counts.
inline ParamCountReport decoder_parameter_report(DecoderKind kind, long feature) {
  ParamCountReport rep;
  if (kind == DecoderKind::NpOde) {
    rep.rows.push_back(conv_count_row("Conv layer 1", 1, feature, 3));
    rep.rows.push_back(conv_count_row("Conv layer 2", feature + 1, feature, 3));
    rep.rows.push_back(conv_count_row("Conv layer 3", feature + 1, feature, 3));
  } else {
    for (int i = 1; i <= 3; ++i)
      rep.rows.push_back(fc_count_row("FC layer " + std::to_string(i), 3 * feature, 3 * feature));
  }
  for (const auto& r : rep.rows) rep.total += r.count;
  return rep;
}

}  // namespace npode::model
