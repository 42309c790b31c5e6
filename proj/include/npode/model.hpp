#pragma once

#include <functional>
#include <string>

#include "npode/decoder.hpp"
#include "npode/encoder.hpp"

namespace npode::model {

struct ModelConfig {
  long input_dim = 1;
  long output_dim = 1;
  long feature = 128;       // encoder width, latent dim and decoder channels
  long heads = 8;
  long encoder_depth = 3;
  DecoderKind decoder = DecoderKind::NpOde;
  OdeSolverConfig solver;
  double std_floor = 0.01;
};

// Every learnable tensor of an NP-ODE (or NPs baseline) model.
struct NpOdeModel {
  ModelConfig cfg;
  EncoderParams det;
  EncoderParams sto;
  LatentHead latent;
  AttentionParams attn;
  OdeNetParams ode;       // used when cfg.decoder == NpOde
  MlpDecoderParams mlp;   // used when cfg.decoder == Mlp
  OutputHeads heads;
};

inline NpOdeModel make_model(const ModelConfig& cfg, Rng& rng) {
  NpOdeModel m;
  m.cfg = cfg;
  long in = cfg.input_dim + cfg.output_dim, f = cfg.feature;
  m.det = make_encoder(in, f, cfg.encoder_depth, rng);
  m.sto = make_encoder(in, f, cfg.encoder_depth, rng);
  m.latent = {make_fc(f, f, rng), make_fc(f, f, rng)};
  m.attn = make_attention(cfg.input_dim, f, cfg.heads, rng);
  long head_in;
  if (cfg.decoder == DecoderKind::NpOde) {
    m.ode = make_ode_net(f, rng);
    head_in = f * 3 * f;
  } else {
    for (int i = 0; i < 3; ++i) m.mlp.layers.push_back(make_fc(3 * f, 3 * f, rng));
    head_in = 3 * f;
  }
  m.heads = {make_fc(head_in, cfg.output_dim, rng), make_fc(head_in, cfg.output_dim, rng)};
  return m;
}

// Visits every parameter tensor under a stable name, in a fixed order. The
// order defines optimizer state layout and checkpoint layout.
inline void for_each_param(NpOdeModel& m,
                           const std::function<void(const std::string&, Tensor&)>& f) {
  auto enc = [&](const char* tag, EncoderParams& e) {
    for (size_t i = 0; i < e.layers.size(); ++i) {
      f(std::string(tag) + ".fc" + std::to_string(i) + ".W", e.layers[i].W);
      f(std::string(tag) + ".fc" + std::to_string(i) + ".b", e.layers[i].b);
    }
  };
  enc("det", m.det);
  enc("sto", m.sto);
  f("latent.mean.W", m.latent.mean.W);
  f("latent.mean.b", m.latent.mean.b);
  f("latent.raw_std.W", m.latent.raw_std.W);
  f("latent.raw_std.b", m.latent.raw_std.b);
  f("attn.embed.W", m.attn.embed.W);
  f("attn.embed.b", m.attn.embed.b);
  f("attn.embed2.W", m.attn.embed2.W);
  f("attn.embed2.b", m.attn.embed2.b);
  for (long h = 0; h < m.attn.heads; ++h) {
    std::string p = "attn.h" + std::to_string(h);
    f(p + ".wq", m.attn.wq[h]);
    f(p + ".wk", m.attn.wk[h]);
    f(p + ".wv", m.attn.wv[h]);
  }
  f("attn.wo", m.attn.wo);
  if (m.cfg.decoder == DecoderKind::NpOde) {
    f("ode.lift", m.ode.lift);
    f("ode.conv_a", m.ode.conv_a);
    f("ode.conv_b", m.ode.conv_b);
  } else {
    for (size_t i = 0; i < m.mlp.layers.size(); ++i) {
      f("mlp.fc" + std::to_string(i) + ".W", m.mlp.layers[i].W);
      f("mlp.fc" + std::to_string(i) + ".b", m.mlp.layers[i].b);
    }
  }
  f("heads.mean.W", m.heads.mean.W);
  f("heads.mean.b", m.heads.mean.b);
  f("heads.raw_std.W", m.heads.raw_std.W);
  f("heads.raw_std.b", m.heads.raw_std.b);
}

// Copy of the model whose tensors are recorded as leaves on the tape (values
// shared, node ids set), ready for a differentiable forward pass.
inline NpOdeModel bind(Tape& t, const NpOdeModel& m) {
  NpOdeModel b = m;
  for_each_param(b, [&](const std::string&, Tensor& p) { p = t.leaf(p); });
  return b;
}

// Predictive distribution for target rows, given bound model pieces, context
// (x, y), a latent draw z [1 x F] and target inputs.
inline Predictive decode_targets(Tape& t, const NpOdeModel& bound, const Tensor& d_c,
                                 const Tensor& z, const Tensor& x_targets) {
  long rows = x_targets.dim(0), f = bound.cfg.feature;
  // broadcast the single latent draw across targets; gradient sums back into z
  Tensor z_rep = t.matmul(Tensor::full({rows, 1}, 1.0), z);
  Tensor w = assemble_decoder_input(t, d_c, z_rep, x_targets, f);
  if (bound.cfg.decoder == DecoderKind::NpOde)
    return decode_npode(t, bound.ode, bound.heads, w, bound.cfg.solver, bound.cfg.std_floor);
  return decode_mlp(t, bound.mlp, bound.heads, w, bound.cfg.std_floor);
}

inline ParamCountReport decoder_parameter_report(const NpOdeModel& m) {
  return decoder_parameter_report(m.cfg.decoder, m.cfg.feature);
}

}  // namespace npode::model
