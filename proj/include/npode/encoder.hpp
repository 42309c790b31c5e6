#pragma once

#include <cmath>
#include <vector>

#include "npode/rng.hpp"
#include "npode/tape.hpp"

namespace npode::model {

using ad::Rng;
using ad::Shape;
using ad::Tape;
using ad::Tensor;

struct FcLayer {
  Tensor W;  // [in x out]
  Tensor b;  // [out]
};

inline FcLayer make_fc(long in, long out, Rng& rng) {
  FcLayer fc{Tensor({in, out}), Tensor({out})};
  double std = 1.0 / std::sqrt(static_cast<double>(in));
  for (long i = 0; i < fc.W.numel(); ++i) fc.W[i] = rng.normal(0.0, std);
  return fc;
}

inline Tensor fc_forward(Tape& t, const FcLayer& fc, const Tensor& x) {
  return t.add_rowvec(t.matmul(x, fc.W), fc.b);
}

// Stacked FC layers, ReLU between layers, linear last layer. The deterministic
// and stochastic encoders share this structure with independent parameters.
struct EncoderParams {
  std::vector<FcLayer> layers;
};

inline EncoderParams make_encoder(long in, long width, long depth, Rng& rng) {
  EncoderParams e;
  for (long i = 0; i < depth; ++i) e.layers.push_back(make_fc(i == 0 ? in : width, width, rng));
  return e;
}

inline Tensor encoder_forward(Tape& t, const EncoderParams& enc, const Tensor& xy) {
  Tensor h = xy;
  for (size_t i = 0; i < enc.layers.size(); ++i) {
    h = fc_forward(t, enc.layers[i], h);
    if (i + 1 < enc.layers.size()) h = t.relu(h);
  }
  return h;
}

// Per-point representations d_1..d_n of the context rows (x_i, y_i).
inline Tensor encode_deterministic(Tape& t, const EncoderParams& enc, const Tensor& xy) {
  if (xy.rank() != 2 || xy.dim(0) == 0)
    throw ContractError("encode_deterministic: context must be a non-empty [n x (m+p)]");
  return encoder_forward(t, enc, xy);
}

struct LatentDistribution {
  Tensor mean;  // [1 x latent]
  Tensor std;   // [1 x latent], entries > 0
};

// Maps the mean-aggregated stochastic representation to the latent Gaussian.
struct LatentHead {
  FcLayer mean;
  FcLayer raw_std;
};

// Per-point s_i, mean aggregation, then the latent head. sigma = floor +
// softplus(raw), so the result is permutation invariant and strictly positive.
inline LatentDistribution encode_stochastic(Tape& t, const EncoderParams& enc,
                                            const LatentHead& head, const Tensor& xy,
                                            double std_floor) {
  if (xy.rank() != 2 || xy.dim(0) == 0)
    throw ContractError("encode_stochastic: input must be a non-empty [n x (m+p)]");
  Tensor s = encoder_forward(t, enc, xy);
  Tensor sc = t.reshape(t.mean_axis(s, 0), {1, s.dim(1)});
  Tensor mean = fc_forward(t, head.mean, sc);
  Tensor std = t.add_scalar(t.softplus(fc_forward(t, head.raw_std, sc)), std_floor);
  return {mean, std};
}

// Multi-head cross attention. Raw inputs x go through a shared two-layer FC
// embedding to the model width before the per-head projections. The nonlinear
// embedding lets dot-product scores localize around the query; with an affine
// embedding the softmax weights are monotone in x and cannot interpolate.
struct AttentionParams {
  long heads = 8;
  FcLayer embed;            // [m x F]
  FcLayer embed2;           // [F x F]
  std::vector<Tensor> wq;   // per head [F x dh]
  std::vector<Tensor> wk;
  std::vector<Tensor> wv;
  Tensor wo;                // [F x F]
};

inline AttentionParams make_attention(long m, long feature, long heads, Rng& rng) {
  if (feature % heads != 0)
    throw ConfigError("attention: feature width " + std::to_string(feature) +
                      " not divisible by " + std::to_string(heads) + " heads");
  AttentionParams a;
  a.heads = heads;
  a.embed = make_fc(m, feature, rng);
  a.embed2 = make_fc(feature, feature, rng);
  long dh = feature / heads;
  double std = 1.0 / std::sqrt(static_cast<double>(feature));
  for (long h = 0; h < heads; ++h) {
    for (auto* w : {&a.wq, &a.wk, &a.wv}) {
      Tensor p({feature, dh});
      for (long i = 0; i < p.numel(); ++i) p[i] = rng.normal(0.0, std);
      w->push_back(p);
    }
  }
  a.wo = Tensor({feature, feature});
  for (long i = 0; i < a.wo.numel(); ++i) a.wo[i] = rng.normal(0.0, std);
  return a;
}

// Scaled-dot-product attention of target queries against context keys; the
// values are the deterministic representations d_1..d_n. Returns d_C [T x F].
inline Tensor cross_attention(Tape& t, const AttentionParams& attn, const Tensor& x_keys,
                              const Tensor& values, const Tensor& x_query) {
  if (x_keys.dim(0) == 0) throw ContractError("cross_attention: empty context");
  if (x_keys.dim(0) != values.dim(0))
    throw ContractError("cross_attention: key count " + std::to_string(x_keys.dim(0)) +
                        " != value count " + std::to_string(values.dim(0)));
  Tensor k0 = fc_forward(t, attn.embed2, t.relu(fc_forward(t, attn.embed, x_keys)));
  Tensor q0 = fc_forward(t, attn.embed2, t.relu(fc_forward(t, attn.embed, x_query)));
  long dh = k0.dim(1) / attn.heads;
  std::vector<Tensor> heads;
  for (long h = 0; h < attn.heads; ++h) {
    Tensor q = t.matmul(q0, attn.wq[h]);
    Tensor k = t.matmul(k0, attn.wk[h]);
    Tensor v = t.matmul(values, attn.wv[h]);
    Tensor scores = t.scale(t.matmul(q, t.transpose(k)), 1.0 / std::sqrt(double(dh)));
    heads.push_back(t.matmul(t.softmax(scores, 1), v));
  }
  return t.matmul(t.concat(heads, 1), attn.wo);
}

// Reparameterized draw z = mean + std (*) eps; gradient flows to mean and std.
inline Tensor sample_latent(Tape& t, const LatentDistribution& dist, Rng& rng) {
  Tensor eps(dist.mean.shape());
  for (long i = 0; i < eps.numel(); ++i) eps[i] = rng.normal();
  return t.add(dist.mean, t.mul(dist.std, eps));
}

inline void require_positive_std(const Tensor& std, const char* who) {
  for (long i = 0; i < std.numel(); ++i)
    if (!(std[i] > 0.0))
      throw DomainError(std::string(who) + ": non-positive std " +
                        std::to_string(std[i]));
}

// Closed-form KL between diagonal Gaussians, KL(post || prior) >= 0.
inline Tensor kl_divergence(Tape& t, const LatentDistribution& post,
                            const LatentDistribution& prior) {
  require_positive_std(post.std, "kl_divergence");
  require_positive_std(prior.std, "kl_divergence");
  Tensor dmu = t.sub(post.mean, prior.mean);
  Tensor var_post = t.mul(post.std, post.std);
  Tensor var_prior = t.mul(prior.std, prior.std);
  Tensor ratio = t.div(t.add(var_post, t.mul(dmu, dmu)), t.scale(var_prior, 2.0));
  Tensor term = t.add(t.sub(t.log(prior.std), t.log(post.std)), t.add_scalar(ratio, -0.5));
  return t.sum(term);
}

// Sum over entries of log N(y | mean, std^2).
inline Tensor gaussian_log_likelihood(Tape& t, const Tensor& y, const Tensor& mean,
                                      const Tensor& std) {
  if (y.shape() != mean.shape() || y.shape() != std.shape())
    throw DimensionError("gaussian_log_likelihood: shape mismatch");
  require_positive_std(std, "gaussian_log_likelihood");
  constexpr double half_log_2pi = 0.91893853320467274178;
  Tensor r = t.sub(y, mean);
  Tensor quad = t.div(t.mul(r, r), t.scale(t.mul(std, std), 2.0));
  Tensor nll = t.add_scalar(t.add(t.log(std), quad), half_log_2pi);
  return t.negate(t.sum(nll));
}

}  // namespace npode::model
