#pragma once

#include <cmath>
#include <cstdint>
#include <string>
#include <utility>
#include <vector>

#include "npode/data.hpp"
#include "npode/metrics.hpp"
#include "npode/model.hpp"

namespace npode::train {

using ad::Rng;
using ad::Tape;
using ad::Tensor;
using data::Dataset;
using model::LatentDistribution;
using model::NpOdeModel;

struct TrainConfig {
  long iterations = 10000;
  double learning_rate = 1e-4;
  std::uint64_t seed = 0;
  double context_low = 0.3;    // context fraction range per iteration
  double context_high = 0.9;
  long latent_samples_train = 1;
  long latent_samples_predict = 1;
  // KL divided by |D_T| so both loss terms are per target point; switching this
  // off uses the literal summed-likelihood-minus-KL objective.
  bool kl_per_target = true;
  double clip_norm = 10.0;
  long trace_every = 100;

  void validate() const {
    if (iterations < 0) throw ConfigError("train: iterations must be >= 0");
    if (!(learning_rate > 0)) throw ConfigError("train: learning_rate must be > 0");
    if (!(context_low > 0) || !(context_high < 1) || context_low > context_high)
      throw ConfigError("train: context fraction range must satisfy 0 < low <= high < 1");
    if (latent_samples_train < 1 || latent_samples_predict < 1)
      throw ConfigError("train: latent sample counts must be >= 1");
  }
};

// ---- dataset views as tensors ----

inline Tensor rows_tensor(const data::Table& t) {
  Tensor out({t.rows, t.cols});
  std::copy(t.v.begin(), t.v.end(), out.data());
  return out;
}

inline Tensor xy_tensor(const Dataset& ds) {
  Tensor out({ds.n(), ds.m() + ds.p()});
  auto flat = ds.xy_rows();
  std::copy(flat.begin(), flat.end(), out.data());
  return out;
}

// ---- Algorithm steps ----

inline std::pair<Dataset, Dataset> split_context_target(const Dataset& train, Rng& rng,
                                                        double low, double high) {
  long n = train.n();
  if (n < 2) throw ContractError("split_context_target: need >= 2 training rows");
  double u = low + (high - low) * rng.uniform();
  long nc = std::lround(u * n);
  nc = std::max(1L, std::min(n - 1, nc));
  auto perm = rng.permutation(static_cast<int>(n));
  std::vector<int> ctx(perm.begin(), perm.begin() + nc);
  std::vector<int> tgt(perm.begin() + nc, perm.end());
  return {train.subset(ctx), train.subset(tgt)};
}

struct ElboParts {
  Tensor loss;  // scalar, on tape
  double nll = 0;
  double kl = 0;
};

// Negated ELBO. Prior from the context, posterior from the full training set,
// one (or more, averaged) reparameterized latent draw from the posterior.
inline ElboParts elbo_loss(Tape& t, const NpOdeModel& bound, const Dataset& d_c,
                           const Dataset& d_t, Rng& rng, const TrainConfig& cfg) {
  if (d_c.n() == 0 || d_t.n() == 0)
    throw ContractError("elbo_loss: context and target sets must be non-empty");
  double floor = bound.cfg.std_floor;
  Tensor xy_c = xy_tensor(d_c);
  // D_C ∪ D_T in a fixed order: context rows then target rows
  Tensor xy_t = xy_tensor(d_t);
  Tensor xy_full({d_c.n() + d_t.n(), d_c.m() + d_c.p()});
  std::copy(xy_c.data(), xy_c.data() + xy_c.numel(), xy_full.data());
  std::copy(xy_t.data(), xy_t.data() + xy_t.numel(), xy_full.data() + xy_c.numel());
  LatentDistribution prior = model::encode_stochastic(t, bound.sto, bound.latent, xy_c, floor);
  LatentDistribution post =
      model::encode_stochastic(t, bound.sto, bound.latent, xy_full, floor);

  Tensor z = model::sample_latent(t, post, rng);
  for (long s = 1; s < cfg.latent_samples_train; ++s)
    z = t.add(z, model::sample_latent(t, post, rng));
  if (cfg.latent_samples_train > 1) z = t.scale(z, 1.0 / cfg.latent_samples_train);

  Tensor x_c = rows_tensor(d_c.X);
  Tensor x_t = rows_tensor(d_t.X);
  Tensor d = model::encode_deterministic(t, bound.det, xy_c);
  Tensor d_ctx = model::cross_attention(t, bound.attn, x_c, d, x_t);
  model::Predictive pred = model::decode_targets(t, bound, d_ctx, z, x_t);
  Tensor ll = model::gaussian_log_likelihood(t, rows_tensor(d_t.Y), pred.mean, pred.std);
  Tensor kl = model::kl_divergence(t, post, prior);

  double n_t = static_cast<double>(d_t.n());
  Tensor objective = cfg.kl_per_target
                         ? t.sub(t.scale(ll, 1.0 / n_t), t.scale(kl, 1.0 / n_t))
                         : t.sub(ll, kl);
  ElboParts out;
  out.loss = t.negate(objective);
  out.nll = -ll[0];
  out.kl = kl[0];
  return out;
}

// ---- optimizer ----

struct AdamState {
  double beta1 = 0.9, beta2 = 0.999, eps = 1e-8;
  long step = 0;
  std::vector<std::vector<double>> m1, m2;  // per parameter tensor
};

struct TraceRow {
  long iteration = 0;
  double loss = 0, kl = 0, nll = 0;
};

inline std::string trace_csv(const std::vector<TraceRow>& rows) {
  std::ostringstream os;
  os.precision(17);
  os << "iteration,loss,kl,nll\n";
  for (const auto& r : rows)
    os << r.iteration << "," << r.loss << "," << r.kl << "," << r.nll << "\n";
  return os.str();
}

struct TrainResult {
  NpOdeModel model;
  std::vector<TraceRow> trace;
  long iterations_run = 0;
  double final_loss = 0;
};

// Algorithm training loop: per iteration split the training set into context
// and target, evaluate the negated ELBO, backprop, clip the global gradient
// norm, then take one Adam step. Deterministic given (seed, data, config).
inline TrainResult train(const NpOdeModel& init, const Dataset& train_ds,
                         const TrainConfig& cfg) {
  cfg.validate();
  if (train_ds.n() < 2) throw ContractError("train: need >= 2 rows");
  TrainResult out;
  out.model = init;
  // deep-copy parameter storage so the caller's model is untouched
  model::for_each_param(out.model, [](const std::string&, Tensor& p) {
    Tensor copy(p.shape());
    std::copy(p.data(), p.data() + p.numel(), copy.data());
    p = copy;
  });

  AdamState adam;
  model::for_each_param(out.model, [&](const std::string&, Tensor& p) {
    adam.m1.emplace_back(p.numel(), 0.0);
    adam.m2.emplace_back(p.numel(), 0.0);
  });

  Rng rng(cfg.seed);
  double last_loss = 0;
  for (long it = 0; it < cfg.iterations; ++it) {
    auto [d_c, d_t] = split_context_target(train_ds, rng, cfg.context_low, cfg.context_high);
    Tape tape;
    NpOdeModel bound = model::bind(tape, out.model);
    ElboParts parts = elbo_loss(tape, bound, d_c, d_t, rng, cfg);
    double loss = parts.loss[0];
    if (!std::isfinite(loss))
      throw TrainingError("loss diverged at iteration " + std::to_string(it));
    if (parts.kl < -1e-9)
      throw TrainingError("negative KL at iteration " + std::to_string(it));
    tape.backward(parts.loss);

    std::vector<Tensor> grads;
    model::for_each_param(bound, [&](const std::string&, Tensor& p) {
      grads.push_back(tape.grad(p));
    });
    double norm2 = 0;
    for (const auto& g : grads)
      for (long i = 0; i < g.numel(); ++i) norm2 += g[i] * g[i];
    double gscale = 1.0;
    double norm = std::sqrt(norm2);
    if (cfg.clip_norm > 0 && norm > cfg.clip_norm) gscale = cfg.clip_norm / norm;

    ++adam.step;
    double bc1 = 1.0 - std::pow(adam.beta1, adam.step);
    double bc2 = 1.0 - std::pow(adam.beta2, adam.step);
    size_t k = 0;
    model::for_each_param(out.model, [&](const std::string&, Tensor& p) {
      const Tensor& g = grads[k];
      auto& m1 = adam.m1[k];
      auto& m2 = adam.m2[k];
      for (long i = 0; i < p.numel(); ++i) {
        double gi = g[i] * gscale;
        m1[i] = adam.beta1 * m1[i] + (1 - adam.beta1) * gi;
        m2[i] = adam.beta2 * m2[i] + (1 - adam.beta2) * gi * gi;
        p[i] -= cfg.learning_rate * (m1[i] / bc1) / (std::sqrt(m2[i] / bc2) + adam.eps);
      }
      ++k;
    });

    last_loss = loss;
    if (it % cfg.trace_every == 0 || it + 1 == cfg.iterations)
      out.trace.push_back({it, loss, parts.kl, parts.nll});
  }
  out.iterations_run = cfg.iterations;
  out.final_loss = last_loss;
  return out;
}

// Prediction from the prior: z ~ q(z | context). With several latent draws the
// reported variance is mean(sigma^2) + variance of the per-draw means.
inline metrics::Prediction predict(const NpOdeModel& m, const Dataset& context,
                                   const data::Table& x_targets, const TrainConfig& cfg,
                                   std::uint64_t seed) {
  if (context.n() == 0) throw ContractError("predict: empty context");
  if (x_targets.cols != m.cfg.input_dim)
    throw ContractError("predict: input dim " + std::to_string(x_targets.cols) +
                        ", model expects " + std::to_string(m.cfg.input_dim));
  Rng rng(seed);
  Tape t;
  NpOdeModel bound = model::bind(t, m);
  Tensor xy_c = xy_tensor(context);
  LatentDistribution prior =
      model::encode_stochastic(t, bound.sto, bound.latent, xy_c, m.cfg.std_floor);
  Tensor x_c = rows_tensor(context.X);
  Tensor x_t = rows_tensor(x_targets);
  Tensor d = model::encode_deterministic(t, bound.det, xy_c);
  Tensor d_ctx = model::cross_attention(t, bound.attn, x_c, d, x_t);

  long n = x_targets.rows, p = m.cfg.output_dim;
  long s_count = cfg.latent_samples_predict;
  std::vector<model::Predictive> draws;
  for (long s = 0; s < s_count; ++s) {
    Tensor z = model::sample_latent(t, prior, rng);
    draws.push_back(model::decode_targets(t, bound, d_ctx, z, x_t));
  }
  metrics::Prediction out{data::Table(n, p), data::Table(n, p)};
  for (long i = 0; i < n; ++i)
    for (long j = 0; j < p; ++j) {
      double mean = 0;
      for (auto& dr : draws) mean += dr.mean.at(i, j);
      mean /= s_count;
      double var = 0;
      for (auto& dr : draws) {
        double sd = dr.std.at(i, j);
        double dm = dr.mean.at(i, j) - mean;
        var += sd * sd + dm * dm;
      }
      var /= s_count;
      out.mean.at(i, j) = mean;
      out.std.at(i, j) = std::sqrt(var);
    }
  return out;
}

}  // namespace npode::train
