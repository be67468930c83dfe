// Copyright 2026 The DCGC Authors.
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include "dcgc/pipeline.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <numeric>
#include <random>
#include <sstream>

namespace dcgc {
namespace {

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point start) {
  return std::chrono::duration<double>(Clock::now() - start).count();
}

std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

// Independent stream per (purpose, index) under one run seed.
std::uint64_t derive_seed(std::uint64_t seed, std::uint64_t stream,
                          std::uint64_t index) {
  return splitmix64(splitmix64(splitmix64(seed) ^ stream) ^ index);
}

enum Stream : std::uint64_t {
  kInitStream = 1,
  kPseudoLabelStream = 2,
  kCenterInitStream = 3,
  kFinalStream = 4,
  kBatchStream = 5,
  kFinetuneBatchStream = 6,
};

Matrix column(const Eigen::Vector3d& v) {
  Matrix m(3, 1);
  m << v(0), v(1), v(2);
  return m;
}

Matrix scalar(double x) {
  Matrix m(1, 1);
  m(0, 0) = x;
  return m;
}

struct TapeModel {
  Var alpha, w1, b1, w2, b2;
  Var h, z1, z2, z;
};

TapeModel record_forward(GradientTape& tape, const ModelState& s,
                         const std::shared_ptr<const std::vector<Matrix>>& bases) {
  TapeModel m;
  m.alpha = tape.parameter(column(s.filter.alpha));
  m.w1 = tape.parameter(s.encoder.w1);
  m.b1 = tape.parameter(s.encoder.b1);
  m.w2 = tape.parameter(s.encoder.w2);
  m.b2 = tape.parameter(s.encoder.b2);
  m.h = mix_channels(m.alpha, bases);
  m.z1 = encode_view(m.h, {m.w1, m.b1});
  m.z2 = encode_view(m.h, {m.w2, m.b2});
  m.z = combine_views(m.z1, m.z2);
  return m;
}

void step(ModelState& s, const std::string& name, Matrix& param,
          const Matrix& grad, const AdamConfig& adam) {
  adam_step(param, grad, s.optimizer[name], adam);
}

void update_shared(ModelState& s, const GradientTape& tape, const TapeModel& m,
                   const AdamConfig& adam) {
  Matrix alpha = column(s.filter.alpha);
  step(s, "alpha", alpha, tape.grad(m.alpha), adam);
  s.filter.alpha = Eigen::Vector3d(alpha(0, 0), alpha(1, 0), alpha(2, 0));
  step(s, "w1", s.encoder.w1, tape.grad(m.w1), adam);
  step(s, "b1", s.encoder.b1, tape.grad(m.b1), adam);
  step(s, "w2", s.encoder.w2, tape.grad(m.w2), adam);
  step(s, "b2", s.encoder.b2, tape.grad(m.b2), adam);
}

// Uniform node subset for the contrastive term, sorted; empty means full
// batch.
std::vector<int> draw_batch(int n, int batch_size, std::uint64_t seed) {
  if (batch_size <= 0 || batch_size >= n) return {};
  std::vector<int> idx(static_cast<std::size_t>(n));
  std::iota(idx.begin(), idx.end(), 0);
  std::mt19937_64 rng(seed);
  std::shuffle(idx.begin(), idx.end(), rng);
  idx.resize(static_cast<std::size_t>(batch_size));
  std::sort(idx.begin(), idx.end());
  return idx;
}

Var batched_contrastive(Var z1, Var z2, const HardnessWeights& m,
                        const std::vector<int>& batch) {
  if (batch.empty()) return contrastive_loss(z1, z2, m);
  const auto b = static_cast<Eigen::Index>(batch.size());
  HardnessWeights sub{Matrix(b, b)};
  for (Eigen::Index i = 0; i < b; ++i) {
    for (Eigen::Index j = 0; j < b; ++j) {
      sub.m(i, j) = m.m(batch[static_cast<std::size_t>(i)],
                        batch[static_cast<std::size_t>(j)]);
    }
  }
  return contrastive_loss(ad::gather_rows(z1, batch),
                          ad::gather_rows(z2, batch), sub);
}

HardnessWeights supervision_weights(const TrainConfig& cfg,
                                    const GraphContext& ctx,
                                    const Labels& pseudo, int k,
                                    const Matrix& z) {
  switch (cfg.supervision_mode) {
    case SupervisionMode::kNeighborDistribution: {
      const Matrix e =
          spmm(ctx.neighbor_mean, one_hot(pseudo, k));
      return hardness_weights(e, z, cfg.tau);
    }
    case SupervisionMode::kPseudoLabel:
      return pseudo_label_weights(pseudo, z);
    case SupervisionMode::kNone:
      break;
  }
  return uniform_weights(z.rows());
}

void require_finite(double value, const char* stage, int epoch) {
  if (!std::isfinite(value)) {
    std::ostringstream msg;
    msg << stage << ": non-finite loss at epoch " << epoch;
    throw NumericError(msg.str());
  }
}

double recon_scale(const TrainConfig& cfg, int n) {
  return cfg.normalize_reconstruction
             ? 1.0 / (static_cast<double>(n) * static_cast<double>(n))
             : 1.0;
}

}  // namespace

std::string to_string(SupervisionMode m) {
  switch (m) {
    case SupervisionMode::kNeighborDistribution: return "neighbor_distribution";
    case SupervisionMode::kPseudoLabel: return "pseudo_label";
    case SupervisionMode::kNone: return "none";
  }
  return "?";
}

std::string to_string(CenterMode m) {
  switch (m) {
    case CenterMode::kDual: return "dual";
    case CenterMode::kFeatureOnly: return "feature_only";
    case CenterMode::kNeighborOnly: return "nd_only";
  }
  return "?";
}

std::string to_string(LambdaMode m) {
  return m == LambdaMode::kFixed ? "fixed" : "learnable";
}

SupervisionMode parse_supervision_mode(const std::string& s) {
  if (s == "neighbor_distribution") return SupervisionMode::kNeighborDistribution;
  if (s == "pseudo_label") return SupervisionMode::kPseudoLabel;
  if (s == "none") return SupervisionMode::kNone;
  throw ConfigError("unknown supervision mode '" + s + "'");
}

CenterMode parse_center_mode(const std::string& s) {
  if (s == "dual") return CenterMode::kDual;
  if (s == "feature_only") return CenterMode::kFeatureOnly;
  if (s == "nd_only") return CenterMode::kNeighborOnly;
  throw ConfigError("unknown center mode '" + s + "'");
}

LambdaMode parse_lambda_mode(const std::string& s) {
  if (s == "fixed") return LambdaMode::kFixed;
  if (s == "learnable") return LambdaMode::kLearnable;
  throw ConfigError("unknown lambda mode '" + s + "'");
}

void validate(const TrainConfig& cfg) {
  std::vector<std::string> errors;
  auto check = [&errors](bool ok, const char* msg) {
    if (!ok) errors.emplace_back(msg);
  };
  check(cfg.epochs_pretrain >= 1, "epochs_pretrain must be >= 1");
  check(cfg.epochs_finetune >= 1, "epochs_finetune must be >= 1");
  check(cfg.t >= 1, "t must be >= 1");
  check(cfg.update_interval >= 1, "update_interval must be >= 1");
  check(cfg.tau > 0.0 && cfg.tau < 1.0, "tau must lie in (0, 1)");
  check(cfg.beta >= 0.0 && cfg.beta <= 1.0, "beta must lie in [0, 1]");
  check(cfg.gamma >= 0.0, "gamma must be >= 0");
  check(cfg.lambda >= 0.0 && cfg.lambda <= 1.0, "lambda must lie in [0, 1]");
  check(cfg.k == 0 || cfg.k >= 2, "k must be >= 2 (or 0 to use labels)");
  check(cfg.embed_dim >= 1, "embed_dim must be >= 1");
  check(cfg.learning_rate > 0.0, "learning_rate must be > 0");
  check(cfg.batch_size >= 0, "batch_size must be >= 0 (0 = full batch)");
  check(cfg.kmeans_n_init >= 1, "kmeans_n_init must be >= 1");
  check(cfg.pseudo_label_interval >= 1, "pseudo_label_interval must be >= 1");
  if (cfg.lambda_mode == LambdaMode::kLearnable) {
    check(cfg.lambda > 0.0 && cfg.lambda < 1.0,
          "learnable lambda needs an initial value in (0, 1)");
  }
  if (!errors.empty()) {
    std::string msg = "invalid configuration:";
    for (const auto& e : errors) msg += "\n  - " + e;
    throw ConfigError(msg);
  }
}

void adam_step(Matrix& param, const Matrix& grad, AdamMoments& mo,
               const AdamConfig& cfg) {
  if (mo.step == 0) {
    mo.m = Matrix::Zero(param.rows(), param.cols());
    mo.v = Matrix::Zero(param.rows(), param.cols());
  }
  ++mo.step;
  mo.m = cfg.beta1 * mo.m + (1.0 - cfg.beta1) * grad;
  mo.v = cfg.beta2 * mo.v + (1.0 - cfg.beta2) * grad.cwiseAbs2();
  const double c1 = 1.0 - std::pow(cfg.beta1, static_cast<double>(mo.step));
  const double c2 = 1.0 - std::pow(cfg.beta2, static_cast<double>(mo.step));
  param.array() -= cfg.learning_rate * (mo.m.array() / c1) /
                   ((mo.v.array() / c2).sqrt() + cfg.epsilon);
}

double ModelState::lambda(const TrainConfig& cfg) const {
  if (cfg.lambda_mode == LambdaMode::kFixed) return cfg.lambda;
  return 1.0 / (1.0 + std::exp(-lambda_logit));
}

ModelState init_model(const Graph& g, const TrainConfig& cfg) {
  ModelState s;
  s.filter.t = cfg.t;
  s.encoder = init_encoder(g.attributes.cols(), cfg.embed_dim,
                           derive_seed(cfg.seed, kInitStream, 0));
  s.lambda_logit =
      cfg.lambda > 0.0 && cfg.lambda < 1.0 ? std::log(cfg.lambda / (1.0 - cfg.lambda))
                                           : 0.0;
  return s;
}

GraphContext make_context(const Graph& g, int t) {
  GraphContext ctx;
  ctx.graph = &g;
  ctx.laplacian = normalized_laplacian(g);
  ctx.neighbor_mean = neighbor_mean_operator(g.adjacency);
  ctx.channels = propagate_channels(g.attributes, ctx.laplacian, t);
  return ctx;
}

ForwardValues forward(const GraphContext& ctx, const ModelState& state) {
  ForwardValues f;
  f.h = mix_channels(ctx.channels, state.filter.alpha);
  std::tie(f.z1, f.z2) = encode_views(f.h, state.encoder);
  f.z = combine_views(f.z1, f.z2);
  return f;
}

int resolve_k(const Graph& g, const TrainConfig& cfg) {
  const int k = cfg.k > 0 ? cfg.k : g.num_classes;
  if (k < 2) {
    throw ConfigError("cluster count unknown: pass k >= 2 or supply labels");
  }
  if (k > g.num_nodes()) {
    throw ConfigError("cluster count exceeds the number of nodes");
  }
  return k;
}

PretrainResult pretrain(const GraphContext& ctx, const TrainConfig& cfg,
                        ModelState& state) {
  validate(cfg);
  const Graph& g = *ctx.graph;
  const int k = resolve_k(g, cfg);
  const int n = g.num_nodes();
  const AdamConfig adam{cfg.learning_rate};
  const auto bases = as_bases(ctx.channels);
  const KmeansOptions km_opts{cfg.kmeans_n_init, 300};

  PretrainResult result;
  HardnessWeights weights = uniform_weights(n);
  const auto stage_start = Clock::now();
  for (int epoch = 0; epoch < cfg.epochs_pretrain; ++epoch) {
    const auto epoch_start = Clock::now();
    GradientTape tape;
    const TapeModel model = record_forward(tape, state, bases);
    EpochRecord rec;
    rec.epoch = epoch;

    if (cfg.supervision_mode != SupervisionMode::kNone &&
        epoch % cfg.pseudo_label_interval == 0) {
      const Matrix& z = model.z.value();
      const KmeansResult km = kmeans(
          z, k, derive_seed(cfg.seed, kPseudoLabelStream, epoch), km_opts);
      weights = supervision_weights(cfg, ctx, km.labels, k, z);
      if (g.labels) rec.metrics = clustering_metrics(km.labels, *g.labels);
    }

    const auto batch = draw_batch(n, cfg.batch_size,
                                  derive_seed(cfg.seed, kBatchStream, epoch));
    const Var lc = batched_contrastive(model.z1, model.z2, weights, batch);
    const Var lr = reconstruction_loss(model.z, g.adjacency, recon_scale(cfg, n));
    const Var loss = ad::add(lc, lr);
    rec.lc = lc.value()(0, 0);
    rec.lr = lr.value()(0, 0);
    rec.total = loss.value()(0, 0);
    require_finite(rec.total, "pretrain", epoch);

    tape.backward(loss);
    update_shared(state, tape, model, adam);
    rec.seconds = seconds_since(epoch_start);
    result.trace.pretrain.push_back(rec);
  }
  result.trace.pretrain_seconds = seconds_since(stage_start);
  result.z = forward(ctx, state).z;
  return result;
}

FinetuneResult finetune(const GraphContext& ctx, const TrainConfig& cfg,
                        ModelState& state, const Matrix& z0,
                        const FinetuneObserver& observer) {
  validate(cfg);
  const Graph& g = *ctx.graph;
  const int k = resolve_k(g, cfg);
  const int n = g.num_nodes();
  const AdamConfig adam{cfg.learning_rate};
  const auto bases = as_bases(ctx.channels);
  if (z0.rows() != n) throw InputError("finetune: z0 row count mismatch");

  const auto stage_start = Clock::now();
  // Feature centers from K-means on the pretrained embedding; neighbor
  // centers from the soft neighbor distributions weighted by Q.
  const KmeansResult init =
      kmeans(z0, k, derive_seed(cfg.seed, kCenterInitStream, 0),
             KmeansOptions{cfg.kmeans_n_init, 300});
  state.centers.mu = init.centers;
  {
    const Matrix q0 = soft_assignment(z0, state.centers.mu);
    const Matrix e0 = spmm(ctx.neighbor_mean, q0);
    state.centers.pi_centers = class_neighbor_centers(e0, q0);
  }

  FinetuneResult result;
  AssignmentSet targets;
  HardnessWeights weights = uniform_weights(n);
  const bool use_feature = cfg.center_mode != CenterMode::kNeighborOnly;
  const bool use_nd = cfg.center_mode != CenterMode::kFeatureOnly;

  for (int epoch = 0; epoch < cfg.epochs_finetune; ++epoch) {
    const auto epoch_start = Clock::now();
    GradientTape tape;
    const TapeModel model = record_forward(tape, state, bases);
    const Var mu = tape.parameter(state.centers.mu);
    const Var pi = tape.parameter(state.centers.pi_centers);
    const Var q = soft_assignment(model.z, mu);
    const Var e = ad::spmm(ctx.neighbor_mean, q);
    const Var f = soft_assignment(e, pi);
    EpochRecord rec;
    rec.epoch = epoch;

    if (epoch % cfg.update_interval == 0) {
      targets.p = sharpen(q.value());
      targets.g = sharpen(f.value());
      const Labels pseudo = row_argmax(q.value());
      weights = supervision_weights(cfg, ctx, pseudo, k, model.z.value());
    }
    targets.q = q.value();
    targets.f = f.value();
    if (g.labels) rec.metrics = clustering_metrics(row_argmax(targets.q), *g.labels);
    if (observer) observer(epoch, targets);

    const auto batch = draw_batch(
        n, cfg.batch_size, derive_seed(cfg.seed, kFinetuneBatchStream, epoch));
    const Var lc = batched_contrastive(model.z1, model.z2, weights, batch);
    const Var lr = reconstruction_loss(model.z, g.adjacency, recon_scale(cfg, n));

    Var lambda_param;
    Var ld;
    Var kl_pq, kl_gf;
    if (use_feature) kl_pq = kl_divergence(targets.p, q);
    if (use_nd) kl_gf = kl_divergence(targets.g, f);
    if (use_feature && use_nd) {
      if (cfg.lambda_mode == LambdaMode::kLearnable) {
        lambda_param = tape.parameter(scalar(state.lambda_logit));
        const Var lam = ad::sigmoid(lambda_param);
        // lam * KL1 + (1 - lam) * KL2 = KL2 + lam * (KL1 - KL2)
        ld = ad::add(kl_gf, ad::mul_scalar(lam, ad::add(kl_pq, ad::scale(kl_gf, -1.0))));
      } else {
        ld = ad::add(ad::scale(kl_pq, cfg.lambda),
                     ad::scale(kl_gf, 1.0 - cfg.lambda));
      }
    } else {
      ld = use_feature ? kl_pq : kl_gf;
    }
    const Var loss = ad::add(ad::add(ad::scale(lc, cfg.beta),
                                     ad::scale(lr, 1.0 - cfg.beta)),
                             ad::scale(ld, cfg.gamma));
    rec.lc = lc.value()(0, 0);
    rec.lr = lr.value()(0, 0);
    rec.ld = ld.value()(0, 0);
    if (use_feature) rec.ld_feature = kl_pq.value()(0, 0);
    if (use_nd) rec.ld_nd = kl_gf.value()(0, 0);
    rec.total = loss.value()(0, 0);
    require_finite(rec.total, "finetune", epoch);

    tape.backward(loss);
    update_shared(state, tape, model, adam);
    step(state, "mu", state.centers.mu, tape.grad(mu), adam);
    step(state, "pi", state.centers.pi_centers, tape.grad(pi), adam);
    if (lambda_param.valid()) {
      Matrix logit = scalar(state.lambda_logit);
      step(state, "lambda", logit, tape.grad(lambda_param), adam);
      state.lambda_logit = logit(0, 0);
    }
    rec.seconds = seconds_since(epoch_start);
    result.trace.finetune.push_back(rec);
  }

  result.z = forward(ctx, state).z;
  result.assignments = targets;
  result.assignments.q = soft_assignment(result.z, state.centers.mu);
  result.assignments.f = soft_assignment(
      spmm(ctx.neighbor_mean, result.assignments.q), state.centers.pi_centers);
  result.trace.finetune_seconds = seconds_since(stage_start);
  return result;
}

RunResult run_dcgc(const Graph& g, const TrainConfig& cfg) {
  validate(cfg);
  const int k = resolve_k(g, cfg);
  const GraphContext ctx = make_context(g, cfg.t);
  ModelState state = init_model(g, cfg);

  PretrainResult pre = pretrain(ctx, cfg, state);
  FinetuneResult fine = finetune(ctx, cfg, state, pre.z);

  const auto cluster_start = Clock::now();
  const KmeansResult final_km =
      kmeans(fine.z, k, derive_seed(cfg.seed, kFinalStream, 0),
             KmeansOptions{cfg.kmeans_n_init, 300});

  RunResult out;
  ClusterReport& r = out.report;
  r.config = cfg;
  r.num_nodes = g.num_nodes();
  r.num_edges = g.num_edges();
  r.k = k;
  r.predictions = final_km.labels;
  r.argmax_predictions = row_argmax(fine.assignments.q);
  if (g.labels) {
    r.metrics = clustering_metrics(r.predictions, *g.labels);
    r.argmax_metrics = clustering_metrics(r.argmax_predictions, *g.labels);
    r.homophily = homophily_ratio(g);
  }
  r.alpha = state.filter.alpha;
  r.lambda = state.lambda(cfg);
  r.trace.pretrain = std::move(pre.trace.pretrain);
  r.trace.finetune = std::move(fine.trace.finetune);
  r.trace.pretrain_seconds = pre.trace.pretrain_seconds;
  r.trace.finetune_seconds = fine.trace.finetune_seconds;
  r.trace.cluster_seconds = seconds_since(cluster_start);
  out.embedding = std::move(fine.z);
  out.assignments = std::move(fine.assignments);
  return out;
}

Labels attribute_kmeans(const Graph& g, int k, std::uint64_t seed, int n_init) {
  return kmeans(g.attributes, k, seed, KmeansOptions{n_init, 300}).labels;
}

}  // namespace dcgc
