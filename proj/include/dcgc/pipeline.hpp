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

// End-to-end training: contrastive + reconstruction pretraining with
// neighbor-distribution hardness weights, then dual-center self-training,
// then K-means on the final embedding.

#ifndef DCGC_PIPELINE_HPP_
#define DCGC_PIPELINE_HPP_

#include <cstdint>
#include <functional>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "dcgc/clusteval.hpp"
#include "dcgc/encoder.hpp"
#include "dcgc/filterbank.hpp"
#include "dcgc/graph.hpp"
#include "dcgc/losses.hpp"

namespace dcgc {

enum class SupervisionMode { kNeighborDistribution, kPseudoLabel, kNone };
enum class CenterMode { kDual, kFeatureOnly, kNeighborOnly };
enum class LambdaMode { kFixed, kLearnable };

std::string to_string(SupervisionMode m);
std::string to_string(CenterMode m);
std::string to_string(LambdaMode m);
SupervisionMode parse_supervision_mode(const std::string& s);
CenterMode parse_center_mode(const std::string& s);
LambdaMode parse_lambda_mode(const std::string& s);

struct TrainConfig {
  int epochs_pretrain = 300;
  int epochs_finetune = 100;
  int t = 2;                    // filtering times
  int update_interval = 5;      // target refresh period T
  double tau = 0.7;
  double beta = 0.3;
  double gamma = 10.0;
  double lambda = 0.5;
  LambdaMode lambda_mode = LambdaMode::kFixed;
  int k = 0;                    // 0: take the class count from the labels
  int embed_dim = 500;
  double learning_rate = 1e-3;
  std::uint64_t seed = 0;
  int batch_size = 0;           // 0: full batch
  SupervisionMode supervision_mode = SupervisionMode::kNeighborDistribution;
  CenterMode center_mode = CenterMode::kDual;
  int kmeans_n_init = 10;
  int pseudo_label_interval = 1;  // pretraining K-means refresh period
  bool normalize_reconstruction = false;
};

// Throws ConfigError listing every violated constraint.
void validate(const TrainConfig& cfg);

struct AdamConfig {
  double learning_rate = 1e-3;
  double beta1 = 0.9;
  double beta2 = 0.999;
  double epsilon = 1e-8;
};

struct AdamMoments {
  Matrix m;
  Matrix v;
  long step = 0;
};

void adam_step(Matrix& param, const Matrix& grad, AdamMoments& moments,
               const AdamConfig& cfg);

struct ModelState {
  FilterbankParams filter;
  EncoderParams encoder;
  DualCenters centers;          // empty until fine-tuning starts
  double lambda_logit = 0.0;    // used when lambda is learnable
  std::map<std::string, AdamMoments> optimizer;

  double lambda(const TrainConfig& cfg) const;
};

ModelState init_model(const Graph& g, const TrainConfig& cfg);

struct EpochRecord {
  int epoch = 0;
  double lc = 0.0;
  double lr = 0.0;
  std::optional<double> ld;
  std::optional<double> ld_feature;  // KL(P || Q), when that term is active
  std::optional<double> ld_nd;       // KL(G || F), when that term is active
  double total = 0.0;
  double seconds = 0.0;
  std::optional<MetricReport> metrics;  // pseudo-labels vs. truth
};

struct RunTrace {
  std::vector<EpochRecord> pretrain;
  std::vector<EpochRecord> finetune;
  double pretrain_seconds = 0.0;
  double finetune_seconds = 0.0;
  double cluster_seconds = 0.0;
};

// Values of the differentiable forward pass at the current parameters.
struct ForwardValues {
  Matrix h;
  Matrix z1;
  Matrix z2;
  Matrix z;
};

// Per-graph constants shared by both stages.
struct GraphContext {
  const Graph* graph = nullptr;
  SparseMatrix laplacian;
  SparseMatrix neighbor_mean;   // row-stochastic neighbor averaging
  FilterChannels channels;
};

GraphContext make_context(const Graph& g, int t);

ForwardValues forward(const GraphContext& ctx, const ModelState& state);

struct PretrainResult {
  Matrix z;
  RunTrace trace;
};

PretrainResult pretrain(const GraphContext& ctx, const TrainConfig& cfg,
                        ModelState& state);

struct FinetuneResult {
  Matrix z;
  AssignmentSet assignments;
  RunTrace trace;
};

// Called after the targets are (possibly) refreshed and before the
// parameter update of each fine-tuning epoch.
using FinetuneObserver = std::function<void(int epoch, const AssignmentSet&)>;

FinetuneResult finetune(const GraphContext& ctx, const TrainConfig& cfg,
                        ModelState& state, const Matrix& z0,
                        const FinetuneObserver& observer = nullptr);

struct ClusterReport {
  TrainConfig config;
  int num_nodes = 0;
  std::int64_t num_edges = 0;
  int k = 0;
  Labels predictions;            // K-means on the final embedding
  Labels argmax_predictions;     // argmax of the final Q
  std::optional<MetricReport> metrics;
  std::optional<MetricReport> argmax_metrics;
  std::optional<double> homophily;
  Eigen::Vector3d alpha = Eigen::Vector3d::Zero();
  double lambda = 0.0;
  RunTrace trace;
};

struct RunResult {
  ClusterReport report;
  Matrix embedding;
  AssignmentSet assignments;
};

RunResult run_dcgc(const Graph& g, const TrainConfig& cfg);

// Cluster count for (g, cfg): cfg.k if set, else the graph's class count.
int resolve_k(const Graph& g, const TrainConfig& cfg);

// Attribute-only K-means baseline.
Labels attribute_kmeans(const Graph& g, int k, std::uint64_t seed,
                        int n_init = 10);

}  // namespace dcgc

#endif  // DCGC_PIPELINE_HPP_
