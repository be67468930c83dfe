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
#include <cmath>
#include <vector>

#include <gtest/gtest.h>

#include "dcgc/clusteval.hpp"
#include "dcgc/losses.hpp"
#include "dcgc/neighborhood.hpp"
#include "test_util.hpp"

namespace dcgc {
namespace {

using testing::easy_sbm;

TrainConfig small_config(std::uint64_t seed = 0) {
  TrainConfig c;
  c.epochs_pretrain = 8;
  c.epochs_finetune = 6;
  c.embed_dim = 16;
  c.kmeans_n_init = 2;
  c.update_interval = 3;
  c.seed = seed;
  return c;
}

Graph small_graph(std::uint64_t seed = 0) {
  SbmSpec s = easy_sbm();
  s.block_sizes = {20, 20};
  return generate_sbm(s, seed);
}

double median(std::vector<double> v) {
  std::sort(v.begin(), v.end());
  const std::size_t n = v.size();
  return n % 2 == 1 ? v[n / 2] : 0.5 * (v[n / 2 - 1] + v[n / 2]);
}

TEST(Config, DefaultsAreValid) {
  const TrainConfig c;
  EXPECT_NO_THROW(validate(c));
  EXPECT_EQ(c.t, 2);
  EXPECT_EQ(c.update_interval, 5);
  EXPECT_DOUBLE_EQ(c.tau, 0.7);
  EXPECT_DOUBLE_EQ(c.beta, 0.3);
  EXPECT_DOUBLE_EQ(c.gamma, 10.0);
  EXPECT_DOUBLE_EQ(c.lambda, 0.5);
  EXPECT_EQ(c.embed_dim, 500);
  EXPECT_DOUBLE_EQ(c.learning_rate, 1e-3);
}

TEST(Config, ListsEveryViolation) {
  TrainConfig c;
  c.tau = 1.0;
  c.beta = -0.1;
  c.t = 0;
  try {
    validate(c);
    FAIL() << "expected ConfigError";
  } catch (const ConfigError& e) {
    const std::string msg = e.what();
    EXPECT_NE(msg.find("tau"), std::string::npos);
    EXPECT_NE(msg.find("beta"), std::string::npos);
    EXPECT_NE(msg.find("t must"), std::string::npos);
  }
}

TEST(Config, RejectsEachBadField) {
  const std::vector<std::function<void(TrainConfig&)>> breakers = {
      [](TrainConfig& c) { c.epochs_pretrain = 0; },
      [](TrainConfig& c) { c.epochs_finetune = 0; },
      [](TrainConfig& c) { c.update_interval = 0; },
      [](TrainConfig& c) { c.tau = 0.0; },
      [](TrainConfig& c) { c.beta = 1.5; },
      [](TrainConfig& c) { c.gamma = -1.0; },
      [](TrainConfig& c) { c.lambda = 2.0; },
      [](TrainConfig& c) { c.k = 1; },
      [](TrainConfig& c) { c.embed_dim = 0; },
      [](TrainConfig& c) { c.learning_rate = 0.0; },
      [](TrainConfig& c) { c.batch_size = -1; },
      [](TrainConfig& c) { c.kmeans_n_init = 0; },
      [](TrainConfig& c) { c.pseudo_label_interval = 0; },
      [](TrainConfig& c) {
        c.lambda_mode = LambdaMode::kLearnable;
        c.lambda = 0.0;
      },
  };
  for (std::size_t i = 0; i < breakers.size(); ++i) {
    TrainConfig c;
    breakers[i](c);
    EXPECT_THROW(validate(c), ConfigError) << "case " << i;
  }
}

TEST(Config, ModeNamesRoundTrip) {
  for (auto m : {SupervisionMode::kNeighborDistribution, SupervisionMode::kPseudoLabel,
                 SupervisionMode::kNone}) {
    EXPECT_EQ(parse_supervision_mode(to_string(m)), m);
  }
  for (auto m : {CenterMode::kDual, CenterMode::kFeatureOnly, CenterMode::kNeighborOnly}) {
    EXPECT_EQ(parse_center_mode(to_string(m)), m);
  }
  for (auto m : {LambdaMode::kFixed, LambdaMode::kLearnable}) {
    EXPECT_EQ(parse_lambda_mode(to_string(m)), m);
  }
  EXPECT_THROW(parse_supervision_mode("bogus"), ConfigError);
  EXPECT_THROW(parse_center_mode("bogus"), ConfigError);
  EXPECT_THROW(parse_lambda_mode("bogus"), ConfigError);
}

TEST(Config, ResolveK) {
  const Graph g = small_graph();
  TrainConfig c;
  EXPECT_EQ(resolve_k(g, c), 2);
  c.k = 4;
  EXPECT_EQ(resolve_k(g, c), 4);
  Graph unlabeled = g;
  unlabeled.labels.reset();
  unlabeled.num_classes = 0;
  c.k = 0;
  EXPECT_THROW(resolve_k(unlabeled, c), ConfigError);
  c.k = 41;
  EXPECT_THROW(resolve_k(g, c), ConfigError);
}

TEST(Adam, FirstStepMovesByLearningRate) {
  Matrix p(1, 3);
  p << 1.0, -2.0, 0.5;
  Matrix g(1, 3);
  g << 0.3, -4.0, 1e-3;
  AdamMoments mo;
  adam_step(p, g, mo, AdamConfig{0.1});
  // m_hat = g and v_hat = g^2 after bias correction.
  EXPECT_NEAR(p(0, 0), 0.9, 1e-6);
  EXPECT_NEAR(p(0, 1), -1.9, 1e-6);
  EXPECT_NEAR(p(0, 2), 0.4, 1e-5);
  EXPECT_EQ(mo.step, 1);
}

TEST(Adam, MatchesReferenceRecurrence) {
  Matrix p = testing::random_matrix(2, 2, 1);
  Matrix ref = p;
  Matrix m = Matrix::Zero(2, 2), v = Matrix::Zero(2, 2);
  AdamMoments mo;
  const AdamConfig cfg{0.01};
  for (int s = 1; s <= 5; ++s) {
    const Matrix g = testing::random_matrix(2, 2, 10 + s);
    adam_step(p, g, mo, cfg);
    m = 0.9 * m + 0.1 * g;
    v = 0.999 * v + 0.001 * g.cwiseProduct(g);
    const Matrix mh = m / (1.0 - std::pow(0.9, s));
    const Matrix vh = v / (1.0 - std::pow(0.999, s));
    ref -= (cfg.learning_rate * mh.array() / (vh.array().sqrt() + 1e-8)).matrix();
  }
  EXPECT_LT((p - ref).cwiseAbs().maxCoeff(), 1e-12);
}

TEST(Pipeline, RunsAreBitDeterministic) {
  const Graph g = small_graph(3);
  const TrainConfig c = small_config(11);
  const RunResult a = run_dcgc(g, c);
  const RunResult b = run_dcgc(g, c);
  EXPECT_EQ(a.report.predictions, b.report.predictions);
  EXPECT_EQ(a.report.argmax_predictions, b.report.argmax_predictions);
  EXPECT_TRUE(a.embedding == b.embedding);
  ASSERT_EQ(a.report.trace.pretrain.size(), b.report.trace.pretrain.size());
  for (std::size_t i = 0; i < a.report.trace.pretrain.size(); ++i) {
    EXPECT_EQ(a.report.trace.pretrain[i].total, b.report.trace.pretrain[i].total);
  }
  for (std::size_t i = 0; i < a.report.trace.finetune.size(); ++i) {
    EXPECT_EQ(a.report.trace.finetune[i].total, b.report.trace.finetune[i].total);
  }
}

TEST(Pipeline, MinibatchRunsAreDeterministic) {
  const Graph g = small_graph(4);
  TrainConfig c = small_config(2);
  c.batch_size = 16;
  const RunResult a = run_dcgc(g, c);
  const RunResult b = run_dcgc(g, c);
  EXPECT_TRUE(a.embedding == b.embedding);
  EXPECT_EQ(a.report.predictions, b.report.predictions);
}

TEST(Pipeline, ReportShape) {
  const Graph g = small_graph(5);
  const TrainConfig c = small_config(1);
  const RunResult r = run_dcgc(g, c);
  EXPECT_EQ(r.report.num_nodes, 40);
  EXPECT_EQ(r.report.k, 2);
  EXPECT_EQ(r.report.predictions.size(), 40u);
  EXPECT_EQ(r.report.trace.pretrain.size(), 8u);
  EXPECT_EQ(r.report.trace.finetune.size(), 6u);
  EXPECT_EQ(r.embedding.rows(), 40);
  EXPECT_EQ(r.embedding.cols(), 16);
  ASSERT_TRUE(r.report.metrics.has_value());
  ASSERT_TRUE(r.report.homophily.has_value());
  EXPECT_DOUBLE_EQ(r.report.lambda, 0.5);
  for (Eigen::Index i = 0; i < r.embedding.rows(); ++i) {
    EXPECT_LE(r.embedding.row(i).norm(), 1.0 + 1e-12);
  }
  for (const auto& e : r.report.trace.pretrain) {
    EXPECT_FALSE(e.ld.has_value());
    EXPECT_NEAR(e.total, e.lc + e.lr, 1e-9 * std::abs(e.total));
  }
  for (const auto& e : r.report.trace.finetune) {
    ASSERT_TRUE(e.ld && e.ld_feature && e.ld_nd);
    EXPECT_NEAR(*e.ld, 0.5 * *e.ld_feature + 0.5 * *e.ld_nd, 1e-12);
    EXPECT_NEAR(e.total, 0.3 * e.lc + 0.7 * e.lr + 10.0 * *e.ld,
                1e-9 * std::abs(e.total));
  }
}

TEST(Pipeline, UnlabeledGraphHasNoMetrics) {
  Graph g = small_graph(6);
  g.labels.reset();
  TrainConfig c = small_config(0);
  c.k = 2;
  const RunResult r = run_dcgc(g, c);
  EXPECT_FALSE(r.report.metrics.has_value());
  EXPECT_FALSE(r.report.argmax_metrics.has_value());
  EXPECT_FALSE(r.report.homophily.has_value());
  for (const auto& e : r.report.trace.pretrain) EXPECT_FALSE(e.metrics.has_value());
  EXPECT_EQ(r.report.predictions.size(), 40u);
}

TEST(Pipeline, NoSupervisionUsesUniformWeights) {
  const Graph g = small_graph(7);
  TrainConfig c = small_config(3);
  c.supervision_mode = SupervisionMode::kNone;
  const GraphContext ctx = make_context(g, c.t);
  ModelState state = init_model(g, c);
  const ForwardValues f0 = forward(ctx, state);
  const double expected = contrastive_loss(f0.z1, f0.z2, uniform_weights(40));
  const PretrainResult pre = pretrain(ctx, c, state);
  EXPECT_NEAR(pre.trace.pretrain[0].lc, expected, 1e-12);
  for (const auto& e : pre.trace.pretrain) EXPECT_FALSE(e.metrics.has_value());
}

TEST(Pipeline, SupervisionChangesTheContrastiveTerm) {
  const Graph g = small_graph(7);
  TrainConfig c = small_config(3);
  const GraphContext ctx = make_context(g, c.t);
  ModelState state = init_model(g, c);
  const ForwardValues f0 = forward(ctx, state);
  const double uniform = contrastive_loss(f0.z1, f0.z2, uniform_weights(40));
  const PretrainResult pre = pretrain(ctx, c, state);
  EXPECT_GT(std::abs(pre.trace.pretrain[0].lc - uniform), 1e-6);
  for (const auto& e : pre.trace.pretrain) EXPECT_TRUE(e.metrics.has_value());
}

TEST(Pipeline, PseudoLabelIntervalControlsRefresh) {
  const Graph g = small_graph(8);
  TrainConfig c = small_config(1);
  c.pseudo_label_interval = 3;
  const GraphContext ctx = make_context(g, c.t);
  ModelState state = init_model(g, c);
  const PretrainResult pre = pretrain(ctx, c, state);
  for (const auto& e : pre.trace.pretrain) {
    EXPECT_EQ(e.metrics.has_value(), e.epoch % 3 == 0) << "epoch " << e.epoch;
  }
}

TEST(Pipeline, EverySupervisionModeTrains) {
  const Graph g = small_graph(9);
  for (auto m : {SupervisionMode::kNeighborDistribution, SupervisionMode::kPseudoLabel,
                 SupervisionMode::kNone}) {
    TrainConfig c = small_config(0);
    c.supervision_mode = m;
    const RunResult r = run_dcgc(g, c);
    ASSERT_TRUE(r.report.metrics.has_value()) << to_string(m);
    EXPECT_GE(r.report.metrics->acc, 0.5);
  }
}

TEST(Pipeline, FeatureOnlyCenters) {
  const Graph g = small_graph(10);
  TrainConfig c = small_config(0);
  c.center_mode = CenterMode::kFeatureOnly;
  const RunResult r = run_dcgc(g, c);
  for (const auto& e : r.report.trace.finetune) {
    EXPECT_FALSE(e.ld_nd.has_value());
    ASSERT_TRUE(e.ld && e.ld_feature);
    EXPECT_EQ(*e.ld, *e.ld_feature);
  }
}

TEST(Pipeline, NeighborOnlyCenters) {
  const Graph g = small_graph(10);
  TrainConfig c = small_config(0);
  c.center_mode = CenterMode::kNeighborOnly;
  const RunResult r = run_dcgc(g, c);
  for (const auto& e : r.report.trace.finetune) {
    EXPECT_FALSE(e.ld_feature.has_value());
    ASSERT_TRUE(e.ld && e.ld_nd);
    EXPECT_EQ(*e.ld, *e.ld_nd);
  }
}

TEST(Pipeline, LearnableLambdaMoves) {
  const Graph g = small_graph(11);
  TrainConfig c = small_config(0);
  c.lambda_mode = LambdaMode::kLearnable;
  c.learning_rate = 1e-2;
  const RunResult r = run_dcgc(g, c);
  EXPECT_GT(r.report.lambda, 0.0);
  EXPECT_LT(r.report.lambda, 1.0);
  EXPECT_NE(r.report.lambda, 0.5);
}

TEST(Pipeline, TargetsChangeOnlyAtRefreshEpochs) {
  const Graph g = small_graph(12);
  TrainConfig c = small_config(4);
  c.epochs_finetune = 10;
  c.update_interval = 4;
  const GraphContext ctx = make_context(g, c.t);
  ModelState state = init_model(g, c);
  const PretrainResult pre = pretrain(ctx, c, state);
  std::vector<AssignmentSet> seen;
  finetune(ctx, c, state, pre.z,
           [&seen](int, const AssignmentSet& a) { seen.push_back(a); });
  ASSERT_EQ(seen.size(), 10u);
  bool changed_at_refresh = false;
  for (int e = 1; e < 10; ++e) {
    const bool same_p = seen[e].p == seen[e - 1].p;
    const bool same_g = seen[e].g == seen[e - 1].g;
    if (e % 4 != 0) {
      EXPECT_TRUE(same_p && same_g) << "epoch " << e;
    } else {
      changed_at_refresh = changed_at_refresh || !same_p || !same_g;
    }
    EXPECT_FALSE(seen[e].q == seen[e - 1].q) << "epoch " << e;
  }
  EXPECT_TRUE(changed_at_refresh);
}

TEST(Pipeline, SmallStepDecreasesLoss) {
  for (std::uint64_t s = 0; s < 5; ++s) {
    const Graph g = small_graph(20 + s);
    TrainConfig c = small_config(s);
    c.learning_rate = 1e-5;
    c.epochs_pretrain = 2;
    c.pseudo_label_interval = 100;  // same weights on both epochs
    const GraphContext ctx = make_context(g, c.t);
    ModelState state = init_model(g, c);
    const PretrainResult pre = pretrain(ctx, c, state);
    EXPECT_LT(pre.trace.pretrain[1].total, pre.trace.pretrain[0].total)
        << "instance " << s;
  }
}

TEST(Pipeline, FrozenTargetsDriveDualLossDown) {
  std::vector<double> drops;
  for (std::uint64_t s = 0; s < 5; ++s) {
    const Graph g = small_graph(30 + s);
    TrainConfig c = small_config(s);
    c.epochs_pretrain = 30;
    c.epochs_finetune = 30;
    c.update_interval = c.epochs_finetune;
    const RunResult r = run_dcgc(g, c);
    const auto& ft = r.report.trace.finetune;
    int rises = 0;
    for (std::size_t i = 1; i < ft.size(); ++i) {
      if (*ft[i].ld > *ft[i - 1].ld + 1e-12) ++rises;
    }
    EXPECT_LE(rises, 3) << "seed " << s;
    drops.push_back(*ft.front().ld - *ft.back().ld);
  }
  EXPECT_GT(median(drops), 0.0);
}

TEST(Pipeline, FiniteCheckReportsEpoch) {
  Graph g = small_graph(13);
  g.attributes(0, 0) = std::numeric_limits<double>::infinity();
  TrainConfig c = small_config(0);
  EXPECT_THROW(run_dcgc(g, c), NumericError);
}

TEST(Baseline, AttributeKmeansSeparatesEasySbm) {
  const Graph g = generate_sbm(easy_sbm(), 0);
  const Labels pred = attribute_kmeans(g, 2, 0);
  EXPECT_GE(clustering_metrics(pred, *g.labels).acc, 0.95);
}

// Full default configuration on the easy two-block graph.
TEST(EndToEnd, EasySbmPretrainAndFinetune) {
  std::vector<double> pre_acc;
  int finetune_not_worse = 0;
  for (std::uint64_t s = 0; s < 10; ++s) {
    const Graph g = generate_sbm(easy_sbm(), s);
    TrainConfig c;
    c.seed = s;
    const GraphContext ctx = make_context(g, c.t);
    ModelState state = init_model(g, c);
    const PretrainResult pre = pretrain(ctx, c, state);
    const double a0 =
        clustering_metrics(kmeans(pre.z, 2, s, KmeansOptions{10, 300}).labels, *g.labels)
            .acc;
    const FinetuneResult fine = finetune(ctx, c, state, pre.z);
    const double a1 =
        clustering_metrics(kmeans(fine.z, 2, s, KmeansOptions{10, 300}).labels,
                           *g.labels)
            .acc;
    pre_acc.push_back(a0);
    if (a1 >= a0) ++finetune_not_worse;
  }
  EXPECT_GE(median(pre_acc), 0.95);
  EXPECT_GE(finetune_not_worse, 7);
}

}  // namespace
}  // namespace dcgc
