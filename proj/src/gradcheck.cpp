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

#include "dcgc/gradcheck.hpp"

#include <algorithm>
#include <random>

#include "dcgc/encoder.hpp"
#include "dcgc/filterbank.hpp"
#include "dcgc/neighborhood.hpp"
#include "dcgc/tape.hpp"

namespace dcgc {
namespace {

enum Slot { kAlpha, kW1, kB1, kW2, kB2, kMu, kPi, kLambda, kNumSlots };

Matrix random_matrix(Eigen::Index r, Eigen::Index c, double scale,
                     std::mt19937_64& rng) {
  std::normal_distribution<double> dist(0.0, scale);
  Matrix m(r, c);
  for (Eigen::Index i = 0; i < m.size(); ++i) m.data()[i] = dist(rng);
  return m;
}

Matrix random_stochastic(Eigen::Index r, Eigen::Index c, std::mt19937_64& rng) {
  std::uniform_real_distribution<double> dist(0.05, 1.0);
  Matrix m(r, c);
  for (Eigen::Index i = 0; i < m.size(); ++i) m.data()[i] = dist(rng);
  return m.rowwise().sum().cwiseInverse().asDiagonal() * m;
}

struct Recorded {
  Var loss;
  std::vector<Var> params;
};

Recorded record(GradientTape& tape, const GradcheckInstance& inst,
                CheckedLoss which, const ParamList& p) {
  Recorded r;
  for (const Matrix& m : p) r.params.push_back(tape.parameter(m));
  const auto channels =
      as_bases(propagate_channels(inst.graph.attributes, inst.laplacian, inst.t));
  const Var h = mix_channels(r.params[kAlpha], channels);
  const Var z1 = encode_view(h, {r.params[kW1], r.params[kB1]});
  const Var z2 = encode_view(h, {r.params[kW2], r.params[kB2]});
  const Var z = combine_views(z1, z2);

  auto dual = [&]() {
    const Var q = soft_assignment(z, r.params[kMu]);
    const Var e = ad::spmm(inst.neighbor_mean, q);
    const Var f = soft_assignment(e, r.params[kPi]);
    const Var kl_pq = kl_divergence(inst.p_target, q);
    const Var kl_gf = kl_divergence(inst.g_target, f);
    const Var lam = ad::sigmoid(r.params[kLambda]);
    return ad::add(kl_gf, ad::mul_scalar(lam, ad::add(kl_pq, ad::scale(kl_gf, -1.0))));
  };

  switch (which) {
    case CheckedLoss::kContrastive:
      r.loss = contrastive_loss(z1, z2, inst.weights);
      break;
    case CheckedLoss::kReconstruction:
      r.loss = reconstruction_loss(z, inst.graph.adjacency);
      break;
    case CheckedLoss::kDualCenter:
      r.loss = dual();
      break;
    case CheckedLoss::kTotal: {
      const Var lc = contrastive_loss(z1, z2, inst.weights);
      const Var lr = reconstruction_loss(z, inst.graph.adjacency);
      r.loss = ad::add(ad::add(ad::scale(lc, inst.beta),
                               ad::scale(lr, 1.0 - inst.beta)),
                       ad::scale(dual(), inst.gamma));
      break;
    }
  }
  return r;
}

}  // namespace

std::string to_string(CheckedLoss loss) {
  switch (loss) {
    case CheckedLoss::kContrastive: return "contrastive";
    case CheckedLoss::kReconstruction: return "reconstruction";
    case CheckedLoss::kDualCenter: return "dual_center";
    case CheckedLoss::kTotal: return "total";
  }
  return "?";
}

GradcheckInstance make_gradcheck_instance(std::uint64_t seed, int max_nodes,
                                          int max_dim) {
  std::mt19937_64 rng(seed);
  const int n = std::uniform_int_distribution<int>(3, std::max(3, max_nodes))(rng);
  const int d_in = std::uniform_int_distribution<int>(2, std::max(2, max_dim))(rng);
  const int d_emb = std::uniform_int_distribution<int>(2, std::max(2, max_dim))(rng);
  const int k = std::uniform_int_distribution<int>(2, std::min(3, n))(rng);

  std::bernoulli_distribution edge(0.4);
  std::vector<Edge> edges;
  for (int u = 0; u < n; ++u) {
    for (int v = u + 1; v < n; ++v) {
      if (edge(rng)) edges.emplace_back(u, v);
    }
  }

  GradcheckInstance inst;
  inst.graph = make_graph(random_matrix(n, d_in, 1.0, rng), edges);
  inst.laplacian = normalized_laplacian(inst.graph);
  inst.neighbor_mean = neighbor_mean_operator(inst.graph.adjacency);
  inst.t = std::uniform_int_distribution<int>(1, 2)(rng);
  inst.beta = std::uniform_real_distribution<double>(0.1, 0.9)(rng);
  inst.gamma = std::uniform_real_distribution<double>(0.5, 2.0)(rng);

  inst.params.resize(kNumSlots);
  inst.params[kAlpha] = random_matrix(3, 1, 0.5, rng);
  inst.params[kW1] = random_matrix(d_in, d_emb, 0.7, rng);
  inst.params[kB1] = random_matrix(1, d_emb, 0.3, rng);
  inst.params[kW2] = random_matrix(d_in, d_emb, 0.7, rng);
  inst.params[kB2] = random_matrix(1, d_emb, 0.3, rng);
  inst.params[kMu] = random_matrix(k, d_emb, 0.5, rng);
  inst.params[kPi] = random_matrix(k, k, 1.0, rng);
  inst.params[kLambda] = random_matrix(1, 1, 1.0, rng);

  // Frozen constants evaluated at the base point.
  GradientTape tape;
  const auto channels =
      as_bases(propagate_channels(inst.graph.attributes, inst.laplacian, inst.t));
  const Var alpha = tape.constant(inst.params[kAlpha]);
  const Var h = mix_channels(alpha, channels);
  const Var z1 = encode_view(h, {tape.constant(inst.params[kW1]),
                                 tape.constant(inst.params[kB1])});
  const Var z2 = encode_view(h, {tape.constant(inst.params[kW2]),
                                 tape.constant(inst.params[kB2])});
  const Matrix z = combine_views(z1.value(), z2.value());
  const Matrix e = random_stochastic(n, k, rng);
  const double tau = std::uniform_real_distribution<double>(0.2, 0.9)(rng);
  inst.weights = hardness_weights(e, z, tau);
  inst.p_target = random_stochastic(n, k, rng);
  inst.g_target = random_stochastic(n, k, rng);
  return inst;
}

double evaluate_loss(const GradcheckInstance& inst, CheckedLoss which,
                     const ParamList& params, ParamList* grads) {
  GradientTape tape;
  const Recorded r = record(tape, inst, which, params);
  const double value = r.loss.value()(0, 0);
  if (grads != nullptr) {
    tape.backward(r.loss);
    grads->clear();
    for (const Var& v : r.params) grads->push_back(tape.grad(v));
  }
  return value;
}

std::vector<GradcheckRow> run_gradcheck(const GradcheckOptions& options) {
  const std::vector<CheckedLoss> losses = {
      CheckedLoss::kContrastive, CheckedLoss::kReconstruction,
      CheckedLoss::kDualCenter, CheckedLoss::kTotal};
  std::vector<GradcheckRow> rows;
  for (CheckedLoss which : losses) rows.push_back(GradcheckRow{which, 0.0, true});

  for (int i = 0; i < options.instances; ++i) {
    const GradcheckInstance inst = make_gradcheck_instance(
        options.seed * 1000003ULL + static_cast<std::uint64_t>(i),
        options.max_nodes, options.max_dim);
    for (GradcheckRow& row : rows) {
      ParamList tape_grad;
      evaluate_loss(inst, row.loss, inst.params, &tape_grad);
      if (options.flip_tape_sign) {
        for (Matrix& g : tape_grad) g = -g;
      }
      const ParamList fd = finite_diff_gradient(
          [&inst, &row](const ParamList& p) {
            return evaluate_loss(inst, row.loss, p, nullptr);
          },
          inst.params, options.eps);
      row.max_relative_error =
          std::max(row.max_relative_error, max_relative_error(tape_grad, fd));
    }
  }
  for (GradcheckRow& row : rows) {
    row.passed = row.max_relative_error <= options.tolerance;
  }
  return rows;
}

}  // namespace dcgc
