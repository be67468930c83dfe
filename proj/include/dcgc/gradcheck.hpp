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

#ifndef DCGC_GRADCHECK_HPP_
#define DCGC_GRADCHECK_HPP_

#include <cstdint>
#include <string>
#include <vector>

#include "dcgc/graph.hpp"
#include "dcgc/losses.hpp"
#include "dcgc/numeric.hpp"

namespace dcgc {

enum class CheckedLoss { kContrastive, kReconstruction, kDualCenter, kTotal };

std::string to_string(CheckedLoss loss);

// A small random problem with every trainable block of the model. The
// hardness weights and the target distributions are held constant.
struct GradcheckInstance {
  Graph graph;
  SparseMatrix laplacian;
  SparseMatrix neighbor_mean;
  int t = 1;
  HardnessWeights weights;
  Matrix p_target, g_target;
  double beta = 0.5;
  double gamma = 1.0;
  // alpha (3x1), w1, b1, w2, b2, mu, pi, lambda logit (1x1)
  ParamList params;
};

GradcheckInstance make_gradcheck_instance(std::uint64_t seed, int max_nodes,
                                          int max_dim);

// Loss value and tape gradient (one matrix per entry of inst.params).
double evaluate_loss(const GradcheckInstance& inst, CheckedLoss which,
                     const ParamList& params, ParamList* grads);

struct GradcheckOptions {
  std::uint64_t seed = 0;
  int instances = 20;
  int max_nodes = 8;
  int max_dim = 4;
  double eps = 1e-5;
  double tolerance = 1e-4;
  bool flip_tape_sign = false;  // negative control
};

struct GradcheckRow {
  CheckedLoss loss;
  double max_relative_error = 0.0;
  bool passed = false;
};

std::vector<GradcheckRow> run_gradcheck(const GradcheckOptions& options);

}  // namespace dcgc

#endif  // DCGC_GRADCHECK_HPP_
