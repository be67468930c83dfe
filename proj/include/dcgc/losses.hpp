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

// Training objectives. Each loss has a plain evaluation and a tape op with
// an analytic backward pass. Hardness weights and sharpened targets enter
// as constants.

#ifndef DCGC_LOSSES_HPP_
#define DCGC_LOSSES_HPP_

#include "dcgc/neighborhood.hpp"
#include "dcgc/numeric.hpp"
#include "dcgc/tape.hpp"

namespace dcgc {

struct AssignmentSet {
  Matrix q;  // feature-space soft assignment
  Matrix p;  // sharpened q
  Matrix f;  // neighbor-distribution soft assignment
  Matrix g;  // sharpened f
};

struct DualCenters {
  Matrix mu;          // K x d
  Matrix pi_centers;  // K x K
};

inline constexpr double kProbabilityFloor = 1e-12;

// Two-view weighted InfoNCE. For anchor i in view l the positive is the
// cross-view pair (i, i); negatives are every j != i in both views, each
// logit scaled by M_ij. Averaged over the 2N anchors.
double contrastive_loss(const Matrix& z1, const Matrix& z2,
                        const HardnessWeights& m);
Var contrastive_loss(Var z1, Var z2, const HardnessWeights& m);

// Binary cross-entropy of a_hat against binary a, summed over all N^2
// ordered pairs. a_hat is clamped to [1e-12, 1 - 1e-12].
double reconstruction_loss(const SparseMatrix& a, const Matrix& a_hat);

// Same objective with a_hat = sigmoid(z z^T), evaluated from the logits.
// `scale` multiplies the sum (1 for the literal objective, 1/N^2 for the
// mean-normalized variant).
Var reconstruction_loss(Var z, const SparseMatrix& a, double scale = 1.0);

// Student-t kernel assignment: q_ij proportional to (1 + |x_i - c_j|^2)^-1.
Matrix soft_assignment(const Matrix& points, const Matrix& centers);
Var soft_assignment(Var points, Var centers);

// p_ij proportional to q_ij^2 / sum_i q_ij, rows renormalized.
Matrix sharpen(const Matrix& q);

// sum_ij p_ij log(p_ij / q_ij) with 0 log 0 = 0 and q floored at 1e-12.
double kl_divergence(const Matrix& p, const Matrix& q);
Var kl_divergence(const Matrix& p, Var q);

// lambda KL(P||Q) + (1 - lambda) KL(G||F).
double dual_center_loss(const AssignmentSet& assign, double lambda);

// beta Lc + (1 - beta) Lr + gamma Ld.
double total_loss(double lc, double lr, double ld, double beta, double gamma);

}  // namespace dcgc

#endif  // DCGC_LOSSES_HPP_
