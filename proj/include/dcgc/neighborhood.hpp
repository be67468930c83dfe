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

#ifndef DCGC_NEIGHBORHOOD_HPP_
#define DCGC_NEIGHBORHOOD_HPP_

#include "dcgc/numeric.hpp"

namespace dcgc {

// e: per-node neighbor label distribution (N x K).
// pi: per-cluster mean of e (K x K).
struct NeighborProfile {
  Matrix e;
  Matrix pi;
};

// Pairwise contrastive weights. Unit diagonal, entries in [0, 1].
struct HardnessWeights {
  Matrix m;
};

// Row-stochastic operator averaging over neighbors in `adjacency`. An
// isolated node maps to itself.
SparseMatrix neighbor_mean_operator(const SparseMatrix& adjacency);

// e_i = mean of label_dist over the neighbors of i (own row when isolated).
// label_dist rows must be probability vectors.
Matrix neighbor_distributions(const Matrix& label_dist,
                              const SparseMatrix& adjacency);

// pi_k = mean of e over nodes assigned to k. Empty clusters get a uniform
// row and a warning.
Matrix class_neighbor_centers(const Matrix& e, const Labels& assignment,
                              int k);

// Soft variant: pi_k = sum_j r_jk e_j / sum_j r_jk.
Matrix class_neighbor_centers(const Matrix& e, const Matrix& responsibilities);

// Off-diagonal min-max normalization of a similarity matrix. The diagonal
// of the result is left at 0. A constant off-diagonal maps to 0.
Matrix minmax_normalize_offdiag(const Matrix& sim);

// M_ij = |gate_ij - Norm(cos(z_i, z_j))| for i != j, M_ii = 1.
HardnessWeights hardness_from_gate(const Matrix& gate, const Matrix& z);

// Gate: cos(e_i, e_j) > tau.
HardnessWeights hardness_weights(const Matrix& e, const Matrix& z, double tau);

// Gate: same pseudo-label.
HardnessWeights pseudo_label_weights(const Labels& labels, const Matrix& z);

// M = 1 everywhere (plain InfoNCE).
HardnessWeights uniform_weights(Eigen::Index n);

}  // namespace dcgc

#endif  // DCGC_NEIGHBORHOOD_HPP_
