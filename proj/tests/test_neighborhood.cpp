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


#include <cmath>

#include <gtest/gtest.h>

#include "dcgc/graph.hpp"
#include "dcgc/neighborhood.hpp"
#include "test_util.hpp"

namespace dcgc {
namespace {

using testing::random_matrix;
using testing::random_stochastic;

TEST(NeighborDistributions, HardLabels) {
  // Node 0 has neighbors 1, 2, 3 labelled 0, 0, 1.
  const Graph g = make_graph(Matrix::Zero(4, 1), {{0, 1}, {0, 2}, {0, 3}});
  const Matrix e = neighbor_distributions(one_hot({1, 0, 0, 1}, 2), g.adjacency);
  EXPECT_NEAR(e(0, 0), 2.0 / 3.0, 1e-15);
  EXPECT_NEAR(e(0, 1), 1.0 / 3.0, 1e-15);
  EXPECT_DOUBLE_EQ(e(1, 0), 0.0);
  EXPECT_DOUBLE_EQ(e(1, 1), 1.0);
}

TEST(NeighborDistributions, IsolatedNodeUsesOwnLabel) {
  const Graph g = make_graph(Matrix::Zero(3, 1), {{0, 1}});
  const Matrix e = neighbor_distributions(one_hot({0, 0, 1}, 2), g.adjacency);
  EXPECT_EQ(Eigen::RowVector2d(e.row(2)), Eigen::RowVector2d(0.0, 1.0));
}

TEST(NeighborDistributions, SoftLabels) {
  const Graph g = make_graph(Matrix::Zero(3, 1), {{0, 1}, {0, 2}});
  Matrix y(3, 2);
  y << 0.2, 0.8, 0.5, 0.5, 1.0, 0.0;
  const Matrix e = neighbor_distributions(y, g.adjacency);
  EXPECT_NEAR(e(0, 0), 0.75, 1e-15);
  EXPECT_NEAR(e(0, 1), 0.25, 1e-15);
}

TEST(NeighborDistributions, RejectsNonStochasticRows) {
  const Graph g = make_graph(Matrix::Zero(2, 1), {{0, 1}});
  Matrix y(2, 2);
  y << 0.5, 0.6, 1.0, 0.0;
  EXPECT_THROW(neighbor_distributions(y, g.adjacency), InputError);
  y << 1.5, -0.5, 1.0, 0.0;
  EXPECT_THROW(neighbor_distributions(y, g.adjacency), InputError);
}

TEST(NeighborDistributions, RowsStochasticOnRandomInputs) {
  for (std::uint64_t seed = 0; seed < 20; ++seed) {
    const Graph g = testing::random_graph(30, 1, 0.1, seed);
    const Matrix e = neighbor_distributions(random_stochastic(30, 4, seed), g.adjacency);
    EXPECT_LE((e.rowwise().sum() - Vector::Ones(30)).cwiseAbs().maxCoeff(), 1e-9);
    EXPECT_GE(e.minCoeff(), 0.0);
    const Matrix pi = class_neighbor_centers(e, random_stochastic(30, 4, seed + 50));
    EXPECT_LE((pi.rowwise().sum() - Vector::Ones(4)).cwiseAbs().maxCoeff(), 1e-9);
    Labels hard(30);
    for (int i = 0; i < 30; ++i) hard[i] = (i * 7 + static_cast<int>(seed)) % 4;
    const Matrix pi_hard = class_neighbor_centers(e, hard, 4);
    EXPECT_LE((pi_hard.rowwise().sum() - Vector::Ones(4)).cwiseAbs().maxCoeff(), 1e-9);
  }
}

TEST(ClassCenters, SingleNodeCluster) {
  Matrix e(3, 2);
  e << 0.3, 0.7, 1, 0, 0, 1;
  const Matrix pi = class_neighbor_centers(e, {0, 1, 1}, 2);
  EXPECT_EQ(Eigen::RowVector2d(pi.row(0)), Eigen::RowVector2d(0.3, 0.7));
  EXPECT_EQ(Eigen::RowVector2d(pi.row(1)), Eigen::RowVector2d(0.5, 0.5));
}

TEST(ClassCenters, EmptyClusterIsUniformWithWarning) {
  testing::CaptureWarnings warnings;
  const Matrix e = random_stochastic(5, 4, 3);
  const Matrix pi = class_neighbor_centers(e, {0, 0, 1, 1, 3}, 4);
  EXPECT_EQ(Eigen::RowVector4d(pi.row(2)), Eigen::RowVector4d::Constant(0.25));
  ASSERT_EQ(warnings.messages().size(), 1u);
  EXPECT_NE(warnings.messages()[0].find("empty"), std::string::npos);
}

TEST(ClassCenters, SoftWeightsAreResponsibilities) {
  Matrix e(2, 2);
  e << 1, 0, 0, 1;
  Matrix r(2, 1);
  r << 3.0, 1.0;
  const Matrix pi = class_neighbor_centers(e, r);
  EXPECT_NEAR(pi(0, 0), 0.75, 1e-15);
}

TEST(MinMax, ConstantRangeIsZero) {
  EXPECT_TRUE(minmax_normalize_offdiag(Matrix::Ones(3, 3)).isZero(0.0));
  Matrix s(2, 2);
  s << 5, 1, 3, 5;
  const Matrix n = minmax_normalize_offdiag(s);
  EXPECT_DOUBLE_EQ(n(0, 1), 0.0);
  EXPECT_DOUBLE_EQ(n(1, 0), 1.0);
  EXPECT_DOUBLE_EQ(n(0, 0), 0.0);
}

// Four unit rows with pairwise cosines {-1, -0.4, 1, 0.4, -1, -0.4}, so the
// off-diagonal min-max normalization maps cos -0.4 to exactly 0.3.
Matrix probe_embedding() {
  Matrix z(4, 2);
  z << 1, 0,
      -1, 0,
      -0.4, std::sqrt(1 - 0.16),
      1, 0;
  return z;
}

TEST(Hardness, DiagonalIsOne) {
  const HardnessWeights w =
      hardness_weights(random_stochastic(6, 3, 1), random_matrix(6, 4, 2), 0.5);
  EXPECT_EQ(Vector(w.m.diagonal()), Vector::Ones(6));
}

TEST(Hardness, SameNeighborhoodDissimilarEmbedding) {
  Matrix e(4, 2);
  e << 1, 0, 1, 0, 0, 1, 0.5, 0.5;
  const HardnessWeights w = hardness_weights(e, probe_embedding(), 0.7);
  // cos(e0, e1) = 1 > tau; rows 0 and 1 are the least similar embeddings.
  EXPECT_DOUBLE_EQ(w.m(0, 1), 1.0);
}

TEST(Hardness, DifferentNeighborhoodPartialSimilarity) {
  Matrix e(4, 2);
  e << 1, 0, 1, 0, 0, 1, 0.5, 0.5;
  const HardnessWeights w = hardness_weights(e, probe_embedding(), 0.7);
  // cos(e0, e2) = 0 so the gate is closed; normalized similarity is 0.3.
  EXPECT_NEAR(w.m(0, 2), 0.3, 1e-12);
}

TEST(Hardness, SymmetricAndBounded) {
  for (std::uint64_t seed = 0; seed < 20; ++seed) {
    const HardnessWeights w = hardness_weights(random_stochastic(15, 3, seed),
                                               random_matrix(15, 5, seed + 9), 0.6);
    EXPECT_LE((w.m - w.m.transpose()).cwiseAbs().maxCoeff(), 1e-12);
    EXPECT_GE(w.m.minCoeff(), 0.0);
    EXPECT_LE(w.m.maxCoeff(), 1.0);
  }
}

TEST(Hardness, MonotoneInEmbeddingSimilarity) {
  // Row 2 sweeps from anti-aligned to aligned with row 0; rows 1 and 3 pin the
  // normalization range to [-1, 1].
  double prev_open = 2.0, prev_closed = -1.0;
  for (double c = -0.9; c <= 0.9; c += 0.2) {
    Matrix z(4, 2);
    z << 1, 0, -1, 0, c, std::sqrt(1 - c * c), 1, 0;
    Matrix open = Matrix::Zero(4, 4), closed = Matrix::Zero(4, 4);
    open(0, 2) = open(2, 0) = 1.0;
    const double m_open = hardness_from_gate(open, z).m(0, 2);
    const double m_closed = hardness_from_gate(closed, z).m(0, 2);
    EXPECT_LT(m_open, prev_open);
    EXPECT_GT(m_closed, prev_closed);
    prev_open = m_open;
    prev_closed = m_closed;
  }
}

TEST(Hardness, ZeroNeighborRowWarns) {
  testing::CaptureWarnings warnings;
  Matrix e = random_stochastic(4, 2, 3);
  e.row(1).setZero();
  const HardnessWeights w = hardness_weights(e, random_matrix(4, 2, 4), 0.5);
  EXPECT_TRUE(w.m.allFinite());
  EXPECT_EQ(warnings.messages().size(), 1u);
}

TEST(Hardness, RejectsTauOutsideUnitInterval) {
  const Matrix e = random_stochastic(3, 2, 1);
  const Matrix z = random_matrix(3, 2, 2);
  EXPECT_THROW(hardness_weights(e, z, 0.0), ConfigError);
  EXPECT_THROW(hardness_weights(e, z, 1.0), ConfigError);
  EXPECT_THROW(hardness_weights(e, random_matrix(4, 2, 2), 0.5), InputError);
}

TEST(Hardness, PseudoLabelGateAndUniform) {
  const Matrix z = probe_embedding();
  const HardnessWeights w = pseudo_label_weights({0, 0, 1, 1}, z);
  EXPECT_DOUBLE_EQ(w.m(0, 1), 1.0);
  EXPECT_NEAR(w.m(0, 2), 0.3, 1e-12);
  EXPECT_EQ(uniform_weights(3).m, Matrix::Ones(3, 3));
}

}  // namespace
}  // namespace dcgc
