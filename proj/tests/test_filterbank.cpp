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


#include <gtest/gtest.h>

#include "dcgc/filterbank.hpp"
#include "dcgc/graph.hpp"
#include "test_util.hpp"

namespace dcgc {
namespace {

using testing::random_matrix;

FilterbankParams params(double a1, double a2, double a3, int t) {
  FilterbankParams p;
  p.alpha << a1, a2, a3;
  p.t = t;
  return p;
}

TEST(Filterbank, IdentityChannelReturnsInput) {
  const Graph g = testing::random_graph(8, 3, 0.4, 1);
  const SparseMatrix l = normalized_laplacian(g);
  for (int t : {1, 2, 5}) {
    EXPECT_EQ(apply_filterbank(g.attributes, l, params(0, 0, 1, t)), g.attributes);
  }
}

TEST(Filterbank, EmptyGraphLowpassIsIdentity) {
  const Graph g = make_graph(random_matrix(4, 2, 3), {});
  const SparseMatrix l = normalized_laplacian(g);
  EXPECT_EQ(apply_filterbank(g.attributes, l, params(1, 0, 0, 1)), g.attributes);
}

TEST(Filterbank, SingleEdgeLowpass) {
  const Graph g = make_graph(Matrix::Identity(2, 2), {{0, 1}});
  const Matrix h =
      apply_filterbank(g.attributes, normalized_laplacian(g), params(1, 0, 0, 1));
  EXPECT_TRUE(h.isApprox(Matrix::Constant(2, 2, 0.5), 1e-15));
}

TEST(Filterbank, MatchesExplicitMatrixPowers) {
  const Graph g = testing::random_graph(9, 4, 0.3, 5);
  const Matrix l = normalized_laplacian(g);
  const Matrix eye = Matrix::Identity(9, 9);
  const Matrix x = g.attributes;
  for (int t : {1, 2, 3}) {
    Matrix low = eye, high = eye;
    for (int i = 0; i < t; ++i) {
      low = low * (eye - l);
      high = high * l;
    }
    const Matrix expected = 0.2 * low * x - 0.7 * high * x + 1.1 * x;
    const Matrix h = apply_filterbank(x, normalized_laplacian(g), params(0.2, -0.7, 1.1, t));
    EXPECT_LE((h - expected).cwiseAbs().maxCoeff(), 1e-12) << "t=" << t;
  }
}

TEST(Filterbank, LinearInEachAlpha) {
  const Graph g = testing::random_graph(12, 3, 0.3, 7);
  const SparseMatrix l = normalized_laplacian(g);
  const double a = -1.7;
  for (int c = 0; c < 3; ++c) {
    Eigen::Vector3d unit = Eigen::Vector3d::Zero();
    unit(c) = 1.0;
    FilterbankParams one{unit, 2};
    FilterbankParams scaled{a * unit, 2};
    const Matrix base = apply_filterbank(g.attributes, l, one);
    const Matrix h = apply_filterbank(g.attributes, l, scaled);
    EXPECT_LE((h - a * base).cwiseAbs().maxCoeff(), 1e-12) << "channel " << c;
  }
}

TEST(Filterbank, ChannelDecomposition) {
  const Graph g = testing::random_graph(12, 3, 0.3, 8);
  const SparseMatrix l = normalized_laplacian(g);
  const Matrix sum = apply_filterbank(g.attributes, l, params(0.4, 0, 0, 2)) +
                     apply_filterbank(g.attributes, l, params(0, -0.3, 0, 2)) +
                     apply_filterbank(g.attributes, l, params(0, 0, 2.0, 2));
  const Matrix h = apply_filterbank(g.attributes, l, params(0.4, -0.3, 2.0, 2));
  EXPECT_LE((h - sum).cwiseAbs().maxCoeff(), 1e-12);
}

TEST(Filterbank, TapeMixMatchesValueAndGradient) {
  const Graph g = testing::random_graph(6, 3, 0.5, 9);
  const FilterChannels ch = propagate_channels(g.attributes, normalized_laplacian(g), 2);
  const auto bases = as_bases(ch);
  const Matrix weights = random_matrix(6, 3, 10);
  Matrix alpha(3, 1);
  alpha << 0.3, -0.2, 0.9;

  auto loss = [&](const Matrix& a) {
    return mix_channels(ch, a.col(0)).cwiseProduct(weights).array().square().sum();
  };
  GradientTape tape;
  const Var av = tape.parameter(alpha);
  const Var h = mix_channels(av, bases);
  EXPECT_LE((h.value() - mix_channels(ch, alpha.col(0))).cwiseAbs().maxCoeff(), 1e-15);

  // d/dalpha_c sum((H*W)^2) = sum(2 (H*W) * W * channel_c)
  const Matrix hw = h.value().cwiseProduct(weights);
  const ParamList fd = finite_diff_gradient(
      [&](const ParamList& p) { return loss(p[0]); }, {alpha}, 1e-6);
  for (int c = 0; c < 3; ++c) {
    const double analytic =
        (2.0 * hw.cwiseProduct(weights).cwiseProduct((*bases)[c])).sum();
    EXPECT_NEAR(analytic, fd[0](c, 0), 1e-6 * std::max(1.0, std::abs(analytic)));
  }
}

TEST(Filterbank, RejectsBadInput) {
  const Graph g = testing::random_graph(5, 2, 0.5, 11);
  const SparseMatrix l = normalized_laplacian(g);
  EXPECT_THROW(apply_filterbank(Matrix::Zero(4, 2), l, {}), InputError);
  EXPECT_THROW(apply_filterbank(g.attributes, l, params(1, 1, 1, 0)), ConfigError);
}

TEST(Filterbank, DefaultParams) {
  const FilterbankParams p;
  EXPECT_EQ(p.t, 2);
  EXPECT_DOUBLE_EQ(p.alpha.sum(), 1.0);
  EXPECT_DOUBLE_EQ(p.alpha(0), p.alpha(2));
}

}  // namespace
}  // namespace dcgc
