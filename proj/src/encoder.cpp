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

#include "dcgc/encoder.hpp"

#include <cmath>
#include <random>
#include <string>

namespace dcgc {
namespace {

Matrix glorot(Eigen::Index fan_in, Eigen::Index fan_out, std::mt19937_64& rng) {
  const double bound = std::sqrt(6.0 / static_cast<double>(fan_in + fan_out));
  std::uniform_real_distribution<double> dist(-bound, bound);
  Matrix w(fan_in, fan_out);
  for (Eigen::Index i = 0; i < w.size(); ++i) w.data()[i] = dist(rng);
  return w;
}

void check_shapes(const Matrix& w, const Matrix& b, const char* which) {
  if (b.rows() != 1 || b.cols() != w.cols()) {
    throw InputError(std::string("encoder: ") + which +
                     " bias must be 1 x embed_dim");
  }
}

}  // namespace

EncoderParams init_encoder(Eigen::Index input_dim, Eigen::Index embed_dim,
                           std::uint64_t seed) {
  if (input_dim <= 0 || embed_dim <= 0) {
    throw ConfigError("encoder: dimensions must be positive");
  }
  std::seed_seq seq1{seed, std::uint64_t{1}}, seq2{seed, std::uint64_t{2}};
  std::mt19937_64 rng1(seq1), rng2(seq2);
  EncoderParams p;
  p.w1 = glorot(input_dim, embed_dim, rng1);
  p.w2 = glorot(input_dim, embed_dim, rng2);
  p.b1 = Matrix::Zero(1, embed_dim);
  p.b2 = Matrix::Zero(1, embed_dim);
  return p;
}

void validate(const EncoderParams& params) {
  if (params.w1.rows() != params.w2.rows() ||
      params.w1.cols() != params.w2.cols()) {
    throw InputError("encoder: views must share input and embedding sizes");
  }
  check_shapes(params.w1, params.b1, "view 1");
  check_shapes(params.w2, params.b2, "view 2");
}

Matrix row_normalize(const Matrix& x) {
  Matrix out(x.rows(), x.cols());
  int degenerate = 0;
  for (Eigen::Index i = 0; i < x.rows(); ++i) {
    const double norm = x.row(i).norm();
    if (norm <= kRowNormFloor) ++degenerate;
    out.row(i) = x.row(i) / std::max(norm, kRowNormFloor);
  }
  if (degenerate > 0) {
    log::warn("row_normalize: " + std::to_string(degenerate) +
              " degenerate (near-zero) rows");
  }
  return out;
}

std::pair<Matrix, Matrix> encode_views(const Matrix& h,
                                       const EncoderParams& params) {
  validate(params);
  if (h.cols() != params.input_dim()) {
    throw InputError("encode_views: input has " + std::to_string(h.cols()) +
                     " columns, encoder expects " +
                     std::to_string(params.input_dim()));
  }
  Matrix u1 = (h * params.w1).rowwise() + params.b1.row(0);
  Matrix u2 = (h * params.w2).rowwise() + params.b2.row(0);
  return {row_normalize(u1), row_normalize(u2)};
}

Matrix combine_views(const Matrix& z1, const Matrix& z2) {
  if (z1.rows() != z2.rows() || z1.cols() != z2.cols()) {
    throw InputError("combine_views: view shapes differ");
  }
  return 0.5 * (z1 + z2);
}

Matrix reconstruct_adjacency(const Matrix& z) {
  Matrix logits = z * z.transpose();
  return (1.0 + (-logits.array()).exp()).inverse().matrix();
}

Var encode_view(Var h, const ViewVars& view) {
  return ad::row_normalize(ad::add_row_bias(ad::matmul(h, view.weight),
                                            view.bias),
                           kRowNormFloor);
}

Var combine_views(Var z1, Var z2) { return ad::scale(ad::add(z1, z2), 0.5); }

}  // namespace dcgc
