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

#ifndef DCGC_ENCODER_HPP_
#define DCGC_ENCODER_HPP_

#include <cstdint>
#include <utility>

#include "dcgc/numeric.hpp"
#include "dcgc/tape.hpp"

namespace dcgc {

// Two unshared linear layers, one per view. Each view is followed by L2 row
// normalization.
struct EncoderParams {
  Matrix w1, b1;  // D x d, 1 x d
  Matrix w2, b2;

  Eigen::Index input_dim() const { return w1.rows(); }
  Eigen::Index embed_dim() const { return w1.cols(); }
};

// Glorot-uniform weights, zero biases. The two views draw from independent
// streams of the same seed.
EncoderParams init_encoder(Eigen::Index input_dim, Eigen::Index embed_dim,
                           std::uint64_t seed);

void validate(const EncoderParams& params);

inline constexpr double kRowNormFloor = 1e-12;

// Divides each row by max(norm, kRowNormFloor). Zero rows stay zero and are
// reported through log::warn.
Matrix row_normalize(const Matrix& x);

std::pair<Matrix, Matrix> encode_views(const Matrix& h,
                                       const EncoderParams& params);

// Z = (Z1 + Z2) / 2, not renormalized.
Matrix combine_views(const Matrix& z1, const Matrix& z2);

// sigmoid(z z^T).
Matrix reconstruct_adjacency(const Matrix& z);

// Tape handles for one view's layer.
struct ViewVars {
  Var weight;
  Var bias;
};

Var encode_view(Var h, const ViewVars& view);
Var combine_views(Var z1, Var z2);

}  // namespace dcgc

#endif  // DCGC_ENCODER_HPP_
