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

#ifndef DCGC_FILTERBANK_HPP_
#define DCGC_FILTERBANK_HPP_

#include <memory>
#include <vector>

#include "dcgc/numeric.hpp"
#include "dcgc/tape.hpp"

namespace dcgc {

// Three-channel filter mix: low-pass (I - L)^t, high-pass L^t, identity.
struct FilterbankParams {
  Eigen::Vector3d alpha = Eigen::Vector3d::Constant(1.0 / 3.0);
  int t = 2;
};

// The propagated attribute stacks. They depend only on X and L, so they are
// computed once and reused while the alphas train.
struct FilterChannels {
  Matrix lowpass;   // (I - L)^t X
  Matrix highpass;  // L^t X
  Matrix identity;  // X
};

FilterChannels propagate_channels(const Matrix& x, const SparseMatrix& laplacian,
                                  int t);

// alpha1 (I - L)^t X + alpha2 L^t X + alpha3 X via t sparse products per
// channel.
Matrix apply_filterbank(const Matrix& x, const SparseMatrix& laplacian,
                        const FilterbankParams& params);

template <typename Derived>
Matrix mix_channels(const FilterChannels& ch,
                    const Eigen::MatrixBase<Derived>& alpha) {
  return alpha(0) * ch.lowpass + alpha(1) * ch.highpass +
         alpha(2) * ch.identity;
}

// Differentiable mix; `alpha` is a 3x1 tape variable.
Var mix_channels(Var alpha,
                 std::shared_ptr<const std::vector<Matrix>> channels);
std::shared_ptr<const std::vector<Matrix>> as_bases(const FilterChannels& ch);

}  // namespace dcgc

#endif  // DCGC_FILTERBANK_HPP_
