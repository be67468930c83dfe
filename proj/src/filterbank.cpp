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

#include "dcgc/filterbank.hpp"

#include <string>

namespace dcgc {

FilterChannels propagate_channels(const Matrix& x, const SparseMatrix& laplacian,
                                  int t) {
  if (t < 1) throw ConfigError("filterbank: t must be >= 1");
  if (laplacian.rows() != laplacian.cols() || laplacian.cols() != x.rows()) {
    throw InputError("filterbank: laplacian is " +
                     std::to_string(laplacian.rows()) + "x" +
                     std::to_string(laplacian.cols()) + " but X has " +
                     std::to_string(x.rows()) + " rows");
  }
  FilterChannels ch;
  ch.lowpass = x;
  ch.highpass = x;
  for (int k = 0; k < t; ++k) {
    ch.lowpass = ch.lowpass - spmm(laplacian, ch.lowpass);
    ch.highpass = spmm(laplacian, ch.highpass);
  }
  ch.identity = x;
  return ch;
}

Matrix apply_filterbank(const Matrix& x, const SparseMatrix& laplacian,
                        const FilterbankParams& params) {
  return mix_channels(propagate_channels(x, laplacian, params.t), params.alpha);
}

std::shared_ptr<const std::vector<Matrix>> as_bases(const FilterChannels& ch) {
  return std::make_shared<const std::vector<Matrix>>(
      std::vector<Matrix>{ch.lowpass, ch.highpass, ch.identity});
}

Var mix_channels(Var alpha,
                 std::shared_ptr<const std::vector<Matrix>> channels) {
  return ad::linear_combination(alpha, std::move(channels));
}

}  // namespace dcgc
