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

#ifndef DCGC_NUMERIC_HPP_
#define DCGC_NUMERIC_HPP_

#include <cstddef>
#include <functional>
#include <string>
#include <vector>

#include <Eigen/Dense>
#include <Eigen/Sparse>

#include "dcgc/errors.hpp"

namespace dcgc {

template <typename Scalar>
using DenseMatrixT =
    Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;
template <typename Scalar>
using SparseMatrixT = Eigen::SparseMatrix<Scalar, Eigen::RowMajor, int>;
template <typename Scalar>
using VectorT = Eigen::Matrix<Scalar, Eigen::Dynamic, 1>;

using Matrix = DenseMatrixT<double>;
using SparseMatrix = SparseMatrixT<double>;
using Vector = VectorT<double>;
using Labels = std::vector<int>;

// Sparse-dense product. Single-threaded Eigen kernel, so the reduction order
// is fixed for a given input.
template <typename Scalar, typename Derived>
DenseMatrixT<Scalar> spmm(const SparseMatrixT<Scalar>& s,
                          const Eigen::MatrixBase<Derived>& d) {
  if (s.cols() != d.rows()) {
    throw InputError("spmm: sparse operand has " + std::to_string(s.cols()) +
                     " columns but dense operand has " +
                     std::to_string(d.rows()) + " rows");
  }
  DenseMatrixT<Scalar> out = s * d;
  return out;
}

template <typename Derived>
bool all_finite(const Eigen::DenseBase<Derived>& m) {
  return m.derived().allFinite();
}

// Row i of the result is one-hot at labels[i].
Matrix one_hot(const Labels& labels, int k);

// Index of the largest entry per row; ties resolve to the lowest column.
Labels row_argmax(const Matrix& m);

// Row-wise cosine similarity matrix. Rows with zero norm get similarity 0
// with every row (including themselves).
Matrix cosine_similarity(const Matrix& rows);

using ParamList = std::vector<Matrix>;
using ScalarFunction = std::function<double(const ParamList&)>;

// Central-difference gradient of `loss_fn` at `params`, one matrix per
// parameter. Throws NumericError naming the coordinate if a probe is not
// finite.
ParamList finite_diff_gradient(const ScalarFunction& loss_fn,
                               const ParamList& params, double eps);

// max over entries of |a - b| / max(|b|, floor), b being the reference.
double max_relative_error(const ParamList& a, const ParamList& b,
                          double floor = 1e-8);

}  // namespace dcgc

#endif  // DCGC_NUMERIC_HPP_
