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

// Reverse-mode gradient tape restricted to the primitives used by the
// clustering pipeline. Every node holds a dense matrix; scalars are 1x1.
//
// Usage:
//   GradientTape tape;
//   Var w = tape.parameter(w0);
//   Var loss = ...ops on w...;
//   tape.backward(loss);
//   const Matrix& dw = tape.grad(w);
//
// A tape is single-writer. Ops that take a constant sparse matrix keep a
// pointer to it, so that matrix must outlive the call to backward().

#ifndef DCGC_TAPE_HPP_
#define DCGC_TAPE_HPP_

#include <functional>
#include <memory>
#include <vector>

#include "dcgc/numeric.hpp"

namespace dcgc {

class GradientTape;

class Var {
 public:
  Var() = default;

  const Matrix& value() const;
  GradientTape& tape() const { return *tape_; }
  int id() const { return id_; }
  bool valid() const { return tape_ != nullptr; }

 private:
  friend class GradientTape;
  Var(GradientTape* tape, int id) : tape_(tape), id_(id) {}

  GradientTape* tape_ = nullptr;
  int id_ = -1;
};

class GradientTape {
 public:
  // Receives the gradient of the output node and pushes contributions to
  // its inputs through accumulate().
  using BackwardFn = std::function<void(GradientTape&, const Matrix&)>;

  GradientTape() = default;
  GradientTape(const GradientTape&) = delete;
  GradientTape& operator=(const GradientTape&) = delete;

  Var constant(Matrix value);
  Var parameter(Matrix value);

  // Records a derived node. `inputs` lists the nodes the backward function
  // may accumulate into.
  Var record(Matrix value, const std::vector<Var>& inputs, BackwardFn backward);

  const Matrix& value(Var v) const;

  // Gradient of the last backward() output w.r.t. v. Zero for nodes that do
  // not influence the output.
  const Matrix& grad(Var v) const;

  // Replays the tape from a 1x1 output node.
  void backward(Var output);

  void accumulate(Var v, const Matrix& g);
  bool requires_grad(Var v) const;

  const std::vector<Var>& parameters() const { return parameters_; }
  std::size_t size() const { return nodes_.size(); }

 private:
  struct Node {
    Matrix value;
    Matrix grad;
    bool requires_grad = false;
    BackwardFn backward;
  };

  std::vector<Node> nodes_;
  std::vector<Var> parameters_;
};

namespace ad {

Var matmul(Var a, Var b);
Var matmul(Var a, const Matrix& b);
Var add(Var a, Var b);
Var scale(Var a, double s);
Var add_constant(Var a, double c);
Var mul_scalar(Var a, Var b);       // both 1x1
Var scale_by(Var s, Var m);         // s is 1x1, m any shape
Var sigmoid(Var a);

// x (n x d) plus a 1 x d bias broadcast over rows.
Var add_row_bias(Var x, Var bias);

// Divides each row by max(norm, floor).
Var row_normalize(Var x, double floor = 1e-12);

// sum_k weights(k) * bases[k]; weights is k x 1.
Var linear_combination(Var weights,
                       std::shared_ptr<const std::vector<Matrix>> bases);

// s * x for a constant sparse s.
Var spmm(const SparseMatrix& s, Var x);

// Rows of x at `rows`, in order.
Var gather_rows(Var x, const std::vector<int>& rows);

}  // namespace ad
}  // namespace dcgc

#endif  // DCGC_TAPE_HPP_
