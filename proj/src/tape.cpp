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

#include "dcgc/tape.hpp"

#include <cmath>
#include <string>

namespace dcgc {
namespace {

void require_same_tape(Var a, Var b) {
  if (&a.tape() != &b.tape()) {
    throw InputError("tape: operands recorded on different tapes");
  }
}

void require_shape(const Matrix& m, Eigen::Index rows, Eigen::Index cols,
                   const char* op) {
  if (m.rows() != rows || m.cols() != cols) {
    throw InputError(std::string(op) + ": expected " + std::to_string(rows) +
                     "x" + std::to_string(cols) + " operand, got " +
                     std::to_string(m.rows()) + "x" +
                     std::to_string(m.cols()));
  }
}

}  // namespace

const Matrix& Var::value() const { return tape_->value(*this); }

Var GradientTape::constant(Matrix value) {
  nodes_.push_back(Node{std::move(value), Matrix(), false, nullptr});
  return Var(this, static_cast<int>(nodes_.size()) - 1);
}

Var GradientTape::parameter(Matrix value) {
  nodes_.push_back(Node{std::move(value), Matrix(), true, nullptr});
  Var v(this, static_cast<int>(nodes_.size()) - 1);
  parameters_.push_back(v);
  return v;
}

Var GradientTape::record(Matrix value, const std::vector<Var>& inputs,
                         BackwardFn backward) {
  bool needs = false;
  for (const Var& in : inputs) {
    if (in.tape_ != this) {
      throw InputError("tape: input recorded on a different tape");
    }
    needs = needs || nodes_[in.id_].requires_grad;
  }
  nodes_.push_back(
      Node{std::move(value), Matrix(), needs,
           needs ? std::move(backward) : BackwardFn(nullptr)});
  return Var(this, static_cast<int>(nodes_.size()) - 1);
}

const Matrix& GradientTape::value(Var v) const { return nodes_.at(v.id_).value; }

const Matrix& GradientTape::grad(Var v) const {
  const Node& n = nodes_.at(v.id_);
  if (n.grad.size() == 0 && n.value.size() != 0) {
    // Lazily materialized zero so callers always get the value's shape.
    auto& mut = const_cast<Node&>(n);
    mut.grad = Matrix::Zero(n.value.rows(), n.value.cols());
  }
  return n.grad;
}

bool GradientTape::requires_grad(Var v) const {
  return nodes_.at(v.id_).requires_grad;
}

void GradientTape::accumulate(Var v, const Matrix& g) {
  Node& n = nodes_.at(v.id_);
  if (!n.requires_grad) return;
  require_shape(g, n.value.rows(), n.value.cols(), "tape.accumulate");
  if (n.grad.size() == 0) {
    n.grad = g;
  } else {
    n.grad += g;
  }
}

void GradientTape::backward(Var output) {
  if (output.tape_ != this) throw InputError("tape: foreign output node");
  require_shape(value(output), 1, 1, "tape.backward");
  for (Node& n : nodes_) n.grad.resize(0, 0);
  nodes_[output.id_].grad = Matrix::Ones(1, 1);
  for (int id = output.id_; id >= 0; --id) {
    Node& n = nodes_[id];
    if (!n.requires_grad || !n.backward || n.grad.size() == 0) continue;
    // Copy: the callback may grow nodes_ if it ever records, invalidating n.
    const Matrix g = n.grad;
    n.backward(*this, g);
  }
  for (const Var& p : parameters_) {
    if (!grad(p).allFinite()) {
      throw NumericError("tape: non-finite gradient for parameter node " +
                         std::to_string(p.id_));
    }
  }
}

namespace ad {

Var matmul(Var a, Var b) {
  require_same_tape(a, b);
  if (a.value().cols() != b.value().rows()) {
    throw InputError("matmul: inner dimensions differ");
  }
  Matrix out = a.value() * b.value();
  return a.tape().record(std::move(out), {a, b},
                         [a, b](GradientTape& t, const Matrix& g) {
                           if (t.requires_grad(a)) {
                             t.accumulate(a, g * b.value().transpose());
                           }
                           if (t.requires_grad(b)) {
                             t.accumulate(b, a.value().transpose() * g);
                           }
                         });
}

Var matmul(Var a, const Matrix& b) {
  if (a.value().cols() != b.rows()) {
    throw InputError("matmul: inner dimensions differ");
  }
  Matrix out = a.value() * b;
  return a.tape().record(std::move(out), {a},
                         [a, b](GradientTape& t, const Matrix& g) {
                           t.accumulate(a, g * b.transpose());
                         });
}

Var add(Var a, Var b) {
  require_same_tape(a, b);
  require_shape(b.value(), a.value().rows(), a.value().cols(), "add");
  Matrix out = a.value() + b.value();
  return a.tape().record(std::move(out), {a, b},
                         [a, b](GradientTape& t, const Matrix& g) {
                           t.accumulate(a, g);
                           t.accumulate(b, g);
                         });
}

Var scale(Var a, double s) {
  Matrix out = s * a.value();
  return a.tape().record(std::move(out), {a},
                         [a, s](GradientTape& t, const Matrix& g) {
                           t.accumulate(a, s * g);
                         });
}

Var add_constant(Var a, double c) {
  Matrix out = a.value().array() + c;
  return a.tape().record(std::move(out), {a},
                         [a](GradientTape& t, const Matrix& g) {
                           t.accumulate(a, g);
                         });
}

Var mul_scalar(Var a, Var b) {
  require_same_tape(a, b);
  require_shape(a.value(), 1, 1, "mul_scalar");
  require_shape(b.value(), 1, 1, "mul_scalar");
  Matrix out = a.value().cwiseProduct(b.value());
  return a.tape().record(std::move(out), {a, b},
                         [a, b](GradientTape& t, const Matrix& g) {
                           t.accumulate(a, g.cwiseProduct(b.value()));
                           t.accumulate(b, g.cwiseProduct(a.value()));
                         });
}

Var scale_by(Var s, Var m) {
  require_same_tape(s, m);
  require_shape(s.value(), 1, 1, "scale_by");
  Matrix out = s.value()(0, 0) * m.value();
  return s.tape().record(std::move(out), {s, m},
                         [s, m](GradientTape& t, const Matrix& g) {
                           if (t.requires_grad(s)) {
                             Matrix gs(1, 1);
                             gs(0, 0) = g.cwiseProduct(m.value()).sum();
                             t.accumulate(s, gs);
                           }
                           t.accumulate(m, s.value()(0, 0) * g);
                         });
}

Var sigmoid(Var a) {
  Matrix out = (1.0 + (-a.value().array()).exp()).inverse().matrix();
  Matrix y = out;
  return a.tape().record(std::move(out), {a},
                         [a, y](GradientTape& t, const Matrix& g) {
                           t.accumulate(a, g.cwiseProduct(
                                               y.cwiseProduct(
                                                   (1.0 - y.array()).matrix())));
                         });
}

Var add_row_bias(Var x, Var bias) {
  require_same_tape(x, bias);
  require_shape(bias.value(), 1, x.value().cols(), "add_row_bias");
  Matrix out = x.value().rowwise() + bias.value().row(0);
  return x.tape().record(std::move(out), {x, bias},
                         [x, bias](GradientTape& t, const Matrix& g) {
                           t.accumulate(x, g);
                           if (t.requires_grad(bias)) {
                             t.accumulate(bias, g.colwise().sum());
                           }
                         });
}

Var row_normalize(Var x, double floor) {
  const Matrix& in = x.value();
  Vector denom(in.rows());
  for (Eigen::Index i = 0; i < in.rows(); ++i) {
    denom(i) = std::max(in.row(i).norm(), floor);
  }
  Matrix out = denom.cwiseInverse().asDiagonal() * in;
  Matrix y = out;
  return x.tape().record(
      std::move(out), {x},
      [x, y, denom, floor](GradientTape& t, const Matrix& g) {
        Matrix gx(y.rows(), y.cols());
        for (Eigen::Index i = 0; i < y.rows(); ++i) {
          if (denom(i) > floor) {
            const double proj = y.row(i).dot(g.row(i));
            gx.row(i) = (g.row(i) - proj * y.row(i)) / denom(i);
          } else {
            gx.row(i) = g.row(i) / floor;
          }
        }
        t.accumulate(x, gx);
      });
}

Var linear_combination(Var weights,
                       std::shared_ptr<const std::vector<Matrix>> bases) {
  const auto k = static_cast<Eigen::Index>(bases->size());
  require_shape(weights.value(), k, 1, "linear_combination");
  if (k == 0) throw InputError("linear_combination: no bases");
  Matrix out = Matrix::Zero((*bases)[0].rows(), (*bases)[0].cols());
  for (Eigen::Index i = 0; i < k; ++i) {
    const Matrix& b = (*bases)[static_cast<std::size_t>(i)];
    require_shape(b, out.rows(), out.cols(), "linear_combination");
    out += weights.value()(i, 0) * b;
  }
  return weights.tape().record(
      std::move(out), {weights},
      [weights, bases](GradientTape& t, const Matrix& g) {
        Matrix gw(static_cast<Eigen::Index>(bases->size()), 1);
        for (std::size_t i = 0; i < bases->size(); ++i) {
          gw(static_cast<Eigen::Index>(i), 0) =
              g.cwiseProduct((*bases)[i]).sum();
        }
        t.accumulate(weights, gw);
      });
}

Var spmm(const SparseMatrix& s, Var x) {
  Matrix out = dcgc::spmm(s, x.value());
  const SparseMatrix* sp = &s;
  return x.tape().record(std::move(out), {x},
                         [x, sp](GradientTape& t, const Matrix& g) {
                           Matrix gx = sp->transpose() * g;
                           t.accumulate(x, gx);
                         });
}

Var gather_rows(Var x, const std::vector<int>& rows) {
  const Matrix& in = x.value();
  Matrix out(static_cast<Eigen::Index>(rows.size()), in.cols());
  for (std::size_t i = 0; i < rows.size(); ++i) {
    if (rows[i] < 0 || rows[i] >= in.rows()) {
      throw InputError("gather_rows: row index out of range");
    }
    out.row(static_cast<Eigen::Index>(i)) = in.row(rows[i]);
  }
  return x.tape().record(std::move(out), {x},
                         [x, rows](GradientTape& t, const Matrix& g) {
                           Matrix gx = Matrix::Zero(x.value().rows(),
                                                    x.value().cols());
                           for (std::size_t i = 0; i < rows.size(); ++i) {
                             gx.row(rows[i]) +=
                                 g.row(static_cast<Eigen::Index>(i));
                           }
                           t.accumulate(x, gx);
                         });
}

}  // namespace ad
}  // namespace dcgc
