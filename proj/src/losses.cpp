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

#include "dcgc/losses.hpp"

#include <algorithm>
#include <cmath>
#include <string>

namespace dcgc {
namespace {

// Row-normalized inputs keep every scaled logit within [-1, 1].
constexpr double kLogitBound = 1.0 + 1e-9;

void check_logits(const Matrix& scaled) {
  if (scaled.size() > 0 && scaled.cwiseAbs().maxCoeff() > kLogitBound) {
    throw NumericError(
        "contrastive_loss: |M * S| exceeds 1; embeddings must be row-normalized");
  }
}

// One anchor view of the two-view loss. `cross` holds S(z_i^l, z_j^other),
// `self` holds S(z_i^l, z_j^l). Returns sum_i loss(i, l) and, when the
// gradient outputs are non-null, d(sum)/d(cross) and d(sum)/d(self).
double anchor_view(const Matrix& cross, const Matrix& self, const Matrix& m,
                   Matrix* d_cross, Matrix* d_self) {
  const auto n = cross.rows();
  const Matrix cross_logits = m.cwiseProduct(cross);
  Matrix self_logits = m.cwiseProduct(self);
  check_logits(cross_logits);
  check_logits(self_logits);
  Matrix e_cross = cross_logits.array().exp().matrix();
  Matrix e_self = self_logits.array().exp().matrix();
  e_self.diagonal().setZero();
  const Vector denom = e_cross.rowwise().sum() + e_self.rowwise().sum();
  double total = 0.0;
  for (Eigen::Index i = 0; i < n; ++i) {
    total += std::log(denom(i)) - cross_logits(i, i);
  }
  if (d_cross != nullptr) {
    const Vector inv = denom.cwiseInverse();
    *d_cross = inv.asDiagonal() * e_cross.cwiseProduct(m);
    d_cross->diagonal() -= m.diagonal();
    *d_self = inv.asDiagonal() * e_self.cwiseProduct(m);
  }
  return total;
}

void check_views(const Matrix& z1, const Matrix& z2, const Matrix& m) {
  if (z1.rows() != z2.rows() || z1.cols() != z2.cols()) {
    throw InputError("contrastive_loss: view shapes differ");
  }
  if (m.rows() != z1.rows() || m.cols() != z1.rows()) {
    throw InputError("contrastive_loss: weights must be N x N");
  }
}

double contrastive_impl(const Matrix& z1, const Matrix& z2, const Matrix& m,
                        Matrix* g1, Matrix* g2) {
  check_views(z1, z2, m);
  const auto n = z1.rows();
  if (n == 0) return 0.0;
  const Matrix s12 = z1 * z2.transpose();
  const Matrix s11 = z1 * z1.transpose();
  const Matrix s22 = z2 * z2.transpose();
  const Matrix s21 = s12.transpose();
  const double c = 1.0 / (2.0 * static_cast<double>(n));
  const bool want_grad = g1 != nullptr;
  Matrix d12, d11, d21, d22;
  const double l1 = anchor_view(s12, s11, m, want_grad ? &d12 : nullptr,
                                want_grad ? &d11 : nullptr);
  const double l2 = anchor_view(s21, s22, m, want_grad ? &d21 : nullptr,
                                want_grad ? &d22 : nullptr);
  if (want_grad) {
    // s12 = z1 z2^T, s21 = z2 z1^T, s11 = z1 z1^T, s22 = z2 z2^T.
    *g1 = c * (d12 * z2 + d21.transpose() * z2 +
               (d11 + d11.transpose()) * z1);
    *g2 = c * (d12.transpose() * z1 + d21 * z1 +
               (d22 + d22.transpose()) * z2);
  }
  return c * (l1 + l2);
}

double softplus(double x) {
  return std::max(x, 0.0) + std::log1p(std::exp(-std::abs(x)));
}

// Shared forward for the Student-t kernel. Also returns the unnormalized
// kernel values w and row sums s for the backward pass.
Matrix student_t(const Matrix& x, const Matrix& c, Matrix* w_out,
                 Vector* s_out) {
  if (c.rows() == 0) throw InputError("soft_assignment: no centers (K = 0)");
  if (x.cols() != c.cols()) {
    throw InputError("soft_assignment: points have dimension " +
                     std::to_string(x.cols()) + ", centers " +
                     std::to_string(c.cols()));
  }
  const Vector xx = x.rowwise().squaredNorm();
  const Vector cc = c.rowwise().squaredNorm();
  Matrix d2 = -2.0 * x * c.transpose();
  d2.colwise() += xx;
  d2.rowwise() += cc.transpose();
  d2 = d2.cwiseMax(0.0);
  Matrix w = (1.0 + d2.array()).inverse().matrix();
  Vector s = w.rowwise().sum();
  Matrix q = s.cwiseInverse().asDiagonal() * w;
  if (w_out != nullptr) *w_out = std::move(w);
  if (s_out != nullptr) *s_out = std::move(s);
  return q;
}

}  // namespace

double contrastive_loss(const Matrix& z1, const Matrix& z2,
                        const HardnessWeights& m) {
  return contrastive_impl(z1, z2, m.m, nullptr, nullptr);
}

Var contrastive_loss(Var z1, Var z2, const HardnessWeights& m) {
  Matrix g1, g2;
  Matrix out(1, 1);
  out(0, 0) = contrastive_impl(z1.value(), z2.value(), m.m, &g1, &g2);
  return z1.tape().record(std::move(out), {z1, z2},
                          [z1, z2, g1, g2](GradientTape& t, const Matrix& g) {
                            t.accumulate(z1, g(0, 0) * g1);
                            t.accumulate(z2, g(0, 0) * g2);
                          });
}

double reconstruction_loss(const SparseMatrix& a, const Matrix& a_hat) {
  if (a.rows() != a_hat.rows() || a.cols() != a_hat.cols()) {
    throw InputError("reconstruction_loss: shape mismatch");
  }
  const Matrix dense_a = Matrix(a);
  constexpr double lo = kProbabilityFloor, hi = 1.0 - kProbabilityFloor;
  Eigen::Index clamped = 0;
  double total = 0.0;
  for (Eigen::Index i = 0; i < a_hat.rows(); ++i) {
    for (Eigen::Index j = 0; j < a_hat.cols(); ++j) {
      double p = a_hat(i, j);
      if (!(p >= lo && p <= hi)) {
        ++clamped;
        p = std::clamp(std::isnan(p) ? 0.5 : p, lo, hi);
      }
      const double y = dense_a(i, j);
      total += -y * std::log(p) - (1.0 - y) * std::log(1.0 - p);
    }
  }
  if (clamped > 0) {
    log::warn("reconstruction_loss: clamped " + std::to_string(clamped) +
              " reconstructed entries into [1e-12, 1 - 1e-12]");
  }
  return total;
}

Var reconstruction_loss(Var z, const SparseMatrix& a, double scale) {
  const Matrix& zv = z.value();
  if (a.rows() != zv.rows() || a.cols() != zv.rows()) {
    throw InputError("reconstruction_loss: adjacency must be N x N");
  }
  const Matrix logits = zv * zv.transpose();
  // BCE(sigmoid(x), y) = softplus(x) - y x.
  double total = logits.unaryExpr(&softplus).sum();
  for (int i = 0; i < a.outerSize(); ++i) {
    for (SparseMatrix::InnerIterator it(a, i); it; ++it) {
      total -= it.value() * logits(i, it.col());
    }
  }
  Matrix out(1, 1);
  out(0, 0) = scale * total;
  const SparseMatrix* ap = &a;
  return z.tape().record(
      std::move(out), {z}, [z, ap, logits, scale](GradientTape& t,
                                                  const Matrix& g) {
        Matrix d = (1.0 + (-logits.array()).exp()).inverse().matrix();
        d -= Matrix(*ap);
        const Matrix sym = d + d.transpose();
        t.accumulate(z, (g(0, 0) * scale) * (sym * z.value()));
      });
}

Matrix soft_assignment(const Matrix& points, const Matrix& centers) {
  return student_t(points, centers, nullptr, nullptr);
}

Var soft_assignment(Var points, Var centers) {
  Matrix w;
  Vector s;
  Matrix q = student_t(points.value(), centers.value(), &w, &s);
  Matrix qc = q;
  return points.tape().record(
      std::move(q), {points, centers},
      [points, centers, qc, w, s](GradientTape& t, const Matrix& g) {
        const Matrix& x = points.value();
        const Matrix& c = centers.value();
        // q = w / s  =>  dL/dw_ij = (g_ij - sum_k g_ik q_ik) / s_i.
        const Vector inner = g.cwiseProduct(qc).rowwise().sum();
        Matrix dw = g;
        dw.colwise() -= inner;
        dw = s.cwiseInverse().asDiagonal() * dw;
        // w = 1 / (1 + d2)  =>  dw/dd2 = -w^2.
        const Matrix r = -dw.cwiseProduct(w.cwiseProduct(w));
        if (t.requires_grad(points)) {
          const Vector rs = r.rowwise().sum();
          t.accumulate(points, 2.0 * (rs.asDiagonal() * x - r * c));
        }
        if (t.requires_grad(centers)) {
          const Vector cs = r.colwise().sum().transpose();
          t.accumulate(centers, -2.0 * (r.transpose() * x - cs.asDiagonal() * c));
        }
      });
}

Matrix sharpen(const Matrix& q) {
  const Vector freq = q.colwise().sum().transpose();
  Matrix weighted(q.rows(), q.cols());
  for (Eigen::Index j = 0; j < q.cols(); ++j) {
    if (freq(j) > 0.0) {
      weighted.col(j) = q.col(j).cwiseAbs2() / freq(j);
    } else {
      weighted.col(j).setZero();
      log::warn("sharpen: cluster " + std::to_string(j) +
                " has no mass; its target column is 0");
    }
  }
  const Vector row_sum = weighted.rowwise().sum();
  return row_sum.cwiseInverse().asDiagonal() * weighted;
}

double kl_divergence(const Matrix& p, const Matrix& q) {
  if (p.rows() != q.rows() || p.cols() != q.cols()) {
    throw InputError("kl_divergence: shape mismatch");
  }
  double total = 0.0;
  Eigen::Index floored = 0;
  for (Eigen::Index i = 0; i < p.size(); ++i) {
    const double pi = p.data()[i];
    if (pi <= 0.0) continue;
    double qi = q.data()[i];
    if (qi < kProbabilityFloor) {
      ++floored;
      qi = kProbabilityFloor;
    }
    total += pi * std::log(pi / qi);
  }
  if (floored > 0) {
    log::warn("kl_divergence: floored " + std::to_string(floored) +
              " zero assignments under positive target mass");
  }
  return total;
}

Var kl_divergence(const Matrix& p, Var q) {
  Matrix out(1, 1);
  out(0, 0) = kl_divergence(p, q.value());
  return q.tape().record(std::move(out), {q},
                         [p, q](GradientTape& t, const Matrix& g) {
                           const Matrix& qv = q.value();
                           Matrix d = Matrix::Zero(qv.rows(), qv.cols());
                           for (Eigen::Index i = 0; i < qv.size(); ++i) {
                             const double pi = p.data()[i];
                             const double qi = qv.data()[i];
                             if (pi > 0.0 && qi >= kProbabilityFloor) {
                               d.data()[i] = -pi / qi;
                             }
                           }
                           t.accumulate(q, g(0, 0) * d);
                         });
}

double dual_center_loss(const AssignmentSet& assign, double lambda) {
  if (!(lambda >= 0.0 && lambda <= 1.0)) {
    throw ConfigError("dual_center_loss: lambda must lie in [0, 1]");
  }
  double loss = 0.0;
  if (lambda > 0.0) loss += lambda * kl_divergence(assign.p, assign.q);
  if (lambda < 1.0) loss += (1.0 - lambda) * kl_divergence(assign.g, assign.f);
  return loss;
}

double total_loss(double lc, double lr, double ld, double beta, double gamma) {
  if (!(beta >= 0.0 && beta <= 1.0)) {
    throw ConfigError("total_loss: beta must lie in [0, 1]");
  }
  if (!(gamma >= 0.0)) throw ConfigError("total_loss: gamma must be >= 0");
  return beta * lc + (1.0 - beta) * lr + gamma * ld;
}

}  // namespace dcgc
