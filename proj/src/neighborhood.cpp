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

#include "dcgc/neighborhood.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>

namespace dcgc {
namespace {

void require_stochastic_rows(const Matrix& m, const char* what) {
  for (Eigen::Index i = 0; i < m.rows(); ++i) {
    if (std::abs(m.row(i).sum() - 1.0) > 1e-6 || (m.row(i).array() < 0).any()) {
      throw InputError(std::string(what) + ": row " + std::to_string(i) +
                       " is not a probability vector");
    }
  }
}

}  // namespace

SparseMatrix neighbor_mean_operator(const SparseMatrix& adjacency) {
  const auto n = adjacency.rows();
  std::vector<Eigen::Triplet<double>> triplets;
  triplets.reserve(static_cast<std::size_t>(adjacency.nonZeros() + n));
  for (Eigen::Index i = 0; i < n; ++i) {
    const double deg = adjacency.row(i).sum();
    if (deg <= 0.0) {
      triplets.emplace_back(static_cast<int>(i), static_cast<int>(i), 1.0);
      continue;
    }
    for (SparseMatrix::InnerIterator it(adjacency, i); it; ++it) {
      triplets.emplace_back(static_cast<int>(i), static_cast<int>(it.col()),
                            it.value() / deg);
    }
  }
  SparseMatrix op(n, n);
  op.setFromTriplets(triplets.begin(), triplets.end());
  op.makeCompressed();
  return op;
}

Matrix neighbor_distributions(const Matrix& label_dist,
                              const SparseMatrix& adjacency) {
  if (adjacency.rows() != label_dist.rows()) {
    throw InputError("neighbor_distributions: adjacency/label size mismatch");
  }
  require_stochastic_rows(label_dist, "neighbor_distributions");
  return spmm(neighbor_mean_operator(adjacency), label_dist);
}

Matrix class_neighbor_centers(const Matrix& e, const Labels& assignment,
                              int k) {
  if (static_cast<Eigen::Index>(assignment.size()) != e.rows()) {
    throw InputError("class_neighbor_centers: assignment length mismatch");
  }
  return class_neighbor_centers(e, one_hot(assignment, k));
}

Matrix class_neighbor_centers(const Matrix& e, const Matrix& responsibilities) {
  if (responsibilities.rows() != e.rows()) {
    throw InputError("class_neighbor_centers: responsibility rows mismatch");
  }
  const auto k = responsibilities.cols();
  Matrix pi = responsibilities.transpose() * e;
  const Vector mass = responsibilities.colwise().sum().transpose();
  for (Eigen::Index c = 0; c < k; ++c) {
    if (mass(c) > 0.0) {
      pi.row(c) /= mass(c);
    } else {
      pi.row(c).setConstant(1.0 / static_cast<double>(e.cols()));
      log::warn("class_neighbor_centers: cluster " + std::to_string(c) +
                " is empty; using a uniform center");
    }
  }
  return pi;
}

Matrix minmax_normalize_offdiag(const Matrix& sim) {
  const auto n = sim.rows();
  double lo = std::numeric_limits<double>::infinity();
  double hi = -std::numeric_limits<double>::infinity();
  for (Eigen::Index i = 0; i < n; ++i) {
    for (Eigen::Index j = 0; j < n; ++j) {
      if (i == j) continue;
      lo = std::min(lo, sim(i, j));
      hi = std::max(hi, sim(i, j));
    }
  }
  Matrix out = Matrix::Zero(n, n);
  const double range = hi - lo;
  if (!(range > 0.0)) return out;
  for (Eigen::Index i = 0; i < n; ++i) {
    for (Eigen::Index j = 0; j < n; ++j) {
      if (i != j) out(i, j) = (sim(i, j) - lo) / range;
    }
  }
  return out;
}

HardnessWeights hardness_from_gate(const Matrix& gate, const Matrix& z) {
  if (gate.rows() != z.rows() || gate.cols() != z.rows()) {
    throw InputError("hardness weights: gate must be N x N for N embeddings");
  }
  const Matrix norm = minmax_normalize_offdiag(cosine_similarity(z));
  HardnessWeights w;
  w.m = (gate - norm).cwiseAbs();
  w.m.diagonal().setOnes();
  return w;
}

HardnessWeights hardness_weights(const Matrix& e, const Matrix& z,
                                 double tau) {
  if (!(tau > 0.0 && tau < 1.0)) {
    throw ConfigError("hardness_weights: tau must lie in (0, 1)");
  }
  if (e.rows() != z.rows()) {
    throw InputError("hardness_weights: e and z row counts differ");
  }
  const Vector norms = e.rowwise().norm();
  const auto zero_rows = (norms.array() <= 0.0).count();
  if (zero_rows > 0) {
    log::warn("hardness_weights: " + std::to_string(zero_rows) +
              " zero-norm neighbor distributions; their similarity is 0");
  }
  const Matrix cos = cosine_similarity(e);
  const Matrix gate = (cos.array() > tau).cast<double>().matrix();
  return hardness_from_gate(gate, z);
}

HardnessWeights pseudo_label_weights(const Labels& labels, const Matrix& z) {
  const auto n = static_cast<Eigen::Index>(labels.size());
  Matrix gate(n, n);
  for (Eigen::Index i = 0; i < n; ++i) {
    for (Eigen::Index j = 0; j < n; ++j) {
      gate(i, j) = labels[static_cast<std::size_t>(i)] ==
                           labels[static_cast<std::size_t>(j)]
                       ? 1.0
                       : 0.0;
    }
  }
  return hardness_from_gate(gate, z);
}

HardnessWeights uniform_weights(Eigen::Index n) {
  return HardnessWeights{Matrix::Ones(n, n)};
}

}  // namespace dcgc
