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

#include "dcgc/numeric.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <iostream>
#include <mutex>
#include <sstream>

namespace dcgc {
namespace log {
namespace {

std::mutex sink_mutex;
Sink current_sink = [](std::string_view msg) {
  std::cerr << "warning: " << msg << '\n';
};
std::atomic<std::size_t> counter{0};

}  // namespace

void set_sink(Sink sink) {
  std::lock_guard<std::mutex> lock(sink_mutex);
  current_sink = std::move(sink);
}

void warn(std::string_view message) {
  ++counter;
  std::lock_guard<std::mutex> lock(sink_mutex);
  if (current_sink) current_sink(message);
}

std::size_t warning_count() { return counter.load(); }

}  // namespace log

Matrix one_hot(const Labels& labels, int k) {
  Matrix out = Matrix::Zero(static_cast<Eigen::Index>(labels.size()), k);
  for (std::size_t i = 0; i < labels.size(); ++i) {
    if (labels[i] < 0 || labels[i] >= k) {
      throw InputError("one_hot: label " + std::to_string(labels[i]) +
                       " at index " + std::to_string(i) +
                       " outside [0, " + std::to_string(k) + ")");
    }
    out(static_cast<Eigen::Index>(i), labels[i]) = 1.0;
  }
  return out;
}

Labels row_argmax(const Matrix& m) {
  Labels out(static_cast<std::size_t>(m.rows()));
  for (Eigen::Index i = 0; i < m.rows(); ++i) {
    Eigen::Index best = 0;
    for (Eigen::Index j = 1; j < m.cols(); ++j) {
      if (m(i, j) > m(i, best)) best = j;
    }
    out[static_cast<std::size_t>(i)] = static_cast<int>(best);
  }
  return out;
}

Matrix cosine_similarity(const Matrix& rows) {
  Vector inv = rows.rowwise().norm();
  for (Eigen::Index i = 0; i < inv.size(); ++i) {
    inv(i) = inv(i) > 0.0 ? 1.0 / inv(i) : 0.0;
  }
  Matrix unit = inv.asDiagonal() * rows;
  return unit * unit.transpose();
}

ParamList finite_diff_gradient(const ScalarFunction& loss_fn,
                               const ParamList& params, double eps) {
  if (!(eps > 0.0)) throw InputError("finite_diff_gradient: eps must be > 0");
  ParamList probe = params;
  ParamList grads;
  grads.reserve(params.size());
  for (std::size_t p = 0; p < params.size(); ++p) {
    Matrix g(params[p].rows(), params[p].cols());
    for (Eigen::Index r = 0; r < params[p].rows(); ++r) {
      for (Eigen::Index c = 0; c < params[p].cols(); ++c) {
        const double orig = params[p](r, c);
        probe[p](r, c) = orig + eps;
        const double up = loss_fn(probe);
        probe[p](r, c) = orig - eps;
        const double down = loss_fn(probe);
        probe[p](r, c) = orig;
        if (!std::isfinite(up) || !std::isfinite(down)) {
          std::ostringstream msg;
          msg << "finite_diff_gradient: non-finite loss probing parameter "
              << p << " entry (" << r << ", " << c << ")";
          throw NumericError(msg.str());
        }
        g(r, c) = (up - down) / (2.0 * eps);
      }
    }
    grads.push_back(std::move(g));
  }
  return grads;
}

double max_relative_error(const ParamList& a, const ParamList& b,
                          double floor) {
  if (a.size() != b.size()) {
    throw InputError("max_relative_error: parameter count mismatch");
  }
  double worst = 0.0;
  for (std::size_t p = 0; p < a.size(); ++p) {
    if (a[p].rows() != b[p].rows() || a[p].cols() != b[p].cols()) {
      throw InputError("max_relative_error: shape mismatch at parameter " +
                       std::to_string(p));
    }
    for (Eigen::Index i = 0; i < a[p].size(); ++i) {
      const double ref = b[p].data()[i];
      const double err = std::abs(a[p].data()[i] - ref) /
                         std::max(std::abs(ref), floor);
      worst = std::max(worst, err);
    }
  }
  return worst;
}

}  // namespace dcgc
