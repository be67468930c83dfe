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

#include "dcgc/clusteval.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <random>
#include <set>
#include <string>

namespace dcgc {
namespace {

Matrix squared_distances(const Matrix& x, const Matrix& c) {
  Matrix d2 = -2.0 * x * c.transpose();
  d2.colwise() += x.rowwise().squaredNorm();
  d2.rowwise() += c.rowwise().squaredNorm().transpose();
  return d2.cwiseMax(0.0);
}

Matrix plus_plus_seeds(const Matrix& x, int k, std::mt19937_64& rng) {
  const auto n = x.rows();
  Matrix centers(k, x.cols());
  std::uniform_int_distribution<Eigen::Index> pick(0, n - 1);
  centers.row(0) = x.row(pick(rng));
  Vector closest = (x.rowwise() - centers.row(0)).rowwise().squaredNorm();
  for (int c = 1; c < k; ++c) {
    const double total = closest.sum();
    Eigen::Index chosen = 0;
    if (total > 0.0) {
      std::uniform_real_distribution<double> u(0.0, total);
      double r = u(rng);
      chosen = n - 1;
      for (Eigen::Index i = 0; i < n; ++i) {
        r -= closest(i);
        if (r < 0.0) {
          chosen = i;
          break;
        }
      }
    } else {
      chosen = pick(rng);
    }
    centers.row(c) = x.row(chosen);
    closest = closest.cwiseMin(
        (x.rowwise() - centers.row(c)).rowwise().squaredNorm());
  }
  return centers;
}

double exact_inertia(const Matrix& x, const Matrix& centers,
                     const Labels& labels) {
  double total = 0.0;
  for (Eigen::Index i = 0; i < x.rows(); ++i) {
    total += (x.row(i) - centers.row(labels[static_cast<std::size_t>(i)]))
                 .squaredNorm();
  }
  return total;
}

KmeansResult lloyd(const Matrix& x, Matrix centers, int max_iter) {
  const auto n = x.rows();
  const auto k = centers.rows();
  KmeansResult r;
  r.labels.assign(static_cast<std::size_t>(n), -1);
  for (int iter = 0; iter < max_iter; ++iter) {
    const Matrix d2 = squared_distances(x, centers);
    bool changed = false;
    for (Eigen::Index i = 0; i < n; ++i) {
      Eigen::Index best = 0;
      for (Eigen::Index c = 1; c < k; ++c) {
        if (d2(i, c) < d2(i, best)) best = c;
      }
      auto& li = r.labels[static_cast<std::size_t>(i)];
      if (li != best) {
        li = static_cast<int>(best);
        changed = true;
      }
    }
    r.inertia_history.push_back(exact_inertia(x, centers, r.labels));
    r.iterations = iter + 1;
    if (!changed) break;
    // Empty clusters keep their previous center.
    Matrix sums = Matrix::Zero(k, x.cols());
    Vector counts = Vector::Zero(k);
    for (Eigen::Index i = 0; i < n; ++i) {
      const int l = r.labels[static_cast<std::size_t>(i)];
      sums.row(l) += x.row(i);
      counts(l) += 1.0;
    }
    for (Eigen::Index c = 0; c < k; ++c) {
      if (counts(c) > 0.0) centers.row(c) = sums.row(c) / counts(c);
    }
  }
  r.centers = std::move(centers);
  r.inertia = exact_inertia(x, r.centers, r.labels);
  return r;
}

int label_range(const Labels& labels) {
  int hi = -1;
  for (std::size_t i = 0; i < labels.size(); ++i) {
    if (labels[i] < 0) {
      throw InputError("metrics: negative label at index " + std::to_string(i));
    }
    hi = std::max(hi, labels[i]);
  }
  return hi + 1;
}

void check_pair(const Labels& pred, const Labels& truth) {
  if (pred.size() != truth.size()) {
    throw InputError("metrics: " + std::to_string(pred.size()) +
                     " predictions for " + std::to_string(truth.size()) +
                     " ground-truth labels");
  }
  if (pred.empty()) throw InputError("metrics: empty label vectors");
}

double comb2(double x) { return x * (x - 1.0) / 2.0; }

}  // namespace

KmeansResult kmeans(const Matrix& points, int k, std::uint64_t seed,
                    const KmeansOptions& options) {
  if (k < 1) throw InputError("kmeans: k must be >= 1");
  if (k > points.rows()) {
    throw InputError("kmeans: k = " + std::to_string(k) + " exceeds N = " +
                     std::to_string(points.rows()));
  }
  if (options.n_init < 1 || options.max_iter < 1) {
    throw ConfigError("kmeans: n_init and max_iter must be >= 1");
  }
  if (!points.allFinite()) throw NumericError("kmeans: non-finite points");
  KmeansResult best;
  bool have = false;
  for (int run = 0; run < options.n_init; ++run) {
    std::seed_seq seq{seed, static_cast<std::uint64_t>(run)};
    std::mt19937_64 rng(seq);
    KmeansResult r =
        lloyd(points, plus_plus_seeds(points, k, rng), options.max_iter);
    if (!have || r.inertia < best.inertia) {
      best = std::move(r);
      have = true;
    }
  }
  return best;
}

std::vector<int> hungarian_min_cost(const Matrix& cost) {
  if (cost.rows() != cost.cols()) {
    throw InputError("hungarian: cost matrix must be square");
  }
  const auto n = static_cast<int>(cost.rows());
  constexpr double inf = std::numeric_limits<double>::infinity();
  // Potentials (u, v) and 1-based column -> row matching p.
  std::vector<double> u(n + 1, 0.0), v(n + 1, 0.0);
  std::vector<int> p(n + 1, 0), way(n + 1, 0);
  for (int i = 1; i <= n; ++i) {
    p[0] = i;
    int j0 = 0;
    std::vector<double> minv(n + 1, inf);
    std::vector<char> used(n + 1, 0);
    do {
      used[j0] = 1;
      const int i0 = p[j0];
      double delta = inf;
      int j1 = 0;
      for (int j = 1; j <= n; ++j) {
        if (used[j]) continue;
        const double cur = cost(i0 - 1, j - 1) - u[i0] - v[j];
        if (cur < minv[j]) {
          minv[j] = cur;
          way[j] = j0;
        }
        if (minv[j] < delta) {
          delta = minv[j];
          j1 = j;
        }
      }
      for (int j = 0; j <= n; ++j) {
        if (used[j]) {
          u[p[j]] += delta;
          v[j] -= delta;
        } else {
          minv[j] -= delta;
        }
      }
      j0 = j1;
    } while (p[j0] != 0);
    do {
      const int j1 = way[j0];
      p[j0] = p[j1];
      j0 = j1;
    } while (j0 != 0);
  }
  std::vector<int> assignment(static_cast<std::size_t>(n), -1);
  for (int j = 1; j <= n; ++j) {
    if (p[j] > 0) assignment[static_cast<std::size_t>(p[j] - 1)] = j - 1;
  }
  return assignment;
}

Matrix confusion_matrix(const Labels& pred, const Labels& truth) {
  check_pair(pred, truth);
  const int side = std::max(label_range(pred), label_range(truth));
  Matrix counts = Matrix::Zero(side, side);
  for (std::size_t i = 0; i < pred.size(); ++i) counts(pred[i], truth[i]) += 1;
  return counts;
}

std::vector<int> best_label_mapping(const Labels& pred, const Labels& truth) {
  const Matrix counts = confusion_matrix(pred, truth);
  const auto side = counts.rows();
  const Vector row = counts.rowwise().sum();
  const Vector col = counts.colwise().sum().transpose();
  // Counts are integers and the F1 term sums to less than one, so the second
  // term only breaks ties between accuracy-optimal matchings.
  const double weight = 1.0 / static_cast<double>(side + 1);
  Matrix gain = counts;
  for (Eigen::Index i = 0; i < side; ++i) {
    for (Eigen::Index j = 0; j < side; ++j) {
      const double denom = row(i) + col(j);
      if (denom > 0.0) gain(i, j) += weight * 2.0 * counts(i, j) / denom;
    }
  }
  return hungarian_min_cost(-gain);
}

double clustering_accuracy(const Labels& pred, const Labels& truth) {
  const Matrix counts = confusion_matrix(pred, truth);
  const auto mapping = hungarian_min_cost(-counts);
  double matched = 0.0;
  for (std::size_t p = 0; p < mapping.size(); ++p) {
    matched += counts(static_cast<Eigen::Index>(p), mapping[p]);
  }
  return matched / static_cast<double>(pred.size());
}

double normalized_mutual_info(const Labels& pred, const Labels& truth) {
  const Matrix counts = confusion_matrix(pred, truth);
  const double n = static_cast<double>(pred.size());
  const Vector row = counts.rowwise().sum();
  const Vector col = counts.colwise().sum().transpose();
  auto entropy = [n](const Vector& c) {
    double h = 0.0;
    for (Eigen::Index i = 0; i < c.size(); ++i) {
      if (c(i) > 0.0) h -= (c(i) / n) * std::log(c(i) / n);
    }
    return h;
  };
  double mi = 0.0;
  for (Eigen::Index i = 0; i < counts.rows(); ++i) {
    for (Eigen::Index j = 0; j < counts.cols(); ++j) {
      const double c = counts(i, j);
      if (c > 0.0) mi += (c / n) * std::log(c * n / (row(i) * col(j)));
    }
  }
  const double h_pred = entropy(row), h_truth = entropy(col);
  if (h_pred == 0.0 && h_truth == 0.0) return 1.0;
  const double denom = 0.5 * (h_pred + h_truth);
  return std::clamp(mi / denom, 0.0, 1.0);
}

double adjusted_rand_index(const Labels& pred, const Labels& truth) {
  const Matrix counts = confusion_matrix(pred, truth);
  const double n = static_cast<double>(pred.size());
  double index = 0.0;
  for (Eigen::Index i = 0; i < counts.size(); ++i) {
    index += comb2(counts.data()[i]);
  }
  double sum_rows = 0.0, sum_cols = 0.0;
  const Vector row = counts.rowwise().sum();
  const Vector col = counts.colwise().sum().transpose();
  for (Eigen::Index i = 0; i < row.size(); ++i) sum_rows += comb2(row(i));
  for (Eigen::Index j = 0; j < col.size(); ++j) sum_cols += comb2(col(j));
  if (comb2(n) == 0.0) return 1.0;
  const double expected = sum_rows * sum_cols / comb2(n);
  const double max_index = 0.5 * (sum_rows + sum_cols);
  if (max_index == expected) return 1.0;
  return (index - expected) / (max_index - expected);
}

double macro_f1(const Labels& pred, const Labels& truth) {
  check_pair(pred, truth);
  const auto mapping = best_label_mapping(pred, truth);
  Labels mapped(pred.size());
  for (std::size_t i = 0; i < pred.size(); ++i) {
    mapped[i] = mapping[static_cast<std::size_t>(pred[i])];
  }
  // Classes appearing in either the truth or the mapped predictions.
  std::set<int> classes(truth.begin(), truth.end());
  classes.insert(mapped.begin(), mapped.end());
  double total = 0.0;
  for (int c : classes) {
    double tp = 0.0, fp = 0.0, fn = 0.0;
    for (std::size_t i = 0; i < truth.size(); ++i) {
      const bool p = mapped[i] == c, t = truth[i] == c;
      tp += (p && t) ? 1.0 : 0.0;
      fp += (p && !t) ? 1.0 : 0.0;
      fn += (!p && t) ? 1.0 : 0.0;
    }
    const double denom = 2.0 * tp + fp + fn;
    total += denom > 0.0 ? 2.0 * tp / denom : 0.0;
  }
  return total / static_cast<double>(classes.size());
}

MetricReport clustering_metrics(const Labels& pred, const Labels& truth) {
  MetricReport r;
  r.acc = clustering_accuracy(pred, truth);
  r.nmi = normalized_mutual_info(pred, truth);
  r.ari = adjusted_rand_index(pred, truth);
  r.f1 = macro_f1(pred, truth);
  return r;
}

}  // namespace dcgc
