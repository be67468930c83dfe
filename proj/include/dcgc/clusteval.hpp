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

#ifndef DCGC_CLUSTEVAL_HPP_
#define DCGC_CLUSTEVAL_HPP_

#include <cstdint>
#include <vector>

#include "dcgc/numeric.hpp"

namespace dcgc {

struct KmeansResult {
  Labels labels;
  Matrix centers;
  double inertia = 0.0;
  int iterations = 0;
  // Inertia after each assignment step of the winning restart.
  std::vector<double> inertia_history;
};

struct KmeansOptions {
  int n_init = 10;
  int max_iter = 300;
};

// Best of n_init Lloyd runs (k-means++ seeding) by inertia; ties go to the
// earlier restart. Assignment ties go to the lowest center index.
KmeansResult kmeans(const Matrix& points, int k, std::uint64_t seed,
                    const KmeansOptions& options = {});

// Minimum-cost perfect matching on a square cost matrix. Returns, for each
// row, its assigned column.
std::vector<int> hungarian_min_cost(const Matrix& cost);

struct MetricReport {
  double acc = 0.0;
  double nmi = 0.0;
  double ari = 0.0;
  double f1 = 0.0;
};

// counts(p, t) = number of nodes with pred p and truth t. Padded to a
// square matrix of side max(#pred ids, #truth ids).
Matrix confusion_matrix(const Labels& pred, const Labels& truth);

// pred id -> truth id under the matching that maximizes agreement. Ties
// go to the matching with the larger summed per-class F1.
std::vector<int> best_label_mapping(const Labels& pred, const Labels& truth);

double clustering_accuracy(const Labels& pred, const Labels& truth);
double normalized_mutual_info(const Labels& pred, const Labels& truth);
double adjusted_rand_index(const Labels& pred, const Labels& truth);
double macro_f1(const Labels& pred, const Labels& truth);

MetricReport clustering_metrics(const Labels& pred, const Labels& truth);

}  // namespace dcgc

#endif  // DCGC_CLUSTEVAL_HPP_
