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

#ifndef DCGC_GRAPH_HPP_
#define DCGC_GRAPH_HPP_

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "dcgc/numeric.hpp"

namespace dcgc {

using Edge = std::pair<int, int>;

// Attributed undirected graph. Adjacency is binary, symmetric, and has an
// empty diagonal. Isolated nodes are allowed.
struct Graph {
  Matrix attributes;               // N x D
  SparseMatrix adjacency;          // N x N
  std::optional<Labels> labels;    // length N, values in [0, num_classes)
  int num_classes = 0;             // 0 when labels are absent

  int num_nodes() const { return static_cast<int>(attributes.rows()); }
  std::int64_t num_edges() const { return adjacency.nonZeros() / 2; }

  // Undirected edges (u < v), sorted.
  std::vector<Edge> edge_list() const;
};

// Builds a Graph from raw pieces: symmetrizes, drops self-loops, collapses
// duplicates. Throws InputError on out-of-range ids or bad labels.
Graph make_graph(Matrix attributes, const std::vector<Edge>& edges,
                 std::optional<Labels> labels = std::nullopt,
                 int num_classes = 0);

// Files:
//   edges       one "u v" pair of 0-based ids per line, '#' lines ignored
//   attributes  CSV, one row of D reals per node
//   labels      one integer per line
Graph load_graph(const std::filesystem::path& attr_path,
                 const std::filesystem::path& edge_path,
                 const std::optional<std::filesystem::path>& label_path =
                     std::nullopt);

Matrix read_attributes(const std::filesystem::path& path);
// With `num_nodes`, ids outside [0, num_nodes) are rejected with the line.
std::vector<Edge> read_edges(const std::filesystem::path& path,
                             std::optional<int> num_nodes = std::nullopt);
Labels read_labels(const std::filesystem::path& path);

void write_attributes(const std::filesystem::path& path, const Matrix& x);
void write_edges(const std::filesystem::path& path, const Graph& g);
void write_labels(const std::filesystem::path& path, const Labels& labels);

// I - D^-1/2 (A + I) D^-1/2 with D the degree matrix of A + I.
SparseMatrix normalized_laplacian(const Graph& g);

// Fraction of undirected edges whose endpoints share a label. Graphs
// without edges report 1.
double homophily_ratio(const Graph& g, const Labels& labels);
double homophily_ratio(const Graph& g);

struct SbmSpec {
  std::vector<int> block_sizes;
  double p_in = 0.5;
  double p_out = 0.02;
  int attribute_dim = 16;
  // Block b has attribute mean separation * e_(b mod attribute_dim).
  double attribute_separation = 4.0;
  double noise_std = 1.0;
};

void validate(const SbmSpec& spec);

// Seeded stochastic block model with Gaussian block attributes. Labels are
// block ids. Identical (spec, seed) produce identical graphs.
Graph generate_sbm(const SbmSpec& spec, std::uint64_t seed);

}  // namespace dcgc

#endif  // DCGC_GRAPH_HPP_
