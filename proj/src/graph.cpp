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

#include "dcgc/graph.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <iomanip>
#include <random>
#include <sstream>
#include <string_view>

namespace dcgc {
namespace {

std::string where(const std::filesystem::path& path, std::size_t line) {
  return path.string() + ":" + std::to_string(line) + ": ";
}

std::string_view trim(std::string_view s) {
  const auto first = s.find_first_not_of(" \t\r\n");
  if (first == std::string_view::npos) return {};
  const auto last = s.find_last_not_of(" \t\r\n");
  return s.substr(first, last - first + 1);
}

std::ifstream open_input(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw InputError("cannot open " + path.string());
  return in;
}

std::ofstream open_output(const std::filesystem::path& path) {
  std::ofstream out(path);
  if (!out) throw InputError("cannot write " + path.string());
  return out;
}

template <typename T>
bool parse_number(std::string_view token, T& value) {
  token = trim(token);
  if (token.empty()) return false;
  if (token.front() == '+') token.remove_prefix(1);
  const char* end = token.data() + token.size();
  auto [ptr, ec] = std::from_chars(token.data(), end, value);
  return ec == std::errc() && ptr == end;
}

}  // namespace

std::vector<Edge> Graph::edge_list() const {
  std::vector<Edge> edges;
  edges.reserve(static_cast<std::size_t>(num_edges()));
  for (int u = 0; u < adjacency.outerSize(); ++u) {
    for (SparseMatrix::InnerIterator it(adjacency, u); it; ++it) {
      if (u < it.col()) edges.emplace_back(u, static_cast<int>(it.col()));
    }
  }
  return edges;
}

Graph make_graph(Matrix attributes, const std::vector<Edge>& edges,
                 std::optional<Labels> labels, int num_classes) {
  const auto n = static_cast<int>(attributes.rows());
  if (!attributes.allFinite()) {
    throw InputError("graph: attributes contain non-finite values");
  }
  std::vector<Eigen::Triplet<double>> triplets;
  triplets.reserve(edges.size() * 2);
  for (const auto& [u, v] : edges) {
    if (u < 0 || v < 0 || u >= n || v >= n) {
      throw InputError("graph: edge (" + std::to_string(u) + ", " +
                       std::to_string(v) + ") references a node outside [0, " +
                       std::to_string(n) + ")");
    }
    if (u == v) continue;
    triplets.emplace_back(u, v, 1.0);
    triplets.emplace_back(v, u, 1.0);
  }
  SparseMatrix adj(n, n);
  // Duplicates collapse to a single unit entry.
  adj.setFromTriplets(triplets.begin(), triplets.end(),
                      [](double, double) { return 1.0; });
  adj.makeCompressed();

  Graph g;
  g.attributes = std::move(attributes);
  g.adjacency = std::move(adj);
  if (labels) {
    if (static_cast<int>(labels->size()) != n) {
      throw InputError("graph: " + std::to_string(labels->size()) +
                       " labels for " + std::to_string(n) + " nodes");
    }
    int max_label = -1;
    for (std::size_t i = 0; i < labels->size(); ++i) {
      if ((*labels)[i] < 0) {
        throw InputError("graph: negative label at node " + std::to_string(i));
      }
      max_label = std::max(max_label, (*labels)[i]);
    }
    if (num_classes == 0) num_classes = max_label + 1;
    if (max_label >= num_classes) {
      throw InputError("graph: label " + std::to_string(max_label) +
                       " exceeds stated class count " +
                       std::to_string(num_classes));
    }
    g.labels = std::move(labels);
    g.num_classes = num_classes;
  }
  return g;
}

Matrix read_attributes(const std::filesystem::path& path) {
  auto in = open_input(path);
  std::vector<std::vector<double>> rows;
  std::string line;
  std::size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    std::string_view view = trim(line);
    if (view.empty()) continue;
    std::vector<double> row;
    std::size_t start = 0;
    while (true) {
      const auto comma = view.find(',', start);
      const auto token = view.substr(
          start, comma == std::string_view::npos ? view.npos : comma - start);
      double value = 0.0;
      if (!parse_number(token, value) || !std::isfinite(value)) {
        throw InputError(where(path, lineno) + "bad attribute value '" +
                         std::string(trim(token)) + "'");
      }
      row.push_back(value);
      if (comma == std::string_view::npos) break;
      start = comma + 1;
    }
    if (!rows.empty() && row.size() != rows.front().size()) {
      throw InputError(where(path, lineno) + "ragged attribute row: " +
                       std::to_string(row.size()) + " values, expected " +
                       std::to_string(rows.front().size()));
    }
    rows.push_back(std::move(row));
  }
  const auto cols = rows.empty() ? 0 : rows.front().size();
  Matrix x(static_cast<Eigen::Index>(rows.size()),
           static_cast<Eigen::Index>(cols));
  for (std::size_t i = 0; i < rows.size(); ++i) {
    for (std::size_t j = 0; j < cols; ++j) {
      x(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) =
          rows[i][j];
    }
  }
  return x;
}

std::vector<Edge> read_edges(const std::filesystem::path& path,
                             std::optional<int> num_nodes) {
  auto in = open_input(path);
  std::vector<Edge> edges;
  std::string line;
  std::size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    std::string_view view = trim(line);
    if (view.empty() || view.front() == '#') continue;
    std::istringstream fields{std::string(view)};
    std::string a, b, extra;
    fields >> a >> b;
    int u = 0, v = 0;
    if (!parse_number(a, u) || !parse_number(b, v) || (fields >> extra)) {
      throw InputError(where(path, lineno) + "expected two integer node ids");
    }
    if (u < 0 || v < 0) {
      throw InputError(where(path, lineno) + "negative node id");
    }
    if (num_nodes && (u >= *num_nodes || v >= *num_nodes)) {
      throw InputError(where(path, lineno) + "node id outside [0, " +
                       std::to_string(*num_nodes) + ")");
    }
    edges.emplace_back(u, v);
  }
  return edges;
}

Labels read_labels(const std::filesystem::path& path) {
  auto in = open_input(path);
  Labels labels;
  std::string line;
  std::size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    std::string_view view = trim(line);
    if (view.empty()) continue;
    int value = 0;
    if (!parse_number(view, value) || value < 0) {
      throw InputError(where(path, lineno) + "bad label '" +
                       std::string(view) + "'");
    }
    labels.push_back(value);
  }
  return labels;
}

Graph load_graph(const std::filesystem::path& attr_path,
                 const std::filesystem::path& edge_path,
                 const std::optional<std::filesystem::path>& label_path) {
  Matrix x = read_attributes(attr_path);
  const auto edges = read_edges(edge_path, static_cast<int>(x.rows()));
  std::optional<Labels> labels;
  if (label_path) labels = read_labels(*label_path);
  return make_graph(std::move(x), edges, std::move(labels));
}

void write_attributes(const std::filesystem::path& path, const Matrix& x) {
  auto out = open_output(path);
  out << std::setprecision(17);
  for (Eigen::Index i = 0; i < x.rows(); ++i) {
    for (Eigen::Index j = 0; j < x.cols(); ++j) {
      if (j) out << ',';
      out << x(i, j);
    }
    out << '\n';
  }
}

void write_edges(const std::filesystem::path& path, const Graph& g) {
  auto out = open_output(path);
  for (const auto& [u, v] : g.edge_list()) out << u << ' ' << v << '\n';
}

void write_labels(const std::filesystem::path& path, const Labels& labels) {
  auto out = open_output(path);
  for (int l : labels) out << l << '\n';
}

SparseMatrix normalized_laplacian(const Graph& g) {
  const int n = g.num_nodes();
  Vector inv_sqrt_deg(n);
  for (int i = 0; i < n; ++i) {
    const double deg = 1.0 + g.adjacency.row(i).sum();
    inv_sqrt_deg(i) = 1.0 / std::sqrt(deg);
  }
  std::vector<Eigen::Triplet<double>> triplets;
  triplets.reserve(static_cast<std::size_t>(g.adjacency.nonZeros() + n));
  for (int i = 0; i < n; ++i) {
    // Diagonal: 1 - 1/deg_i from the added self-loop.
    triplets.emplace_back(i, i, 1.0 - inv_sqrt_deg(i) * inv_sqrt_deg(i));
    for (SparseMatrix::InnerIterator it(g.adjacency, i); it; ++it) {
      const auto j = static_cast<int>(it.col());
      triplets.emplace_back(i, j,
                            -it.value() * inv_sqrt_deg(i) * inv_sqrt_deg(j));
    }
  }
  SparseMatrix lap(n, n);
  lap.setFromTriplets(triplets.begin(), triplets.end());
  lap.prune(0.0);
  lap.makeCompressed();
  return lap;
}

double homophily_ratio(const Graph& g, const Labels& labels) {
  if (static_cast<int>(labels.size()) != g.num_nodes()) {
    throw InputError("homophily_ratio: labels must cover all " +
                     std::to_string(g.num_nodes()) + " nodes");
  }
  std::int64_t same = 0, total = 0;
  for (const auto& [u, v] : g.edge_list()) {
    ++total;
    if (labels[static_cast<std::size_t>(u)] ==
        labels[static_cast<std::size_t>(v)]) {
      ++same;
    }
  }
  return total == 0 ? 1.0 : static_cast<double>(same) / total;
}

double homophily_ratio(const Graph& g) {
  if (!g.labels) throw InputError("homophily_ratio: graph has no labels");
  return homophily_ratio(g, *g.labels);
}

void validate(const SbmSpec& spec) {
  if (spec.block_sizes.empty()) throw ConfigError("sbm: no blocks");
  for (int b : spec.block_sizes) {
    if (b <= 0) throw ConfigError("sbm: block sizes must be positive");
  }
  auto prob = [](double p) { return p >= 0.0 && p <= 1.0; };
  if (!prob(spec.p_in) || !prob(spec.p_out)) {
    throw ConfigError("sbm: probabilities must lie in [0, 1]");
  }
  if (spec.attribute_dim <= 0) throw ConfigError("sbm: attribute_dim <= 0");
  if (!(spec.attribute_separation >= 0.0) || !(spec.noise_std >= 0.0)) {
    throw ConfigError("sbm: separation and noise_std must be nonnegative");
  }
}

Graph generate_sbm(const SbmSpec& spec, std::uint64_t seed) {
  validate(spec);
  std::mt19937_64 rng(seed);
  Labels labels;
  for (std::size_t b = 0; b < spec.block_sizes.size(); ++b) {
    labels.insert(labels.end(), static_cast<std::size_t>(spec.block_sizes[b]),
                  static_cast<int>(b));
  }
  const auto n = static_cast<int>(labels.size());

  std::bernoulli_distribution in_edge(spec.p_in), out_edge(spec.p_out);
  std::vector<Edge> edges;
  for (int u = 0; u < n; ++u) {
    for (int v = u + 1; v < n; ++v) {
      const bool same = labels[static_cast<std::size_t>(u)] ==
                        labels[static_cast<std::size_t>(v)];
      if (same ? in_edge(rng) : out_edge(rng)) edges.emplace_back(u, v);
    }
  }

  std::normal_distribution<double> noise(0.0, 1.0);
  Matrix x(n, spec.attribute_dim);
  for (int i = 0; i < n; ++i) {
    for (int j = 0; j < spec.attribute_dim; ++j) {
      x(i, j) = spec.noise_std * noise(rng);
    }
    x(i, labels[static_cast<std::size_t>(i)] % spec.attribute_dim) +=
        spec.attribute_separation;
  }
  const auto k = static_cast<int>(spec.block_sizes.size());
  return make_graph(std::move(x), edges, std::move(labels), k);
}

}  // namespace dcgc
