#pragma once

#include "calr/core/types.hpp"

#include <cstddef>
#include <utility>
#include <vector>

namespace calr::graph {

struct Edge {
  std::size_t i = 0;  ///< i < j
  std::size_t j = 0;
  double weight = 0.0;
  bool operator==(const Edge&) const = default;
};

/// Undirected weighted graph. Each edge is stored once with i < j.
struct Graph {
  std::size_t n_nodes = 0;
  std::vector<Edge> edges;

  /// Throws on self-edges, out-of-range endpoints, duplicate or non-finite edges.
  void validate() const;
  /// Weighted degree of every node, counting only positive weights.
  [[nodiscard]] std::vector<double> degrees() const;
};

struct KnnOptions {
  int k = 15;
  bool mutual = true;
  double sim_threshold = 0.5;
};

struct KnnGraph {
  Graph graph;
  KnnOptions options;
};

/// Top-k cosine neighbours of each unit-norm row (ties broken by lower index).
/// Row i lists j when sim(i, j) >= sim_threshold. The undirected edge {i, j}
/// is kept when either endpoint lists the other, or both when `mutual` is set.
/// Rows are processed on up to `threads` workers.
[[nodiscard]] KnnGraph build_knn_graph(const Matrix& features, const KnnOptions& options,
                                       int threads = 1);

/// The k most similar rows to `row` as (index, similarity), most similar first.
[[nodiscard]] std::vector<std::pair<std::size_t, double>> top_k_neighbors(const Matrix& features,
                                                                          std::size_t row, int k);

}  // namespace calr::graph
