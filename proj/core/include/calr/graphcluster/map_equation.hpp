#pragma once

#include "calr/graphcluster/knn_graph.hpp"

#include <span>
#include <vector>

namespace calr::graph {

/// Two-level partition of graph nodes into modules.
struct Partition {
  std::vector<int> module_of;  ///< contiguous module ids
  double codelength = 0.0;     ///< bits, equals map_equation(graph, module_of)
};

/// Two-level map equation L(M) = q*H(Q) + sum_m p_m*H(P_m), in bits, for an
/// undirected weighted random walk whose node visit rates are proportional to
/// weighted degree. Non-positive edges carry no flow. A graph with no positive
/// edge weight has codelength 0. Throws on an empty graph or a partition that
/// does not cover every node.
[[nodiscard]] double map_equation(const Graph& graph, std::span<const int> module_of);

}  // namespace calr::graph
