#include "calr/graphcluster/knn_graph.hpp"

#include "calr/core/error.hpp"
#include "calr/core/numeric.hpp"

#include <algorithm>
#include <cmath>
#include <set>
#include <string>

namespace calr::graph {

void Graph::validate() const {
  std::set<std::pair<std::size_t, std::size_t>> seen;
  for (const auto& e : edges) {
    if (e.i == e.j) throw InvalidArgument("graph: self-edge on node " + std::to_string(e.i));
    if (e.i >= n_nodes || e.j >= n_nodes) {
      throw InvalidArgument("graph: edge (" + std::to_string(e.i) + ", " + std::to_string(e.j) +
                            ") outside " + std::to_string(n_nodes) + " nodes");
    }
    if (!std::isfinite(e.weight)) throw InvalidArgument("graph: non-finite edge weight");
    const auto key = std::minmax(e.i, e.j);
    if (!seen.insert(key).second) {
      throw InvalidArgument("graph: duplicate edge (" + std::to_string(key.first) + ", " +
                            std::to_string(key.second) + ")");
    }
  }
}

std::vector<double> Graph::degrees() const {
  std::vector<double> d(n_nodes, 0.0);
  for (const auto& e : edges) {
    if (e.weight <= 0.0) continue;
    d[e.i] += e.weight;
    d[e.j] += e.weight;
  }
  return d;
}

std::vector<std::pair<std::size_t, double>> top_k_neighbors(const Matrix& features, std::size_t row,
                                                            int k) {
  const auto n = static_cast<std::size_t>(features.rows());
  std::vector<std::pair<std::size_t, double>> cand;
  cand.reserve(n - 1);
  const auto r = static_cast<Eigen::Index>(row);
  for (std::size_t j = 0; j < n; ++j) {
    if (j == row) continue;
    const double sim = std::clamp(features.row(r).dot(features.row(static_cast<Eigen::Index>(j))), -1.0, 1.0);
    cand.emplace_back(j, sim);
  }
  const auto kk = std::min<std::size_t>(static_cast<std::size_t>(k), cand.size());
  auto better = [](const auto& a, const auto& b) {
    return a.second != b.second ? a.second > b.second : a.first < b.first;
  };
  std::partial_sort(cand.begin(), cand.begin() + static_cast<long>(kk), cand.end(), better);
  cand.resize(kk);
  return cand;
}

KnnGraph build_knn_graph(const Matrix& features, const KnnOptions& options, int threads) {
  const auto n = static_cast<std::size_t>(features.rows());
  if (options.k <= 0 || static_cast<std::size_t>(options.k) >= n) {
    throw InvalidArgument("build_knn_graph: need 0 < k < N, got k=" + std::to_string(options.k) +
                          ", N=" + std::to_string(n));
  }
  std::vector<std::vector<std::pair<std::size_t, double>>> lists(n);
  parallel_for(n, threads, [&](std::size_t i) {
    auto nn = top_k_neighbors(features, i, options.k);
    std::erase_if(nn, [&](const auto& p) { return p.second < options.sim_threshold; });
    std::sort(nn.begin(), nn.end());
    lists[i] = std::move(nn);
  });

  auto lists_contains = [&](std::size_t a, std::size_t b) {
    const auto& l = lists[a];
    const auto it = std::lower_bound(l.begin(), l.end(), std::make_pair(b, -2.0));
    return it != l.end() && it->first == b;
  };

  KnnGraph out{Graph{n, {}}, options};
  for (std::size_t i = 0; i < n; ++i) {
    for (const auto& [j, sim] : lists[i]) {
      const bool reverse = lists_contains(j, i);
      if (options.mutual && !reverse) continue;
      // Emit each undirected edge once: from its lower endpoint, or from the
      // only endpoint that lists it.
      if (reverse && j < i) continue;
      out.graph.edges.push_back(Edge{std::min(i, j), std::max(i, j), sim});
    }
  }
  std::sort(out.graph.edges.begin(), out.graph.edges.end(),
            [](const Edge& a, const Edge& b) { return a.i != b.i ? a.i < b.i : a.j < b.j; });
  return out;
}

}  // namespace calr::graph
