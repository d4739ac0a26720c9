#pragma once

#include "calr/core/rng.hpp"
#include "calr/core/types.hpp"
#include "calr/graphcluster/map_equation.hpp"

#include <vector>

namespace calr::graph {

struct InfomapOptions {
  /// Independent restarts (different node orders); the lowest codelength wins.
  int trials = 5;
  /// A move must lower the codelength by more than this to be accepted.
  double min_improvement = 1e-10;
  /// Modules smaller than this become kOutlier in the returned assignment.
  int min_cluster_size = 2;
  /// Record the codelength after every accepted move of the winning trial.
  bool record_trace = false;
};

struct InfomapResult {
  Partition partition;
  ClusterAssignment assignment;  ///< global scope, small modules -> kOutlier
  /// Codelength before the first move and after each accepted move (winning trial),
  /// only when InfomapOptions::record_trace is set.
  std::vector<double> trace;
  /// False if any accepted move failed to lower the tracked codelength.
  bool monotone = true;
  int trial = 0;
};

/// Two-level Infomap: greedy node moves that lower the map equation, module
/// aggregation into super-nodes, and repeated leaf-level fine tuning, until no
/// move improves the codelength by more than min_improvement.
[[nodiscard]] InfomapResult infomap_cluster(const Graph& graph, Rng& rng,
                                            const InfomapOptions& options = {});

}  // namespace calr::graph
