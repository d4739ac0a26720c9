#pragma once

#include "calr/core/types.hpp"

#include <optional>
#include <span>

namespace calr::eval {

/// Pairwise clustering quality against ground-truth ids. Pairs are counted
/// over non-outlier samples only. Precision is empty when no two samples share
/// a cluster, recall when no two share an id.
struct ClusterQuality {
  std::optional<double> pair_precision;
  std::optional<double> pair_recall;
  double f_score = 0.0;  ///< 2PR/(P+R), 0 when undefined
  /// Mean over ids of the number of clusters holding that id, each outlier
  /// sample counting as its own cluster.
  double expansion = 0.0;
};

[[nodiscard]] ClusterQuality cluster_quality(const ClusterAssignment& assignment,
                                             std::span<const int> gt_ids);

}  // namespace calr::eval
