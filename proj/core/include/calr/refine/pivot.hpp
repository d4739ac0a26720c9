#pragma once

#include "calr/core/types.hpp"

#include <cstdint>
#include <span>
#include <vector>

namespace calr::refine {

/// Centrality of one member of a global cluster.
struct PivotScore {
  std::int64_t sample_id = 0;
  double score = 0.0;
  bool is_pivot = false;
};

inline constexpr int kPivotNeighbors = 15;

/// Harmonic-centrality score of every member of one cluster:
///   score(i) = sum over the t nearest members j of 1 / (dist(i, j) + mean_dist)
/// where t = min(max_neighbors, m - 1) and mean_dist is the mean over all
/// unordered member pairs. Members scoring at least the mean score are pivots.
/// `distances` is the m x m distance matrix of the cluster members, aligned
/// with `sample_ids`. A single-member cluster yields one pivot with score 0.
/// If every distance is zero, every member is a pivot with score +inf.
[[nodiscard]] std::vector<PivotScore> pivot_scores(const Matrix& distances,
                                                   std::span<const std::int64_t> sample_ids,
                                                   int max_neighbors = kPivotNeighbors);

/// Convenience overload computing Euclidean distances between member rows.
[[nodiscard]] std::vector<PivotScore> pivot_scores_from_features(
    const Matrix& member_features, std::span<const std::int64_t> sample_ids,
    int max_neighbors = kPivotNeighbors);

}  // namespace calr::refine
