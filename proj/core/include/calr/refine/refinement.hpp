#pragma once

#include "calr/core/rng.hpp"
#include "calr/core/types.hpp"
#include "calr/refine/decay.hpp"
#include "calr/refine/pivot.hpp"

#include <map>
#include <optional>
#include <span>
#include <vector>

namespace calr::refine {

/// Verdict for the members of one global cluster seen by one camera.
struct CameraGroupDecision {
  CameraId camera = 0;
  /// Row of the pivot whose local cluster adjudicates this group; empty when
  /// the group has no pivot and is left untouched.
  std::optional<std::size_t> governor;
  std::vector<std::size_t> retained;
  std::vector<std::size_t> discarded;
};

struct ClusterRefinement {
  ClusterId cluster = 0;
  std::vector<std::size_t> kept;  ///< ascending rows
  std::vector<CameraGroupDecision> groups;  ///< ascending camera
  std::size_t n_pivots = 0;
};

/// Camera-aware refinement of one global cluster.
///
/// `members` are dataset rows of the cluster and `scores` their pivot scores
/// (same order). `cameras` and `local_labels` are indexed by dataset row.
/// In every camera group holding a pivot, the highest-scoring pivot (ties:
/// lowest sample_id) governs: members sharing its local cluster are kept, the
/// rest are each discarded with probability p. Groups without a pivot are kept.
[[nodiscard]] ClusterRefinement refine_cluster(ClusterId cluster, std::span<const std::size_t> members,
                                               std::span<const PivotScore> scores,
                                               std::span<const CameraId> cameras,
                                               std::span<const ClusterId> local_labels, double p,
                                               Rng& rng);

/// Per-row local label drawn from the camera-scoped assignment of the row's camera.
[[nodiscard]] std::vector<ClusterId> merge_local_labels(
    const EmbeddingDataset& dataset, std::span<const ClusterAssignment> per_camera);

struct RefinementPlan {
  int epoch = 0;
  double p = 0.0;
  DecaySchedule schedule = DecaySchedule::Cosine;
  std::vector<ClusterRefinement> clusters;
  ClusterAssignment refined;  ///< discarded rows become kOutlier for this epoch
  std::size_t n_clustered = 0;  ///< non-outlier rows before refinement
  std::size_t n_discarded = 0;
  std::map<CameraId, std::size_t> discarded_per_camera;
  std::map<CameraId, std::size_t> clustered_per_camera;
  std::size_t n_pivots = 0;

  [[nodiscard]] double discard_ratio() const {
    return n_clustered == 0 ? 0.0 : static_cast<double>(n_discarded) / static_cast<double>(n_clustered);
  }
};

struct RefineOptions {
  int max_neighbors = kPivotNeighbors;
  int threads = 1;
};

/// Scores pivots inside every global cluster on `features`, then refines every
/// cluster. Cluster k draws its coin flips from rng.split(k), so results do not
/// depend on processing order or thread count.
[[nodiscard]] RefinementPlan refine_assignment(const EmbeddingDataset& dataset, const Matrix& features,
                                               const ClusterAssignment& global,
                                               std::span<const ClusterId> local_labels, double p,
                                               const Rng& rng, const RefineOptions& options = {});

}  // namespace calr::refine
