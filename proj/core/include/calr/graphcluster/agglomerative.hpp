#pragma once

#include "calr/core/types.hpp"

#include <vector>

namespace calr::graph {

enum class Linkage { Ward, Average };

/// Bottom-up hierarchical clustering of the rows of `features` until exactly
/// `n_clusters` remain. Ward merges the pair with the smallest increase in
/// within-cluster sum of squares (Lance-Williams on squared Euclidean
/// distances); Average merges by mean pairwise Euclidean distance. Ties go to
/// the lexicographically smallest (i, j) pair of cluster representatives.
/// Returns labels 0..n_clusters-1 numbered by first appearance.
[[nodiscard]] std::vector<int> agglomerative_labels(const Matrix& features, int n_clusters,
                                                    Linkage linkage = Linkage::Ward);

/// Clusters one camera's rows of `dataset` and returns a CAMERA-scope
/// assignment over the whole dataset (other cameras are kOutlier).
[[nodiscard]] ClusterAssignment agglomerative_cluster(const EmbeddingDataset& dataset,
                                                      CameraId camera, int n_clusters,
                                                      Linkage linkage = Linkage::Ward);

/// max(1, ceil(n_samples / 5)): one local cluster per five images of a camera.
[[nodiscard]] int intra_camera_cluster_count(std::size_t n_samples);

}  // namespace calr::graph
