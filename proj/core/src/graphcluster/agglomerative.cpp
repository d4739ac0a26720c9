#include "calr/graphcluster/agglomerative.hpp"

#include "calr/core/error.hpp"

#include <cmath>
#include <limits>
#include <numeric>
#include <string>

namespace calr::graph {

std::vector<int> agglomerative_labels(const Matrix& features, int n_clusters, Linkage linkage) {
  const auto n = static_cast<std::size_t>(features.rows());
  if (n_clusters < 1 || static_cast<std::size_t>(n_clusters) > n) {
    throw InvalidArgument("agglomerative_cluster: n_clusters=" + std::to_string(n_clusters) +
                          " outside [1, " + std::to_string(n) + "]");
  }
  // d holds squared distances for Ward, plain distances for Average.
  std::vector<double> d(n * n, 0.0);
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = i + 1; j < n; ++j) {
      const double sq = (features.row(static_cast<Eigen::Index>(i)) -
                         features.row(static_cast<Eigen::Index>(j))).squaredNorm();
      const double v = linkage == Linkage::Ward ? sq : std::sqrt(sq);
      d[i * n + j] = v;
      d[j * n + i] = v;
    }
  }
  std::vector<std::size_t> size(n, 1);
  std::vector<bool> active(n, true);
  std::vector<std::size_t> parent(n);
  std::iota(parent.begin(), parent.end(), 0);

  for (std::size_t remaining = n; remaining > static_cast<std::size_t>(n_clusters); --remaining) {
    double best = std::numeric_limits<double>::infinity();
    std::size_t bi = 0, bj = 0;
    for (std::size_t i = 0; i < n; ++i) {
      if (!active[i]) continue;
      for (std::size_t j = i + 1; j < n; ++j) {
        if (active[j] && d[i * n + j] < best) {
          best = d[i * n + j];
          bi = i;
          bj = j;
        }
      }
    }
    // Merge bj into bi; bi keeps the smaller representative index.
    const auto ni = static_cast<double>(size[bi]);
    const auto nj = static_cast<double>(size[bj]);
    const double dij = d[bi * n + bj];
    for (std::size_t k = 0; k < n; ++k) {
      if (!active[k] || k == bi || k == bj) continue;
      const auto nk = static_cast<double>(size[k]);
      double v;
      if (linkage == Linkage::Ward) {
        v = ((ni + nk) * d[k * n + bi] + (nj + nk) * d[k * n + bj] - nk * dij) / (ni + nj + nk);
      } else {
        v = (ni * d[k * n + bi] + nj * d[k * n + bj]) / (ni + nj);
      }
      d[k * n + bi] = v;
      d[bi * n + k] = v;
    }
    size[bi] += size[bj];
    active[bj] = false;
    parent[bj] = bi;
  }

  auto root = [&](std::size_t v) {
    while (parent[v] != v) v = parent[v];
    return v;
  };
  std::vector<int> label_of_root(n, -1);
  std::vector<int> labels(n);
  int next = 0;
  for (std::size_t v = 0; v < n; ++v) {
    const auto r = root(v);
    if (label_of_root[r] < 0) label_of_root[r] = next++;
    labels[v] = label_of_root[r];
  }
  return labels;
}

ClusterAssignment agglomerative_cluster(const EmbeddingDataset& dataset, CameraId camera,
                                        int n_clusters, Linkage linkage) {
  const auto rows = dataset.indices_of_camera(camera);
  if (rows.empty()) {
    throw InvalidArgument("agglomerative_cluster: camera " + std::to_string(camera) +
                          " has no samples");
  }
  Matrix sub(static_cast<Eigen::Index>(rows.size()), dataset.features().cols());
  for (std::size_t r = 0; r < rows.size(); ++r) {
    sub.row(static_cast<Eigen::Index>(r)) = dataset.features().row(static_cast<Eigen::Index>(rows[r]));
  }
  const auto local = agglomerative_labels(sub, n_clusters, linkage);
  std::vector<ClusterId> labels(dataset.size(), kOutlier);
  for (std::size_t r = 0; r < rows.size(); ++r) labels[rows[r]] = local[r];
  return ClusterAssignment(std::move(labels), AssignmentScope::for_camera(camera));
}

int intra_camera_cluster_count(std::size_t n_samples) {
  return std::max(1, static_cast<int>((n_samples + 4) / 5));
}

}  // namespace calr::graph
