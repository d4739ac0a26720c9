#pragma once

#include <Eigen/Dense>

#include <cstdint>
#include <optional>
#include <span>
#include <vector>

namespace calr {

using Matrix = Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;
using Vector = Eigen::VectorXd;

using CameraId = int;
using ClusterId = int;

/// Reserved label for samples that belong to no cluster.
inline constexpr ClusterId kOutlier = -1;

struct Sample {
  std::int64_t sample_id = 0;
  CameraId camera_id = 0;
  /// Ground-truth identity. Evaluation only; training code never reads it.
  std::optional<int> gt_id;

  bool operator==(const Sample&) const = default;
};

/// Unit-norm feature rows with per-sample camera metadata. Immutable once built.
class EmbeddingDataset {
public:
  static constexpr double kNormTolerance = 1e-6;

  EmbeddingDataset() = default;
  /// Validates row norms, row/sample counts, camera ranges and sample id uniqueness.
  EmbeddingDataset(Matrix features, std::vector<Sample> samples, int n_cameras);

  [[nodiscard]] const Matrix& features() const { return features_; }
  [[nodiscard]] const std::vector<Sample>& samples() const { return samples_; }
  [[nodiscard]] int n_cameras() const { return n_cameras_; }
  [[nodiscard]] std::size_t size() const { return samples_.size(); }
  [[nodiscard]] int dim() const { return static_cast<int>(features_.cols()); }
  [[nodiscard]] bool has_ground_truth() const;

  /// Row indices of all samples captured by `camera`, ascending.
  [[nodiscard]] std::vector<std::size_t> indices_of_camera(CameraId camera) const;
  [[nodiscard]] std::vector<CameraId> camera_labels() const;
  /// Ground-truth ids; throws if any sample lacks one.
  [[nodiscard]] std::vector<int> gt_labels() const;

  /// New dataset restricted to `rows` (order preserved). Keeps n_cameras.
  [[nodiscard]] EmbeddingDataset subset(std::span<const std::size_t> rows) const;
  /// Same samples with replaced feature rows (renormalization is the caller's job).
  [[nodiscard]] EmbeddingDataset with_features(Matrix features) const;

private:
  Matrix features_;
  std::vector<Sample> samples_;
  int n_cameras_ = 0;
};

struct AssignmentScope {
  enum class Kind { Global, Camera };
  Kind kind = Kind::Global;
  CameraId camera = -1;

  static AssignmentScope global() { return {}; }
  static AssignmentScope for_camera(CameraId c) { return {Kind::Camera, c}; }
  bool operator==(const AssignmentScope&) const = default;
};

/// Per-sample pseudo labels over a whole dataset. Non-outlier labels are
/// contiguous in [0, n_clusters). A camera-scoped assignment labels only
/// that camera's samples; everything else is kOutlier.
class ClusterAssignment {
public:
  ClusterAssignment() = default;
  /// Requires labels already contiguous; throws otherwise.
  ClusterAssignment(std::vector<ClusterId> labels, AssignmentScope scope);

  /// Relabels arbitrary non-negative ids to 0..K-1 in order of first appearance.
  /// Negative ids are treated as outliers.
  static ClusterAssignment from_raw(std::span<const int> raw, AssignmentScope scope);

  [[nodiscard]] const std::vector<ClusterId>& labels() const { return labels_; }
  [[nodiscard]] ClusterId operator[](std::size_t i) const { return labels_[i]; }
  [[nodiscard]] std::size_t size() const { return labels_.size(); }
  [[nodiscard]] int n_clusters() const { return n_clusters_; }
  [[nodiscard]] const AssignmentScope& scope() const { return scope_; }
  [[nodiscard]] std::size_t n_outliers() const;

  /// Member rows per cluster id.
  [[nodiscard]] std::vector<std::vector<std::size_t>> members() const;

  /// Checks length and camera-scope consistency against `dataset`.
  void validate_against(const EmbeddingDataset& dataset) const;

  bool operator==(const ClusterAssignment&) const = default;

private:
  std::vector<ClusterId> labels_;
  AssignmentScope scope_;
  int n_clusters_ = 0;
};

}  // namespace calr
