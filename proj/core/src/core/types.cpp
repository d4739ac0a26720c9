#include "calr/core/types.hpp"

#include "calr/core/error.hpp"

#include <cmath>
#include <string>
#include <unordered_map>
#include <unordered_set>

namespace calr {

EmbeddingDataset::EmbeddingDataset(Matrix features, std::vector<Sample> samples, int n_cameras)
    : features_(std::move(features)), samples_(std::move(samples)), n_cameras_(n_cameras) {
  if (n_cameras_ < 1) {
    throw InvalidArgument("dataset: n_cameras must be >= 1, got " + std::to_string(n_cameras_));
  }
  if (static_cast<std::size_t>(features_.rows()) != samples_.size()) {
    throw InvalidArgument("dataset: " + std::to_string(features_.rows()) + " feature rows but " +
                          std::to_string(samples_.size()) + " samples");
  }
  std::unordered_set<std::int64_t> seen;
  seen.reserve(samples_.size());
  for (std::size_t i = 0; i < samples_.size(); ++i) {
    const Sample& s = samples_[i];
    if (s.camera_id < 0 || s.camera_id >= n_cameras_) {
      throw InvalidArgument("dataset: sample " + std::to_string(s.sample_id) + " has camera " +
                            std::to_string(s.camera_id) + " outside [0, " +
                            std::to_string(n_cameras_) + ")");
    }
    if (!seen.insert(s.sample_id).second) {
      throw InvalidArgument("dataset: duplicate sample_id " + std::to_string(s.sample_id));
    }
    const double norm = features_.row(static_cast<Eigen::Index>(i)).norm();
    if (std::abs(norm - 1.0) > kNormTolerance) {
      throw InvalidArgument("dataset: row " + std::to_string(i) + " has norm " +
                            std::to_string(norm) + ", expected 1");
    }
  }
}

bool EmbeddingDataset::has_ground_truth() const {
  for (const auto& s : samples_) {
    if (!s.gt_id) return false;
  }
  return !samples_.empty();
}

std::vector<std::size_t> EmbeddingDataset::indices_of_camera(CameraId camera) const {
  std::vector<std::size_t> out;
  for (std::size_t i = 0; i < samples_.size(); ++i) {
    if (samples_[i].camera_id == camera) out.push_back(i);
  }
  return out;
}

std::vector<CameraId> EmbeddingDataset::camera_labels() const {
  std::vector<CameraId> out(samples_.size());
  for (std::size_t i = 0; i < samples_.size(); ++i) out[i] = samples_[i].camera_id;
  return out;
}

std::vector<int> EmbeddingDataset::gt_labels() const {
  std::vector<int> out(samples_.size());
  for (std::size_t i = 0; i < samples_.size(); ++i) {
    if (!samples_[i].gt_id) {
      throw InvalidArgument("dataset: sample " + std::to_string(samples_[i].sample_id) +
                            " has no ground-truth id");
    }
    out[i] = *samples_[i].gt_id;
  }
  return out;
}

EmbeddingDataset EmbeddingDataset::subset(std::span<const std::size_t> rows) const {
  Matrix f(static_cast<Eigen::Index>(rows.size()), features_.cols());
  std::vector<Sample> s;
  s.reserve(rows.size());
  for (std::size_t r = 0; r < rows.size(); ++r) {
    if (rows[r] >= samples_.size()) {
      throw InvalidArgument("dataset: subset row " + std::to_string(rows[r]) + " out of range");
    }
    f.row(static_cast<Eigen::Index>(r)) = features_.row(static_cast<Eigen::Index>(rows[r]));
    s.push_back(samples_[rows[r]]);
  }
  return EmbeddingDataset(std::move(f), std::move(s), n_cameras_);
}

EmbeddingDataset EmbeddingDataset::with_features(Matrix features) const {
  return EmbeddingDataset(std::move(features), samples_, n_cameras_);
}

ClusterAssignment::ClusterAssignment(std::vector<ClusterId> labels, AssignmentScope scope)
    : labels_(std::move(labels)), scope_(scope) {
  ClusterId max_label = -1;
  for (ClusterId l : labels_) {
    if (l < kOutlier) {
      throw InvalidArgument("assignment: label " + std::to_string(l) + " is not a cluster id");
    }
    max_label = std::max(max_label, l);
  }
  n_clusters_ = max_label + 1;
  std::vector<bool> used(static_cast<std::size_t>(n_clusters_), false);
  for (ClusterId l : labels_) {
    if (l != kOutlier) used[static_cast<std::size_t>(l)] = true;
  }
  for (std::size_t k = 0; k < used.size(); ++k) {
    if (!used[k]) {
      throw InvalidArgument("assignment: cluster ids not contiguous, " + std::to_string(k) +
                            " unused");
    }
  }
}

ClusterAssignment ClusterAssignment::from_raw(std::span<const int> raw, AssignmentScope scope) {
  std::unordered_map<int, ClusterId> remap;
  std::vector<ClusterId> labels(raw.size(), kOutlier);
  for (std::size_t i = 0; i < raw.size(); ++i) {
    if (raw[i] < 0) continue;
    auto [it, inserted] = remap.try_emplace(raw[i], static_cast<ClusterId>(remap.size()));
    labels[i] = it->second;
  }
  return ClusterAssignment(std::move(labels), scope);
}

std::size_t ClusterAssignment::n_outliers() const {
  std::size_t n = 0;
  for (ClusterId l : labels_) n += (l == kOutlier);
  return n;
}

std::vector<std::vector<std::size_t>> ClusterAssignment::members() const {
  std::vector<std::vector<std::size_t>> out(static_cast<std::size_t>(n_clusters_));
  for (std::size_t i = 0; i < labels_.size(); ++i) {
    if (labels_[i] != kOutlier) out[static_cast<std::size_t>(labels_[i])].push_back(i);
  }
  return out;
}

void ClusterAssignment::validate_against(const EmbeddingDataset& dataset) const {
  if (labels_.size() != dataset.size()) {
    throw InvalidArgument("assignment: " + std::to_string(labels_.size()) +
                          " labels for a dataset of " + std::to_string(dataset.size()));
  }
  if (scope_.kind != AssignmentScope::Kind::Camera) return;
  for (std::size_t i = 0; i < labels_.size(); ++i) {
    if (labels_[i] != kOutlier && dataset.samples()[i].camera_id != scope_.camera) {
      throw InvalidArgument("assignment: camera-" + std::to_string(scope_.camera) +
                            " scope labels sample " +
                            std::to_string(dataset.samples()[i].sample_id) + " from camera " +
                            std::to_string(dataset.samples()[i].camera_id));
    }
  }
}

}  // namespace calr
