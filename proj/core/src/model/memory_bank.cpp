#include "calr/model/memory_bank.hpp"

#include "calr/core/error.hpp"

#include <cmath>
#include <string>

namespace calr::model {

bool MemoryBank::contains(ClusterId cluster) const {
  return cluster >= 0 && static_cast<std::size_t>(cluster) < row_of_.size() &&
         row_of_[static_cast<std::size_t>(cluster)] >= 0;
}

std::size_t MemoryBank::row_of(ClusterId cluster) const {
  if (!contains(cluster)) {
    throw InvalidArgument("memory bank: unknown cluster id " + std::to_string(cluster));
  }
  return static_cast<std::size_t>(row_of_[static_cast<std::size_t>(cluster)]);
}

void MemoryBank::update(ClusterId cluster, const Eigen::Ref<const Vector>& query) {
  const auto r = static_cast<Eigen::Index>(row_of(cluster));
  if (query.size() != entries_.cols()) {
    throw InvalidArgument("memory bank: query dim " + std::to_string(query.size()) +
                          " does not match " + std::to_string(entries_.cols()));
  }
  const Vector blended = momentum_ * entries_.row(r).transpose() + (1.0 - momentum_) * query;
  const double norm = blended.norm();
  if (norm == 0.0) return;  // exactly opposite query at m = 0.5: keep the old prototype
  max_renorm_deviation_ = std::max(max_renorm_deviation_, std::abs(1.0 - norm));
  entries_.row(r) = blended.transpose() / norm;
}

MemoryBank init_memory(const ClusterAssignment& assignment, const Matrix& embeddings,
                       double momentum, double temperature) {
  if (static_cast<std::size_t>(embeddings.rows()) != assignment.size()) {
    throw InvalidArgument("init_memory: " + std::to_string(embeddings.rows()) +
                          " embeddings for " + std::to_string(assignment.size()) + " labels");
  }
  if (!(momentum >= 0.0 && momentum <= 1.0) || !(temperature > 0.0)) {
    throw InvalidArgument("init_memory: need momentum in [0, 1] and temperature > 0");
  }
  if (assignment.n_clusters() == 0) throw InvalidArgument("init_memory: no clusters");

  const auto k = static_cast<std::size_t>(assignment.n_clusters());
  Matrix sums = Matrix::Zero(static_cast<Eigen::Index>(k), embeddings.cols());
  for (std::size_t i = 0; i < assignment.size(); ++i) {
    if (assignment[i] != kOutlier) {
      sums.row(assignment[i]) += embeddings.row(static_cast<Eigen::Index>(i));
    }
  }
  MemoryBank bank;
  bank.momentum_ = momentum;
  bank.temperature_ = temperature;
  bank.row_of_.assign(k, -1);
  std::vector<Eigen::Index> kept;
  for (std::size_t c = 0; c < k; ++c) {
    // The mean and the sum share a direction; only the zero case matters.
    if (sums.row(static_cast<Eigen::Index>(c)).norm() <= 1e-12) {
      bank.dropped_.push_back(static_cast<ClusterId>(c));
      continue;
    }
    bank.row_of_[c] = static_cast<std::ptrdiff_t>(kept.size());
    bank.ids_.push_back(static_cast<ClusterId>(c));
    kept.push_back(static_cast<Eigen::Index>(c));
  }
  if (kept.empty()) throw InvalidArgument("init_memory: every cluster has a zero mean");
  bank.entries_.resize(static_cast<Eigen::Index>(kept.size()), embeddings.cols());
  for (std::size_t r = 0; r < kept.size(); ++r) {
    const auto row = sums.row(kept[r]);
    bank.entries_.row(static_cast<Eigen::Index>(r)) = row / row.norm();
  }
  return bank;
}

MemoryBank memory_update(MemoryBank bank, ClusterId cluster, const Eigen::Ref<const Vector>& query) {
  bank.update(cluster, query);
  return bank;
}

}  // namespace calr::model
