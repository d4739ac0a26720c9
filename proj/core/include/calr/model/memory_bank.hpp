#pragma once

#include "calr/core/types.hpp"

#include <vector>

namespace calr::model {

inline constexpr double kDefaultMomentum = 0.2;
inline constexpr double kDefaultTemperature = 0.1;

/// Cluster-level memory: one unit-norm prototype per cluster.
class MemoryBank {
public:
  MemoryBank() = default;

  [[nodiscard]] std::size_t size() const { return ids_.size(); }
  [[nodiscard]] int dim() const { return static_cast<int>(entries_.cols()); }
  [[nodiscard]] double momentum() const { return momentum_; }
  [[nodiscard]] double temperature() const { return temperature_; }
  [[nodiscard]] const Matrix& entries() const { return entries_; }
  /// Cluster id stored in each bank row.
  [[nodiscard]] const std::vector<ClusterId>& cluster_ids() const { return ids_; }
  [[nodiscard]] bool contains(ClusterId cluster) const;
  /// Bank row of `cluster`; throws InvalidArgument if absent.
  [[nodiscard]] std::size_t row_of(ClusterId cluster) const;
  /// Clusters skipped at initialization because their mean embedding was zero.
  [[nodiscard]] const std::vector<ClusterId>& dropped() const { return dropped_; }
  /// Largest |1 - |m u + (1 - m) q|| seen by update(): how far the raw momentum
  /// blend strayed from the unit sphere before renormalization.
  [[nodiscard]] double max_renorm_deviation() const { return max_renorm_deviation_; }

  /// u_k <- normalize(m u_k + (1 - m) q). Throws on unknown cluster or dim mismatch.
  void update(ClusterId cluster, const Eigen::Ref<const Vector>& query);

  friend MemoryBank init_memory(const ClusterAssignment&, const Matrix&, double, double);

private:
  Matrix entries_;
  std::vector<ClusterId> ids_;
  std::vector<std::ptrdiff_t> row_of_;  // cluster id -> row, -1 if absent
  std::vector<ClusterId> dropped_;
  double momentum_ = kDefaultMomentum;
  double temperature_ = kDefaultTemperature;
  double max_renorm_deviation_ = 0.0;
};

/// u_k = normalize(mean of member embeddings) for every non-outlier cluster.
/// Clusters whose mean is the zero vector are dropped (see dropped()).
/// Throws if the assignment has no clusters or every cluster is dropped.
[[nodiscard]] MemoryBank init_memory(const ClusterAssignment& assignment, const Matrix& embeddings,
                                     double momentum = kDefaultMomentum,
                                     double temperature = kDefaultTemperature);

/// Functional form of MemoryBank::update.
[[nodiscard]] MemoryBank memory_update(MemoryBank bank, ClusterId cluster,
                                       const Eigen::Ref<const Vector>& query);

}  // namespace calr::model
