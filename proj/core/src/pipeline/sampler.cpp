#include "calr/pipeline/sampler.hpp"

#include "calr/core/error.hpp"

namespace calr::pipeline {

std::vector<Batch> make_balanced_batches(const ClusterAssignment& labels,
                                         const std::vector<ClusterId>& eligible,
                                         int labels_per_batch, int instances_per_label,
                                         int n_batches, Rng& rng) {
  if (labels_per_batch < 1 || instances_per_label < 1 || n_batches < 0) {
    throw InvalidArgument("make_balanced_batches: P, K must be >= 1 and n_batches >= 0");
  }
  if (eligible.empty()) throw InvalidArgument("make_balanced_batches: no eligible clusters");
  const auto members = labels.members();
  for (ClusterId c : eligible) {
    if (c < 0 || c >= labels.n_clusters() || members[static_cast<std::size_t>(c)].empty()) {
      throw InvalidArgument("make_balanced_batches: cluster " + std::to_string(c) + " has no members");
    }
  }
  const auto k = static_cast<std::size_t>(instances_per_label);
  std::vector<ClusterId> queue;
  std::size_t cursor = 0;
  std::vector<Batch> batches(static_cast<std::size_t>(n_batches));
  for (auto& batch : batches) {
    for (int p = 0; p < labels_per_batch && p < static_cast<int>(eligible.size()); ++p) {
      if (cursor == queue.size()) {
        queue = eligible;
        rng.shuffle(std::span<ClusterId>(queue));
        cursor = 0;
      }
      const ClusterId c = queue[cursor++];
      auto pool = members[static_cast<std::size_t>(c)];
      if (pool.size() >= k) {
        // Partial Fisher-Yates: the first k entries become a uniform draw.
        for (std::size_t i = 0; i < k; ++i) {
          std::swap(pool[i], pool[i + rng.uniform_index(pool.size() - i)]);
          batch.rows.push_back(pool[i]);
          batch.targets.push_back(c);
        }
      } else {
        for (std::size_t i = 0; i < k; ++i) {
          batch.rows.push_back(pool[rng.uniform_index(pool.size())]);
          batch.targets.push_back(c);
        }
      }
    }
  }
  return batches;
}

}  // namespace calr::pipeline
