#pragma once

#include "calr/core/rng.hpp"
#include "calr/core/types.hpp"

#include <vector>

namespace calr::pipeline {

struct Batch {
  std::vector<std::size_t> rows;
  std::vector<ClusterId> targets;
};

/// P x K label-balanced batches. Clusters are visited in shuffled rounds so
/// every eligible cluster is drawn before any repeats; each contributes K
/// members, drawn without replacement while it has at least K and with
/// replacement otherwise. Outliers and clusters not in `eligible` are skipped.
[[nodiscard]] std::vector<Batch> make_balanced_batches(const ClusterAssignment& labels,
                                                       const std::vector<ClusterId>& eligible,
                                                       int labels_per_batch, int instances_per_label,
                                                       int n_batches, Rng& rng);

}  // namespace calr::pipeline
