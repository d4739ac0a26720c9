#pragma once

#include "calr/graphcluster/agglomerative.hpp"
#include "calr/graphcluster/knn_graph.hpp"
#include "calr/model/adam.hpp"
#include "calr/model/encoder.hpp"
#include "calr/model/memory_bank.hpp"
#include "calr/refine/decay.hpp"
#include "calr/refine/pivot.hpp"

#include <cstdint>
#include <string>
#include <utility>
#include <vector>

namespace calr::pipeline {

enum class ClusterWeighting { Uniform, CameraDiversity };

/// Every knob of a training run. Defaults follow the published settings where
/// they exist (20 + 50 epochs, tau 0.1, m 0.2, Adam with 5e-4 weight decay,
/// cosine decay from 1 to 0, beta 1).
struct TrainConfig {
  int intra_epochs = 20;
  int inter_epochs = 50;

  int labels_per_batch = 4;     ///< P
  int instances_per_label = 4;  ///< K
  int iters_per_epoch = 0;      ///< 0: ceil(clustered samples / (P*K))

  double temperature = model::kDefaultTemperature;
  double momentum = model::kDefaultMomentum;

  graph::KnnOptions knn;
  int infomap_trials = 5;
  graph::Linkage linkage = graph::Linkage::Ward;

  refine::DecaySchedule schedule = refine::DecaySchedule::Cosine;
  double p_start = 1.0;
  double p_end = 0.0;
  int pivot_neighbors = refine::kPivotNeighbors;

  double beta = 1.0;
  double lambda = 1.0;
  ClusterWeighting cluster_weighting = ClusterWeighting::Uniform;

  model::AdamOptions adam;

  model::EncoderArch arch = model::EncoderArch::Linear;
  int output_dim = 0;  ///< 0: same as the input dim
  int hidden_dim = 32;
  bool identity_init = true;  ///< linear arch: start from the input features

  std::uint64_t seed = 1;
  bool use_refinement = true;
  bool use_domain_alignment = true;

  int eval_every = 5;  ///< evaluation cadence in inter-camera epochs; final epoch always
  int max_rank = 20;
  int threads = 1;

  /// Throws InvalidArgument describing the first invalid field.
  void validate() const;
};

/// Flat "key: value" text with dotted keys, one per line, every key present.
[[nodiscard]] std::string to_text(const TrainConfig& config);
/// Applies key/value overrides on top of defaults. Unknown keys and
/// unparsable values throw InvalidArgument.
[[nodiscard]] TrainConfig config_from_pairs(const std::vector<std::pair<std::string, std::string>>& pairs,
                                            TrainConfig base = {});
/// Parses "key: value" / "key = value" lines; '#' starts a comment.
[[nodiscard]] std::vector<std::pair<std::string, std::string>> parse_key_values(const std::string& text);

}  // namespace calr::pipeline
