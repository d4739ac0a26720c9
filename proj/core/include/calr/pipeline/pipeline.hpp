#pragma once

#include "calr/core/types.hpp"
#include "calr/eval/cluster_quality.hpp"
#include "calr/eval/retrieval.hpp"
#include "calr/model/domain_classifier.hpp"
#include "calr/model/encoder.hpp"
#include "calr/pipeline/train_config.hpp"
#include "calr/synthgen/synthgen.hpp"

#include <filesystem>
#include <functional>
#include <optional>
#include <string>
#include <vector>

namespace calr::pipeline {

enum class Stage { Intra, Inter };

/// One row of the training log.
struct EpochStats {
  int epoch = 0;       ///< 1-based within its stage
  Stage stage = Stage::Inter;
  CameraId camera = -1;  ///< intra-camera rows only
  double p = 0.0;        ///< discard probability used this epoch
  double loss_inter = 0.0;  ///< contrastive term (the intra-camera loss in stage 1)
  double loss_domain = 0.0;
  double loss_total = 0.0;
  int n_clusters = 0;    ///< clusters trained on (== memory bank size)
  std::size_t n_outliers = 0;
  double discard_ratio = 0.0;
  bool aborted = false;  ///< clustering produced no usable cluster; previous labels reused
  /// Clustering quality before and after refinement (ground truth permitting).
  std::optional<eval::ClusterQuality> global_quality;
  std::optional<eval::ClusterQuality> refined_quality;
  std::optional<eval::RetrievalResult> retrieval;
};

/// Held-out retrieval data evaluated during stage 2.
struct EvalData {
  EmbeddingDataset dataset;
  synth::QueryGallerySplit split;
};

/// Called once per finished epoch, in report order.
using EpochCallback = std::function<void(const EpochStats&)>;

struct Stage1Result {
  std::vector<model::EncoderModel> encoders;      ///< one per camera
  std::vector<ClusterAssignment> local;           ///< camera-scoped, one per camera
  std::vector<EpochStats> stats;
  std::vector<std::string> warnings;
};

struct Stage2Result {
  model::EncoderModel encoder;
  model::DomainClassifier classifier;
  ClusterAssignment last_refined;
  std::vector<EpochStats> stats;
  std::vector<std::string> warnings;
};

struct RunReport {
  std::vector<EpochStats> stats;  ///< stage 1 rows then stage 2 rows
  std::optional<eval::RetrievalResult> final_retrieval;
  std::vector<std::string> warnings;
};

struct TrainResult {
  Stage1Result stage1;
  Stage2Result stage2;
  model::EncoderModel initial_encoder;
  RunReport report;
};

/// The shared starting model f for a dataset of the given input dim.
[[nodiscard]] model::EncoderModel initial_encoder(const TrainConfig& config, int input_dim);

/// Per-camera self-training: each camera's encoder starts from `initial`,
/// re-clusters its own samples each epoch (K = ceil(N_c / 5)) and trains with
/// the intra-camera contrastive loss. The local labels returned are the
/// clustering of the final encoder's features. Cameras with fewer than two
/// samples get a single cluster without training.
[[nodiscard]] Stage1Result run_stage1(const EmbeddingDataset& dataset, const TrainConfig& config,
                                      const model::EncoderModel& initial);

/// Inter-camera training: per epoch, Infomap global clustering, pivot-based
/// refinement against `local`, memory bank rebuild, and balanced-batch
/// training of contrastive + (optionally) reversed domain loss.
[[nodiscard]] Stage2Result run_stage2(const EmbeddingDataset& dataset,
                                      const std::vector<ClusterAssignment>& local,
                                      const TrainConfig& config, const model::EncoderModel& initial,
                                      const EvalData* eval_data = nullptr,
                                      const EpochCallback& on_epoch = {});

/// Stage 1 then stage 2, both from the same initial model.
[[nodiscard]] TrainResult train(const EmbeddingDataset& dataset, const TrainConfig& config,
                                const EvalData* eval_data = nullptr,
                                const EpochCallback& on_epoch = {});

[[nodiscard]] std::string to_string(Stage stage);

/// CSV with one row per EpochStats; numbers use a fixed 10-significant-digit
/// format so identical runs give identical bytes. Empty cells mark values
/// that were not computed.
void write_epoch_stats_csv(const std::vector<EpochStats>& stats, const std::filesystem::path& path);
[[nodiscard]] std::string epoch_stats_csv(const std::vector<EpochStats>& stats);
[[nodiscard]] std::string epoch_stats_csv_header();
[[nodiscard]] std::string epoch_stats_csv_row(const EpochStats& stats);

}  // namespace calr::pipeline
