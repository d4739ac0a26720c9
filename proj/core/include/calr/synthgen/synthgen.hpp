#pragma once

#include "calr/core/rng.hpp"
#include "calr/core/types.hpp"

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

namespace calr::synth {

/// Generative model: each sample is
///   normalize(identity_center + camera_offset[camera] + noise * N(0, I))
/// with identity centers of length `id_spread` and camera offsets of length
/// `cam_shift`, both uniform in direction.
struct SynthConfig {
  int n_identities = 50;
  int n_cameras = 6;
  int samples_min = 4;  ///< per (identity, camera) pair, inclusive
  int samples_max = 8;
  int dim = 32;
  double id_spread = 1.0;
  double cam_shift = 3.0;
  double noise = 0.1;  ///< per-coordinate standard deviation
  double missing_rate = 0.2;
  std::uint64_t seed = 7;
  /// Identities for a held-out evaluation set sharing the same camera offsets.
  /// 0 disables the evaluation set.
  int n_test_identities = 0;

  /// Throws InvalidArgument on the first violated constraint.
  void validate() const;
};

/// Acceptance benchmark: 50 identities, 6 cameras, 4-8 samples, D=32,
/// cam_shift = 3 * id_spread, seed 7, plus a 50-identity evaluation set.
[[nodiscard]] SynthConfig standard_benchmark();

[[nodiscard]] EmbeddingDataset generate(const SynthConfig& config);

struct SynthBundle {
  EmbeddingDataset train;
  std::optional<EmbeddingDataset> test;
};

/// Training set plus (when n_test_identities > 0) a disjoint-identity test set.
[[nodiscard]] SynthBundle generate_bundle(const SynthConfig& config);

struct QueryGallerySplit {
  std::vector<std::size_t> query;
  std::vector<std::size_t> gallery;
};

/// Per identity seen under >= 2 cameras: two samples from distinct cameras are
/// pinned to the gallery, then round(query_fraction * n_id) samples (clamped to
/// [1, n_id - 2]) are drawn as queries. Single-camera identities go to the gallery.
[[nodiscard]] QueryGallerySplit split_query_gallery(const EmbeddingDataset& dataset, Rng& rng,
                                                    double query_fraction = 0.25);

void save_split_csv(const EmbeddingDataset& dataset, const QueryGallerySplit& split,
                    const std::filesystem::path& path);
[[nodiscard]] QueryGallerySplit load_split_csv(const EmbeddingDataset& dataset,
                                               const std::filesystem::path& path);

/// key: value text form used for the provenance sidecar and `synth --config`.
[[nodiscard]] std::string to_text(const SynthConfig& config);
[[nodiscard]] SynthConfig synth_config_from_pairs(
    const std::vector<std::pair<std::string, std::string>>& pairs);

}  // namespace calr::synth
