#pragma once

#include "calr/core/types.hpp"

#include <filesystem>

namespace calr {

/// On-disk embedding set rooted at a path prefix `p`:
///   p.hdr  UTF-8 "key: value" lines (n_samples, dim, n_cameras)
///   p.bin  little-endian float32, row-major, n_samples*dim values
///   p.csv  sample_id,camera_id,gt_id (gt_id may be empty)
struct EmbeddingFiles {
  std::filesystem::path header;
  std::filesystem::path blob;
  std::filesystem::path metadata;

  static EmbeddingFiles at(const std::filesystem::path& prefix);
};

/// Features are stored as float32; values are rounded on write.
void save_embeddings(const EmbeddingDataset& dataset, const std::filesystem::path& prefix);
[[nodiscard]] EmbeddingDataset load_embeddings(const std::filesystem::path& prefix);

/// CSV of sample_id,cluster_id with kOutlier written as -1.
void save_assignment_csv(const EmbeddingDataset& dataset, const ClusterAssignment& assignment,
                         const std::filesystem::path& path);
/// Reads sample_id,cluster_id rows and maps them onto dataset rows by sample_id.
[[nodiscard]] ClusterAssignment load_assignment_csv(const EmbeddingDataset& dataset,
                                                    const std::filesystem::path& path,
                                                    AssignmentScope scope);

/// Little-endian float32 blob helpers shared with model checkpoints.
void write_f32_blob(const std::filesystem::path& path, std::span<const double> values);
[[nodiscard]] std::vector<double> read_f32_blob(const std::filesystem::path& path,
                                                std::size_t expected_count);

}  // namespace calr
