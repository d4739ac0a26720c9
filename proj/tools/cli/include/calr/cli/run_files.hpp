#pragma once

#include "calr/cli/commands.hpp"
#include "calr/core/types.hpp"

#include <filesystem>
#include <optional>
#include <string>
#include <vector>

namespace calr::cli {

/// File layout shared by the subcommands.
namespace layout {
inline constexpr const char* kData = "data";      ///< training embeddings prefix
inline constexpr const char* kTest = "test";      ///< held-out evaluation embeddings prefix
inline constexpr const char* kSplit = "split.csv";  ///< query/gallery roles of the evaluation set
inline constexpr const char* kSynthSidecar = "synth.cfg";
inline constexpr const char* kConfig = "config.cfg";
inline constexpr const char* kEpochStats = "epoch_stats.csv";
inline constexpr const char* kReport = "report.json";
inline constexpr const char* kCheckpoint = "final";
inline constexpr const char* kSweepTable = "sweep.csv";
}  // namespace layout

[[nodiscard]] std::string read_text(const fs::path& path);
void write_text(const fs::path& path, const std::string& text);

/// A directory resolves to its `data` prefix; anything else is taken as a prefix.
[[nodiscard]] fs::path data_prefix(const fs::path& path);
/// The three files of an embedding prefix, for hashing.
[[nodiscard]] std::vector<fs::path> embedding_files(const fs::path& prefix);

/// Reads and validates a training config, then applies CALR_SEED and --threads.
/// Malformed files raise UsageError.
[[nodiscard]] pipeline::TrainConfig load_train_config(const std::optional<fs::path>& path,
                                                      const Context& ctx);
[[nodiscard]] synth::SynthConfig load_synth_config(const std::optional<fs::path>& path, bool standard,
                                                   const Context& ctx);

/// Held-out data for retrieval evaluation.
struct EvalSource {
  fs::path prefix;
  std::optional<fs::path> split_file;  ///< absent: split drawn from the seed
  EmbeddingDataset dataset;
  synth::QueryGallerySplit split;
};

/// Loads `prefix` and its split, from `split_file` when given, otherwise
/// from split.csv beside the prefix, otherwise drawn with `seed`.
[[nodiscard]] EvalSource load_eval_source(const fs::path& prefix,
                                          const std::optional<fs::path>& split_file,
                                          std::uint64_t seed);

/// Evaluation set implied by a training data path: `<dir>/test` when the data
/// path is a directory holding one, else nothing.
[[nodiscard]] std::optional<fs::path> implied_eval_prefix(const fs::path& data);

/// Per-camera assignment files; each file must label samples of a single camera.
[[nodiscard]] std::vector<ClusterAssignment> load_local_assignments(const EmbeddingDataset& dataset,
                                                                    const std::vector<fs::path>& files);
[[nodiscard]] fs::path local_assignment_file(const fs::path& dir, CameraId camera);

/// Fails (as a usage error) if `dir` exists and is not a directory.
void check_output_dir(const fs::path& dir);

}  // namespace calr::cli
