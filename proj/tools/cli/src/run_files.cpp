#include "calr/cli/run_files.hpp"

#include "calr/core/embedding_io.hpp"
#include "calr/core/error.hpp"
#include "calr/core/rng.hpp"

#include <fstream>
#include <sstream>

namespace calr::cli {

std::string read_text(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open " + path.string());
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

void write_text(const fs::path& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw IoError("cannot write " + path.string());
  out << text;
  if (!out) throw IoError("short write to " + path.string());
}

fs::path data_prefix(const fs::path& path) {
  return fs::is_directory(path) ? path / layout::kData : path;
}

std::vector<fs::path> embedding_files(const fs::path& prefix) {
  const auto f = EmbeddingFiles::at(prefix);
  return {f.header, f.blob, f.metadata};
}

namespace {

std::vector<std::pair<std::string, std::string>> read_pairs(const fs::path& path) {
  if (!fs::is_regular_file(path)) throw UsageError("config file not found: " + path.string());
  try {
    return pipeline::parse_key_values(read_text(path));
  } catch (const InvalidArgument& e) {
    throw UsageError(path.string() + ": " + e.what());
  }
}

}  // namespace

pipeline::TrainConfig load_train_config(const std::optional<fs::path>& path, const Context& ctx) {
  pipeline::TrainConfig config;
  if (path) {
    try {
      config = pipeline::config_from_pairs(read_pairs(*path));
    } catch (const InvalidArgument& e) {
      throw UsageError(path->string() + ": " + e.what());
    }
  }
  if (ctx.seed) config.seed = *ctx.seed;
  if (ctx.threads) config.threads = *ctx.threads;
  try {
    config.validate();
  } catch (const InvalidArgument& e) {
    throw UsageError(std::string("invalid training config: ") + e.what());
  }
  return config;
}

synth::SynthConfig load_synth_config(const std::optional<fs::path>& path, bool standard,
                                     const Context& ctx) {
  synth::SynthConfig config = standard ? synth::standard_benchmark() : synth::SynthConfig{};
  if (path) {
    auto pairs = read_pairs(*path);
    if (standard) {
      // Overrides apply on top of the benchmark values.
      auto base = pipeline::parse_key_values(synth::to_text(config));
      base.insert(base.end(), pairs.begin(), pairs.end());
      pairs = std::move(base);
    }
    try {
      config = synth::synth_config_from_pairs(pairs);
    } catch (const InvalidArgument& e) {
      throw UsageError(path->string() + ": " + e.what());
    }
  }
  if (ctx.seed) config.seed = *ctx.seed;
  try {
    config.validate();
  } catch (const InvalidArgument& e) {
    throw UsageError(std::string("invalid synth config: ") + e.what());
  }
  return config;
}

EvalSource load_eval_source(const fs::path& prefix, const std::optional<fs::path>& split_file,
                            std::uint64_t seed) {
  EvalSource src{prefix, split_file, load_embeddings(prefix), {}};
  if (!src.split_file) {
    const auto beside = prefix.parent_path() / layout::kSplit;
    if (fs::is_regular_file(beside)) src.split_file = beside;
  }
  if (src.split_file) {
    src.split = synth::load_split_csv(src.dataset, *src.split_file);
  } else {
    Rng rng(seed, streams::kSplit);
    src.split = synth::split_query_gallery(src.dataset, rng);
  }
  return src;
}

std::optional<fs::path> implied_eval_prefix(const fs::path& data) {
  if (!fs::is_directory(data)) return std::nullopt;
  const auto prefix = data / layout::kTest;
  if (fs::is_regular_file(EmbeddingFiles::at(prefix).header)) return prefix;
  return std::nullopt;
}

std::vector<ClusterAssignment> load_local_assignments(const EmbeddingDataset& dataset,
                                                      const std::vector<fs::path>& files) {
  std::vector<ClusterAssignment> out;
  out.reserve(files.size());
  for (const auto& f : files) {
    const auto any = load_assignment_csv(dataset, f, AssignmentScope::global());
    std::optional<CameraId> camera;
    for (std::size_t i = 0; i < any.size(); ++i) {
      if (any[i] == kOutlier) continue;
      const auto c = dataset.samples()[i].camera_id;
      if (camera && *camera != c) {
        throw InvalidArgument(f.string() + ": local assignment spans more than one camera");
      }
      camera = c;
    }
    if (!camera) throw InvalidArgument(f.string() + ": local assignment labels no sample");
    out.push_back(load_assignment_csv(dataset, f, AssignmentScope::for_camera(*camera)));
  }
  return out;
}

fs::path local_assignment_file(const fs::path& dir, CameraId camera) {
  return dir / ("local_cam" + std::to_string(camera) + ".csv");
}

void check_output_dir(const fs::path& dir) {
  if (fs::exists(dir) && !fs::is_directory(dir)) {
    throw UsageError("output path exists and is not a directory: " + dir.string());
  }
}

}  // namespace calr::cli
