#pragma once

#include <chrono>
#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

namespace calr::cli {

/// Hex SHA-256 of a file's bytes.
[[nodiscard]] std::string sha256_file(const std::filesystem::path& path);

/// Provenance record written as manifest.json into every run directory.
struct RunManifest {
  std::string command;
  std::vector<std::string> argv;
  std::string config;  ///< effective configuration as key: value text
  std::optional<std::uint64_t> seed;
  std::vector<std::filesystem::path> inputs;   ///< hashed when written
  std::vector<std::filesystem::path> outputs;  ///< relative to the run directory when inside it
  double duration_seconds = 0.0;
};

[[nodiscard]] std::string tool_version();

/// Writes `dir`/manifest.json, replacing any previous one.
void write_manifest(const RunManifest& manifest, const std::filesystem::path& dir);

/// Wall-clock stopwatch for the manifest.
class Stopwatch {
public:
  Stopwatch() : start_(std::chrono::steady_clock::now()) {}
  [[nodiscard]] double seconds() const {
    return std::chrono::duration<double>(std::chrono::steady_clock::now() - start_).count();
  }

private:
  std::chrono::steady_clock::time_point start_;
};

}  // namespace calr::cli
