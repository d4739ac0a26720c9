#pragma once

#include "calr/pipeline/pipeline.hpp"
#include "calr/pipeline/train_config.hpp"
#include "calr/synthgen/synthgen.hpp"

#include <filesystem>
#include <optional>
#include <ostream>
#include <stdexcept>
#include <string>
#include <vector>

namespace calr::cli {

namespace fs = std::filesystem;

/// Bad invocation: reported with exit code 2.
class UsageError : public std::runtime_error {
public:
  using std::runtime_error::runtime_error;
};

/// Everything a command needs besides its own flags.
struct Context {
  std::ostream* out = nullptr;
  std::ostream* err = nullptr;
  std::vector<std::string> argv;      ///< full command line, for the manifest
  std::optional<std::uint64_t> seed;  ///< CALR_SEED override
  std::optional<int> threads;         ///< --threads cap
};

struct SynthArgs {
  std::optional<fs::path> config;
  fs::path out;
  bool standard = false;
};

struct ClusterArgs {
  fs::path data;
  fs::path out;
  std::optional<fs::path> config;
  std::optional<fs::path> ckpt;
  std::string scope = "global";
};

struct RefineArgs {
  fs::path data;
  fs::path global;
  std::vector<fs::path> local;
  fs::path out;
  std::optional<fs::path> config;
  std::optional<double> p;
  std::optional<fs::path> ckpt;
};

struct TrainArgs {
  fs::path config_path;
  fs::path data;
  fs::path out;
  std::optional<fs::path> eval_data;
};

struct EvalArgs {
  fs::path ckpt;
  fs::path data;
  std::optional<fs::path> split;
  std::optional<fs::path> config;
  std::optional<fs::path> out;
};

struct SweepArgs {
  fs::path config_path;
  fs::path data;
  fs::path out;
  std::string axis;
  std::vector<std::string> grid;
  std::optional<fs::path> eval_data;
};

struct ReportArgs {
  std::vector<fs::path> runs;
  fs::path out;
};

int cmd_synth(const SynthArgs& args, const Context& ctx);
int cmd_cluster(const ClusterArgs& args, const Context& ctx);
int cmd_refine(const RefineArgs& args, const Context& ctx);
int cmd_train(const TrainArgs& args, const Context& ctx);
int cmd_eval(const EvalArgs& args, const Context& ctx);
int cmd_sweep(const SweepArgs& args, const Context& ctx);
int cmd_report(const ReportArgs& args, const Context& ctx);

/// Default grid of a sweep axis ("schedule", "beta" or "ablation").
[[nodiscard]] std::vector<std::string> default_grid(const std::string& axis);

/// Applies one sweep grid value to a base config; returns the key/value delta.
[[nodiscard]] std::vector<std::pair<std::string, std::string>> sweep_delta(const std::string& axis,
                                                                         const std::string& value);

}  // namespace calr::cli
