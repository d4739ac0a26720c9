#include "calr/cli/app.hpp"

#include "calr/cli/commands.hpp"
#include "calr/cli/manifest.hpp"

#include <CLI11.hpp>

#include <cstdlib>
#include <functional>

namespace calr::cli {
namespace {

std::optional<std::uint64_t> seed_from_env() {
  const char* raw = std::getenv("CALR_SEED");
  if (!raw || !*raw) return std::nullopt;
  const std::string s(raw);
  try {
    std::size_t pos = 0;
    if (s.front() == '-') throw std::invalid_argument(s);
    const auto v = std::stoull(s, &pos);
    if (pos != s.size()) throw std::invalid_argument(s);
    return v;
  } catch (const std::exception&) {
    throw UsageError("CALR_SEED must be a non-negative integer, got '" + s + "'");
  }
}

}  // namespace

int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Camera-aware label refinement laboratory", "calr"};
  app.set_version_flag("--version", tool_version());
  app.require_subcommand(1);
  app.fallthrough();

  int threads = 0;
  app.add_option("--threads", threads, "Cap on worker threads")->check(CLI::PositiveNumber);

  SynthArgs synth;
  auto* synth_cmd = app.add_subcommand("synth", "Generate a synthetic camera-biased dataset");
  synth_cmd->add_option("--config", synth.config, "key: value synth config")->check(CLI::ExistingFile);
  synth_cmd->add_flag("--standard", synth.standard, "Start from the standard benchmark settings");
  synth_cmd->add_option("--out", synth.out, "Output directory")->required();

  ClusterArgs cluster;
  auto* cluster_cmd = app.add_subcommand("cluster", "Cluster embeddings (Infomap or per-camera agglomerative)");
  cluster_cmd->add_option("--data", cluster.data, "Data directory or embedding prefix")->required();
  cluster_cmd->add_option("--out", cluster.out, "Output directory")->required();
  cluster_cmd->add_option("--config", cluster.config, "Training config for graph settings")->check(CLI::ExistingFile);
  cluster_cmd->add_option("--ckpt", cluster.ckpt, "Encode with this checkpoint first");
  cluster_cmd->add_option("--scope", cluster.scope, "global or camera")
      ->check(CLI::IsMember({"global", "camera"}));

  RefineArgs refine;
  auto* refine_cmd = app.add_subcommand("refine", "Pivot-based refinement of a global assignment");
  refine_cmd->add_option("--data", refine.data, "Data directory or embedding prefix")->required();
  refine_cmd->add_option("--global", refine.global, "Global assignment CSV")->required()->check(CLI::ExistingFile);
  refine_cmd->add_option("--local", refine.local, "Per-camera local assignment CSVs")
      ->required()
      ->check(CLI::ExistingFile);
  refine_cmd->add_option("--out", refine.out, "Output directory")->required();
  refine_cmd->add_option("--config", refine.config, "Training config")->check(CLI::ExistingFile);
  refine_cmd->add_option("--p", refine.p, "Discard probability (default: refine.p_start)");
  refine_cmd->add_option("--ckpt", refine.ckpt, "Score pivots on features from this checkpoint");

  TrainArgs train;
  auto* train_cmd = app.add_subcommand("train", "Two-stage training");
  train_cmd->add_option("--config", train.config_path, "key: value training config")
      ->required()
      ->check(CLI::ExistingFile);
  train_cmd->add_option("--data", train.data, "Data directory or embedding prefix")->required();
  train_cmd->add_option("--out", train.out, "Run directory")->required();
  train_cmd->add_option("--eval-data", train.eval_data, "Evaluation set (default: <data>/test when present)");

  EvalArgs evaluate;
  auto* eval_cmd = app.add_subcommand("eval", "Retrieval and clustering metrics for a checkpoint");
  eval_cmd->add_option("--ckpt", evaluate.ckpt, "Checkpoint prefix")->required();
  eval_cmd->add_option("--data", evaluate.data, "Data directory or embedding prefix")->required();
  eval_cmd->add_option("--split", evaluate.split, "Query/gallery split CSV")->check(CLI::ExistingFile);
  eval_cmd->add_option("--config", evaluate.config, "Training config for graph and rank settings")
      ->check(CLI::ExistingFile);
  eval_cmd->add_option("--out", evaluate.out, "Also write eval.json and a manifest here");

  SweepArgs sweep;
  auto* sweep_cmd = app.add_subcommand("sweep", "Train every point of a grid at one seed");
  sweep_cmd->add_option("--config", sweep.config_path, "Base training config")
      ->required()
      ->check(CLI::ExistingFile);
  sweep_cmd->add_option("--data", sweep.data, "Data directory or embedding prefix")->required();
  sweep_cmd->add_option("--out", sweep.out, "Sweep directory")->required();
  sweep_cmd->add_option("--axis", sweep.axis, "schedule, beta or ablation")
      ->required()
      ->check(CLI::IsMember({"schedule", "beta", "ablation"}));
  sweep_cmd->add_option("--grid", sweep.grid, "Comma-separated grid (default: the axis' standard grid)")
      ->delimiter(',');
  sweep_cmd->add_option("--eval-data", sweep.eval_data, "Evaluation set (default: <data>/test)");

  ReportArgs report;
  auto* report_cmd = app.add_subcommand("report", "Plot-ready series from run directories");
  report_cmd->add_option("--run", report.runs, "Run directory (repeatable)")->required();
  report_cmd->add_option("--out", report.out, "Output directory")->required();

  std::vector<std::string> reversed(args.rbegin(), args.rend());
  try {
    app.parse(reversed);
  } catch (const CLI::CallForHelp&) {
    out << app.help();
    return kExitOk;
  } catch (const CLI::CallForAllHelp&) {
    out << app.help("", CLI::AppFormatMode::All);
    return kExitOk;
  } catch (const CLI::CallForVersion&) {
    out << tool_version() << "\n";
    return kExitOk;
  } catch (const CLI::ParseError& e) {
    err << "calr: " << e.what() << "\nRun 'calr --help' for usage.\n";
    return kExitUsage;
  }

  Context ctx;
  ctx.out = &out;
  ctx.err = &err;
  ctx.argv.push_back("calr");
  ctx.argv.insert(ctx.argv.end(), args.begin(), args.end());
  if (threads > 0) ctx.threads = threads;

  try {
    ctx.seed = seed_from_env();
    if (*synth_cmd) return cmd_synth(synth, ctx);
    if (*cluster_cmd) return cmd_cluster(cluster, ctx);
    if (*refine_cmd) return cmd_refine(refine, ctx);
    if (*train_cmd) return cmd_train(train, ctx);
    if (*eval_cmd) return cmd_eval(evaluate, ctx);
    if (*sweep_cmd) return cmd_sweep(sweep, ctx);
    if (*report_cmd) return cmd_report(report, ctx);
  } catch (const UsageError& e) {
    err << "calr: " << e.what() << "\nRun 'calr --help' for usage.\n";
    return kExitUsage;
  } catch (const std::exception& e) {
    err << "calr: error: " << e.what() << "\n";
    return kExitFailure;
  }
  err << "calr: no subcommand given\n";
  return kExitUsage;
}

}  // namespace calr::cli
