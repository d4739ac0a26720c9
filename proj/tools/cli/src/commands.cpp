#include "calr/cli/commands.hpp"

#include "calr/cli/manifest.hpp"
#include "calr/cli/run_files.hpp"
#include "calr/core/embedding_io.hpp"
#include "calr/core/error.hpp"
#include "calr/core/rng.hpp"
#include "calr/eval/cluster_quality.hpp"
#include "calr/eval/retrieval.hpp"
#include "calr/graphcluster/agglomerative.hpp"
#include "calr/graphcluster/infomap.hpp"
#include "calr/graphcluster/knn_graph.hpp"
#include "calr/model/checkpoint.hpp"
#include "calr/refine/refinement.hpp"

#include <json.hpp>

#include <algorithm>
#include <cctype>
#include <fstream>
#include <map>
#include <sstream>

namespace calr::cli {
namespace {

using Json = nlohmann::ordered_json;

Json quality_json(const std::optional<eval::ClusterQuality>& q) {
  if (!q) return nullptr;
  auto opt = [](const std::optional<double>& v) { return v ? Json(*v) : Json(nullptr); };
  return Json{{"pair_precision", opt(q->pair_precision)},
              {"pair_recall", opt(q->pair_recall)},
              {"f_score", q->f_score},
              {"expansion", q->expansion}};
}

Json retrieval_json(const std::optional<eval::RetrievalResult>& r) {
  if (!r) return nullptr;
  Json j{{"mAP", r->mAP}, {"cmc", r->cmc}, {"n_queries", r->n_queries},
         {"n_unanswerable", r->n_unanswerable}};
  for (std::size_t k : {1, 5, 10}) {
    j["rank" + std::to_string(k)] = k <= r->cmc.size() ? Json(r->cmc[k - 1]) : Json(nullptr);
  }
  return j;
}

void write_json(const fs::path& path, const Json& j) { write_text(path, j.dump(2) + "\n"); }

std::optional<eval::ClusterQuality> quality_if_labelled(const EmbeddingDataset& ds,
                                                        const ClusterAssignment& a) {
  if (!ds.has_ground_truth()) return std::nullopt;
  return eval::cluster_quality(a, ds.gt_labels());
}

graph::InfomapResult global_clustering(const Matrix& features, const pipeline::TrainConfig& config) {
  auto knn = config.knn;
  knn.k = std::min<int>(knn.k, static_cast<int>(features.rows()) - 1);
  const auto g = graph::build_knn_graph(features, knn, config.threads);
  Rng rng(config.seed, streams::kInfomap);
  graph::InfomapOptions opts;
  opts.trials = config.infomap_trials;
  return graph::infomap_cluster(g.graph, rng, opts);
}

Matrix maybe_encode(const EmbeddingDataset& ds, const std::optional<fs::path>& ckpt,
                    std::vector<fs::path>& inputs) {
  if (!ckpt) return ds.features();
  const auto ck = model::load_checkpoint(*ckpt);
  inputs.push_back(EmbeddingFiles::at(*ckpt).header);
  inputs.push_back(EmbeddingFiles::at(*ckpt).blob);
  return ck.encoder.embed(ds.features());
}

std::string lower(std::string s) {
  std::transform(s.begin(), s.end(), s.begin(), [](unsigned char c) { return std::tolower(c); });
  return s;
}

std::string point_slug(const std::string& axis, const std::string& value) {
  std::string v = lower(value);
  std::erase(v, '+');
  for (auto& ch : v) {
    if (!std::isalnum(static_cast<unsigned char>(ch)) && ch != '.' && ch != '-') ch = '_';
  }
  return axis + "_" + v;
}

std::string delta_text(const std::vector<std::pair<std::string, std::string>>& delta) {
  std::string s;
  for (const auto& [k, v] : delta) s += (s.empty() ? "" : ";") + k + "=" + v;
  return s;
}

std::string fmt_metric(double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.10g", v);
  return buf;
}

/// Outcome of one training run written to a run directory.
struct RunOutcome {
  std::optional<eval::RetrievalResult> final_retrieval;
  bool reused = false;
};

// Writes a complete training run into `dir`: config snapshot, streamed epoch
// stats, local assignments, checkpoint, report and manifest. report.json is
// removed first and only rewritten on success, so its absence marks an
// interrupted run.
RunOutcome run_training(const EmbeddingDataset& ds, const fs::path& data_prefix_path,
                        const std::optional<EvalSource>& eval_src, const pipeline::TrainConfig& config,
                        const fs::path& dir, const Context& ctx, const std::string& command) {
  Stopwatch sw;
  fs::create_directories(dir);
  fs::remove(dir / layout::kReport);
  write_text(dir / layout::kConfig, pipeline::to_text(config));

  std::ofstream stats(dir / layout::kEpochStats, std::ios::binary | std::ios::trunc);
  if (!stats) throw IoError("cannot write " + (dir / layout::kEpochStats).string());
  stats << pipeline::epoch_stats_csv_header() << std::flush;
  auto on_epoch = [&](const pipeline::EpochStats& s) { stats << pipeline::epoch_stats_csv_row(s) << std::flush; };

  std::optional<pipeline::EvalData> eval_data;
  if (eval_src) eval_data = pipeline::EvalData{eval_src->dataset, eval_src->split};
  const auto result = pipeline::train(ds, config, eval_data ? &*eval_data : nullptr, on_epoch);
  stats.close();

  std::vector<fs::path> outputs{layout::kConfig, layout::kEpochStats};
  for (const auto& local : result.stage1.local) {
    const auto file = local_assignment_file(dir, local.scope().camera);
    save_assignment_csv(ds, local, file);
    outputs.push_back(file.filename());
  }
  model::save_checkpoint({result.stage2.encoder, result.stage2.classifier}, dir / layout::kCheckpoint);
  outputs.emplace_back(std::string(layout::kCheckpoint) + ".hdr");
  outputs.emplace_back(std::string(layout::kCheckpoint) + ".bin");

  Json report;
  report["status"] = "complete";
  report["intra_epochs"] = config.intra_epochs;
  report["inter_epochs"] = config.inter_epochs;
  report["epochs_completed"] = result.stage2.stats.size();
  report["final_retrieval"] = retrieval_json(result.report.final_retrieval);
  if (!result.stage2.stats.empty()) {
    const auto& last = result.stage2.stats.back();
    report["final_n_clusters"] = last.n_clusters;
    report["final_n_outliers"] = last.n_outliers;
    report["final_refined_quality"] = quality_json(last.refined_quality);
  }
  report["warnings"] = result.report.warnings;
  write_json(dir / layout::kReport, report);
  outputs.emplace_back(layout::kReport);

  for (const auto& w : result.report.warnings) *ctx.err << "warning: " << w << "\n";

  RunManifest m;
  m.command = command;
  m.argv = ctx.argv;
  m.config = pipeline::to_text(config);
  m.seed = config.seed;
  m.inputs = embedding_files(data_prefix_path);
  if (eval_src) {
    const auto files = embedding_files(eval_src->prefix);
    m.inputs.insert(m.inputs.end(), files.begin(), files.end());
    if (eval_src->split_file) m.inputs.push_back(*eval_src->split_file);
  }
  m.outputs = outputs;
  m.duration_seconds = sw.seconds();
  write_manifest(m, dir);
  return {result.report.final_retrieval, false};
}

// A sweep point directory can be reused when it finished with exactly this config.
std::optional<RunOutcome> reusable_run(const fs::path& dir, const pipeline::TrainConfig& config) {
  if (!fs::is_regular_file(dir / layout::kReport) || !fs::is_regular_file(dir / layout::kConfig)) {
    return std::nullopt;
  }
  if (read_text(dir / layout::kConfig) != pipeline::to_text(config)) return std::nullopt;
  const auto j = Json::parse(read_text(dir / layout::kReport), nullptr, false);
  if (j.is_discarded() || j.value("status", "") != "complete") return std::nullopt;
  RunOutcome out{std::nullopt, true};
  const auto& r = j["final_retrieval"];
  if (r.is_object()) {
    eval::RetrievalResult rr;
    rr.mAP = r.at("mAP").get<double>();
    rr.cmc = r.at("cmc").get<std::vector<double>>();
    rr.n_queries = r.at("n_queries").get<std::size_t>();
    rr.n_unanswerable = r.at("n_unanswerable").get<std::size_t>();
    out.final_retrieval = rr;
  }
  return out;
}

std::vector<std::string> split_csv(const std::string& line) {
  std::vector<std::string> cells;
  std::string cell;
  std::istringstream ss(line);
  while (std::getline(ss, cell, ',')) cells.push_back(cell);
  if (!line.empty() && line.back() == ',') cells.emplace_back();
  return cells;
}

std::string run_id_of(const fs::path& run) {
  auto p = fs::absolute(run).lexically_normal();
  if (p.filename().empty()) p = p.parent_path();
  return p.filename().string();
}

}  // namespace

std::vector<std::string> default_grid(const std::string& axis) {
  if (axis == "schedule") return {"none", "linear", "polynomial", "exponential", "cosine"};
  if (axis == "beta") return {"0", "0.2", "0.4", "0.6", "0.8", "1.0", "1.5"};
  if (axis == "ablation") return {"baseline", "+CA", "+LR", "full"};
  throw UsageError("unknown sweep axis '" + axis + "' (expected schedule, beta or ablation)");
}

std::vector<std::pair<std::string, std::string>> sweep_delta(const std::string& axis,
                                                           const std::string& value) {
  if (axis == "schedule") {
    try {
      return {{"refine.schedule", std::string(refine::to_string(refine::parse_schedule(lower(value))))}};
    } catch (const InvalidArgument& e) {
      throw UsageError(e.what());
    }
  }
  if (axis == "beta") return {{"loss.beta", value}};
  if (axis == "ablation") {
    const auto v = lower(value);
    auto flags = [](bool lr, bool ca) {
      return std::vector<std::pair<std::string, std::string>>{
          {"ablation.use_refinement", lr ? "true" : "false"},
          {"ablation.use_domain_alignment", ca ? "true" : "false"}};
    };
    if (v == "baseline") return flags(false, false);
    if (v == "+ca" || v == "ca") return flags(false, true);
    if (v == "+lr" || v == "lr") return flags(true, false);
    if (v == "full") return flags(true, true);
    throw UsageError("unknown ablation point '" + value + "' (expected baseline, +CA, +LR or full)");
  }
  throw UsageError("unknown sweep axis '" + axis + "'");
}

int cmd_synth(const SynthArgs& args, const Context& ctx) {
  const auto config = load_synth_config(args.config, args.standard, ctx);
  check_output_dir(args.out);
  Stopwatch sw;
  const auto bundle = synth::generate_bundle(config);

  fs::create_directories(args.out);
  std::vector<fs::path> outputs;
  save_embeddings(bundle.train, args.out / layout::kData);
  for (const auto& f : embedding_files(fs::path(layout::kData))) outputs.push_back(f);
  write_text(args.out / layout::kSynthSidecar, synth::to_text(config));
  outputs.emplace_back(layout::kSynthSidecar);

  const EmbeddingDataset& eval_set = bundle.test ? *bundle.test : bundle.train;
  if (bundle.test) {
    save_embeddings(*bundle.test, args.out / layout::kTest);
    for (const auto& f : embedding_files(fs::path(layout::kTest))) outputs.push_back(f);
  }
  try {
    Rng rng(config.seed, streams::kSplit);
    const auto split = synth::split_query_gallery(eval_set, rng);
    synth::save_split_csv(eval_set, split, args.out / layout::kSplit);
    outputs.emplace_back(layout::kSplit);
  } catch (const InvalidArgument& e) {
    *ctx.err << "warning: no query/gallery split written: " << e.what() << "\n";
  }

  RunManifest m;
  m.command = "synth";
  m.argv = ctx.argv;
  m.config = synth::to_text(config);
  m.seed = config.seed;
  if (args.config) m.inputs.push_back(*args.config);
  m.outputs = outputs;
  m.duration_seconds = sw.seconds();
  write_manifest(m, args.out);
  *ctx.out << "synth: " << bundle.train.size() << " training samples";
  if (bundle.test) *ctx.out << ", " << bundle.test->size() << " evaluation samples";
  *ctx.out << " -> " << args.out.string() << "\n";
  return 0;
}

int cmd_cluster(const ClusterArgs& args, const Context& ctx) {
  const auto config = load_train_config(args.config, ctx);
  if (args.scope != "global" && args.scope != "camera") {
    throw UsageError("--scope must be 'global' or 'camera'");
  }
  check_output_dir(args.out);
  Stopwatch sw;
  const auto prefix = data_prefix(args.data);
  const auto ds = load_embeddings(prefix);
  std::vector<fs::path> inputs = embedding_files(prefix);
  const Matrix features = maybe_encode(ds, args.ckpt, inputs);

  Json summary;
  summary["scope"] = args.scope;
  summary["n_samples"] = ds.size();
  std::vector<fs::path> outputs;
  if (args.scope == "global") {
    if (ds.size() < 2) throw InvalidArgument("global clustering needs at least 2 samples");
    const auto result = global_clustering(features, config);
    fs::create_directories(args.out);
    save_assignment_csv(ds, result.assignment, args.out / "assignment.csv");
    outputs.emplace_back("assignment.csv");
    summary["n_clusters"] = result.assignment.n_clusters();
    summary["n_outliers"] = result.assignment.n_outliers();
    summary["codelength"] = result.partition.codelength;
    summary["quality"] = quality_json(quality_if_labelled(ds, result.assignment));
  } else {
    const auto encoded = ds.with_features(features);
    std::vector<ClusterAssignment> locals;
    for (CameraId c = 0; c < ds.n_cameras(); ++c) {
      const auto n = ds.indices_of_camera(c).size();
      if (n == 0) continue;
      locals.push_back(graph::agglomerative_cluster(encoded, c, graph::intra_camera_cluster_count(n),
                                                    config.linkage));
    }
    fs::create_directories(args.out);
    Json cams = Json::array();
    for (const auto& a : locals) {
      const auto file = local_assignment_file(args.out, a.scope().camera);
      save_assignment_csv(ds, a, file);
      outputs.push_back(file.filename());
      cams.push_back({{"camera", a.scope().camera},
                      {"n_samples", a.size() - a.n_outliers()},
                      {"n_clusters", a.n_clusters()},
                      {"quality", quality_json(quality_if_labelled(ds, a))}});
    }
    summary["cameras"] = cams;
  }
  write_json(args.out / "summary.json", summary);
  outputs.emplace_back("summary.json");

  RunManifest m;
  m.command = "cluster";
  m.argv = ctx.argv;
  m.config = pipeline::to_text(config);
  m.seed = config.seed;
  m.inputs = inputs;
  if (args.config) m.inputs.push_back(*args.config);
  m.outputs = outputs;
  m.duration_seconds = sw.seconds();
  write_manifest(m, args.out);
  *ctx.out << summary.dump(2) << "\n";
  return 0;
}

int cmd_refine(const RefineArgs& args, const Context& ctx) {
  const auto config = load_train_config(args.config, ctx);
  const double p = args.p.value_or(config.p_start);
  if (!(p >= 0.0 && p <= 1.0)) throw UsageError("--p must lie in [0, 1]");
  if (args.local.empty()) throw UsageError("at least one --local assignment is required");
  check_output_dir(args.out);
  Stopwatch sw;
  const auto prefix = data_prefix(args.data);
  const auto ds = load_embeddings(prefix);
  std::vector<fs::path> inputs = embedding_files(prefix);
  const Matrix features = maybe_encode(ds, args.ckpt, inputs);
  const auto global = load_assignment_csv(ds, args.global, AssignmentScope::global());
  const auto locals = load_local_assignments(ds, args.local);
  const auto local_labels = refine::merge_local_labels(ds, locals);
  inputs.push_back(args.global);
  inputs.insert(inputs.end(), args.local.begin(), args.local.end());

  const refine::RefineOptions opts{config.pivot_neighbors, config.threads};
  const auto plan = refine::refine_assignment(ds, features, global, local_labels, p,
                                              Rng(config.seed, streams::kRefinement).split(1), opts);

  fs::create_directories(args.out);
  save_assignment_csv(ds, plan.refined, args.out / "refined.csv");
  Json report;
  report["p"] = p;
  report["n_clustered"] = plan.n_clustered;
  report["n_discarded"] = plan.n_discarded;
  report["discard_ratio"] = plan.discard_ratio();
  report["n_pivots"] = plan.n_pivots;
  report["n_clusters_before"] = global.n_clusters();
  report["n_clusters_after"] = plan.refined.n_clusters();
  Json cams = Json::array();
  for (const auto& [camera, clustered] : plan.clustered_per_camera) {
    const auto it = plan.discarded_per_camera.find(camera);
    const std::size_t discarded = it == plan.discarded_per_camera.end() ? 0 : it->second;
    cams.push_back({{"camera", camera},
                    {"clustered", clustered},
                    {"discarded", discarded},
                    {"discard_ratio", clustered ? static_cast<double>(discarded) / static_cast<double>(clustered) : 0.0}});
  }
  report["per_camera"] = cams;
  Json pivots = Json::array();
  for (const auto& c : plan.clusters) pivots.push_back({{"cluster", c.cluster}, {"n_pivots", c.n_pivots}});
  report["pivots_per_cluster"] = pivots;
  report["quality_before"] = quality_json(quality_if_labelled(ds, global));
  report["quality_after"] = quality_json(quality_if_labelled(ds, plan.refined));
  write_json(args.out / "report.json", report);

  RunManifest m;
  m.command = "refine";
  m.argv = ctx.argv;
  m.config = pipeline::to_text(config);
  m.seed = config.seed;
  m.inputs = inputs;
  if (args.config) m.inputs.push_back(*args.config);
  m.outputs = {"refined.csv", "report.json"};
  m.duration_seconds = sw.seconds();
  write_manifest(m, args.out);
  *ctx.out << "refine: discarded " << plan.n_discarded << " of " << plan.n_clustered
           << " clustered samples (p=" << p << ") -> " << args.out.string() << "\n";
  return 0;
}

int cmd_train(const TrainArgs& args, const Context& ctx) {
  const auto config = load_train_config(args.config_path, ctx);
  check_output_dir(args.out);
  const auto prefix = data_prefix(args.data);
  const auto ds = load_embeddings(prefix);
  const auto eval_prefix = args.eval_data ? std::optional(data_prefix(*args.eval_data))
                                          : implied_eval_prefix(args.data);
  std::optional<EvalSource> eval_src;
  if (eval_prefix) eval_src = load_eval_source(*eval_prefix, std::nullopt, config.seed);

  const auto outcome = run_training(ds, prefix, eval_src, config, args.out, ctx, "train");
  *ctx.out << "train: " << config.intra_epochs << " intra + " << config.inter_epochs
           << " inter epochs -> " << args.out.string();
  if (outcome.final_retrieval) {
    *ctx.out << " (final mAP " << fmt_metric(outcome.final_retrieval->mAP) << ")";
  }
  *ctx.out << "\n";
  return 0;
}

int cmd_eval(const EvalArgs& args, const Context& ctx) {
  const auto config = load_train_config(args.config, ctx);
  if (args.out) check_output_dir(*args.out);
  Stopwatch sw;
  const auto ck = model::load_checkpoint(args.ckpt);
  const auto prefix = implied_eval_prefix(args.data).value_or(data_prefix(args.data));
  const auto src = load_eval_source(prefix, args.split, config.seed);
  if (ck.encoder.config().input_dim != src.dataset.dim()) {
    throw InvalidArgument("checkpoint expects input dim " + std::to_string(ck.encoder.config().input_dim) +
                          ", data has " + std::to_string(src.dataset.dim()));
  }
  const auto retrieval = eval::retrieval_eval(ck.encoder, src.dataset, src.split, config.max_rank);

  Json j;
  j["retrieval"] = retrieval_json(retrieval);
  if (src.dataset.size() >= 2) {
    const auto clusters = global_clustering(ck.encoder.embed(src.dataset.features()), config);
    j["n_clusters"] = clusters.assignment.n_clusters();
    j["cluster_quality"] = quality_json(quality_if_labelled(src.dataset, clusters.assignment));
  } else {
    j["cluster_quality"] = nullptr;
  }
  *ctx.out << j.dump(2) << "\n";

  if (args.out) {
    fs::create_directories(*args.out);
    write_json(*args.out / "eval.json", j);
    RunManifest m;
    m.command = "eval";
    m.argv = ctx.argv;
    m.config = pipeline::to_text(config);
    m.seed = config.seed;
    m.inputs = embedding_files(prefix);
    m.inputs.push_back(EmbeddingFiles::at(args.ckpt).header);
    m.inputs.push_back(EmbeddingFiles::at(args.ckpt).blob);
    if (src.split_file) m.inputs.push_back(*src.split_file);
    m.outputs = {"eval.json"};
    m.duration_seconds = sw.seconds();
    write_manifest(m, *args.out);
  }
  return 0;
}

int cmd_sweep(const SweepArgs& args, const Context& ctx) {
  const auto base = load_train_config(args.config_path, ctx);
  const auto grid = args.grid.empty() ? default_grid(args.axis) : args.grid;
  if (grid.empty()) throw UsageError("sweep grid is empty");
  struct Point {
    std::string value;
    std::vector<std::pair<std::string, std::string>> delta;
    pipeline::TrainConfig config;
    fs::path dir;
  };
  std::vector<Point> points;
  for (const auto& value : grid) {
    Point pt{value, sweep_delta(args.axis, value), {}, args.out / point_slug(args.axis, value)};
    try {
      pt.config = pipeline::config_from_pairs(pt.delta, base);
      pt.config.validate();
    } catch (const InvalidArgument& e) {
      throw UsageError("sweep value '" + value + "': " + e.what());
    }
    if (std::any_of(points.begin(), points.end(), [&](const Point& q) { return q.dir == pt.dir; })) {
      throw UsageError("duplicate sweep value '" + value + "'");
    }
    points.push_back(std::move(pt));
  }
  check_output_dir(args.out);
  Stopwatch sw;
  const auto prefix = data_prefix(args.data);
  const auto ds = load_embeddings(prefix);
  const auto eval_prefix = args.eval_data ? std::optional(data_prefix(*args.eval_data))
                                          : implied_eval_prefix(args.data);
  if (!eval_prefix) {
    throw Error("sweep needs an evaluation set: pass --eval-data or use a data directory holding test.*");
  }
  const auto eval_src = load_eval_source(*eval_prefix, std::nullopt, base.seed);

  fs::create_directories(args.out);
  std::ofstream table(args.out / layout::kSweepTable, std::ios::binary | std::ios::trunc);
  if (!table) throw IoError("cannot write " + (args.out / layout::kSweepTable).string());
  table << "axis,value,delta,mAP,rank1,rank5,rank10,run_dir\n" << std::flush;

  for (const auto& pt : points) {
    RunOutcome outcome;
    try {
      if (auto reused = reusable_run(pt.dir, pt.config)) {
        outcome = *reused;
      } else {
        outcome = run_training(ds, prefix, eval_src, pt.config, pt.dir, ctx, "sweep");
      }
    } catch (const std::exception& e) {
      *ctx.err << "error: sweep point " << args.axis << "=" << pt.value << " failed: " << e.what()
               << "\n       partial table kept in " << (args.out / layout::kSweepTable).string() << "\n";
      return 1;
    }
    const auto& r = outcome.final_retrieval;
    auto rank = [&](std::size_t k) {
      return r && k <= r->cmc.size() ? fmt_metric(r->cmc[k - 1]) : std::string();
    };
    table << args.axis << ',' << pt.value << ',' << delta_text(pt.delta) << ','
          << (r ? fmt_metric(r->mAP) : std::string()) << ',' << rank(1) << ',' << rank(5) << ','
          << rank(10) << ',' << pt.dir.filename().string() << '\n'
          << std::flush;
    *ctx.out << "sweep: " << args.axis << "=" << pt.value << (outcome.reused ? " (reused)" : "")
             << " mAP " << (r ? fmt_metric(r->mAP) : std::string("n/a")) << "\n";
  }
  table.close();

  RunManifest m;
  m.command = "sweep";
  m.argv = ctx.argv;
  m.config = pipeline::to_text(base);
  m.seed = base.seed;
  m.inputs = embedding_files(prefix);
  const auto eval_files = embedding_files(eval_src.prefix);
  m.inputs.insert(m.inputs.end(), eval_files.begin(), eval_files.end());
  if (eval_src.split_file) m.inputs.push_back(*eval_src.split_file);
  m.inputs.push_back(args.config_path);
  m.outputs.emplace_back(layout::kSweepTable);
  for (const auto& pt : points) m.outputs.push_back(pt.dir.filename());
  m.duration_seconds = sw.seconds();
  write_manifest(m, args.out);
  return 0;
}

int cmd_report(const ReportArgs& args, const Context& ctx) {
  if (args.runs.empty()) throw UsageError("at least one --run directory is required");
  check_output_dir(args.out);
  Stopwatch sw;

  struct Series {
    std::string run;
    fs::path dir;
    std::vector<std::map<std::string, std::string>> rows;  // inter-camera rows
    std::optional<int> expected;
    bool complete = false;
  };
  std::vector<Series> series;
  std::map<std::string, int> seen;
  for (const auto& dir : args.runs) {
    const auto stats_file = dir / layout::kEpochStats;
    if (!fs::is_regular_file(stats_file)) {
      throw IoError("run " + dir.string() + " has no " + layout::kEpochStats);
    }
    Series s;
    s.dir = dir;
    s.run = run_id_of(dir);
    if (int n = ++seen[s.run]; n > 1) s.run += "#" + std::to_string(n);
    std::istringstream in(read_text(stats_file));
    std::string line;
    std::getline(in, line);
    const auto header = split_csv(line);
    while (std::getline(in, line)) {
      if (line.empty()) continue;
      const auto cells = split_csv(line);
      if (cells.size() != header.size()) break;  // torn final line of an interrupted run
      std::map<std::string, std::string> row;
      for (std::size_t i = 0; i < header.size(); ++i) row[header[i]] = cells[i];
      if (row["stage"] == "inter") s.rows.push_back(std::move(row));
    }
    if (fs::is_regular_file(dir / layout::kConfig)) {
      const auto cfg = pipeline::config_from_pairs(pipeline::parse_key_values(read_text(dir / layout::kConfig)));
      s.expected = cfg.inter_epochs;
    }
    if (fs::is_regular_file(dir / layout::kReport)) {
      const auto j = Json::parse(read_text(dir / layout::kReport), nullptr, false);
      s.complete = !j.is_discarded() && j.value("status", "") == "complete";
    }
    series.push_back(std::move(s));
  }

  fs::create_directories(args.out);
  std::ofstream discard(args.out / "discard_ratio.csv", std::ios::binary | std::ios::trunc);
  std::ofstream clusters(args.out / "n_clusters.csv", std::ios::binary | std::ios::trunc);
  std::ofstream map(args.out / "map.csv", std::ios::binary | std::ios::trunc);
  if (!discard || !clusters || !map) throw IoError("cannot write report series in " + args.out.string());
  discard << "run,epoch,discard_ratio\n";
  clusters << "run,epoch,n_clusters\n";
  map << "run,epoch,mAP,rank1\n";
  Json index = Json::array();
  for (const auto& s : series) {
    for (const auto& row : s.rows) {
      const auto& epoch = row.at("epoch");
      discard << s.run << ',' << epoch << ',' << row.at("discard_ratio") << '\n';
      clusters << s.run << ',' << epoch << ',' << row.at("n_clusters") << '\n';
      if (!row.at("mAP").empty()) map << s.run << ',' << epoch << ',' << row.at("mAP") << ',' << row.at("rank1") << '\n';
    }
    const bool truncated = !s.complete || (s.expected && static_cast<int>(s.rows.size()) < *s.expected);
    if (truncated) {
      *ctx.err << "warning: run " << s.run << " is incomplete; series end at epoch "
               << (s.rows.empty() ? std::string("0") : s.rows.back().at("epoch")) << "\n";
    }
    index.push_back({{"run", s.run},
                     {"path", s.dir.string()},
                     {"epochs_completed", s.rows.size()},
                     {"epochs_expected", s.expected ? Json(*s.expected) : Json(nullptr)},
                     {"truncated", truncated}});
  }
  discard.close();
  clusters.close();
  map.close();
  write_json(args.out / "runs.json", Json{{"runs", index}});

  RunManifest m;
  m.command = "report";
  m.argv = ctx.argv;
  for (const auto& s : series) m.inputs.push_back(s.dir / layout::kEpochStats);
  m.outputs = {"discard_ratio.csv", "n_clusters.csv", "map.csv", "runs.json"};
  m.duration_seconds = sw.seconds();
  write_manifest(m, args.out);
  *ctx.out << "report: " << series.size() << " run(s) -> " << args.out.string() << "\n";
  return 0;
}

}  // namespace calr::cli
