#include "calr/pipeline/pipeline.hpp"

#include "calr/core/error.hpp"
#include "calr/core/numeric.hpp"
#include "calr/core/rng.hpp"
#include "calr/graphcluster/agglomerative.hpp"
#include "calr/graphcluster/infomap.hpp"
#include "calr/graphcluster/knn_graph.hpp"
#include "calr/model/adam.hpp"
#include "calr/model/losses.hpp"
#include "calr/model/memory_bank.hpp"
#include "calr/pipeline/sampler.hpp"
#include "calr/refine/refinement.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>

namespace calr::pipeline {
namespace {

Matrix gather_rows(const Matrix& m, const std::vector<std::size_t>& rows) {
  Matrix out(static_cast<Eigen::Index>(rows.size()), m.cols());
  for (std::size_t r = 0; r < rows.size(); ++r) {
    out.row(static_cast<Eigen::Index>(r)) = m.row(static_cast<Eigen::Index>(rows[r]));
  }
  return out;
}

int batches_per_epoch(const TrainConfig& c, std::size_t n_clustered) {
  if (c.iters_per_epoch > 0) return c.iters_per_epoch;
  const auto per_batch = static_cast<std::size_t>(c.labels_per_batch * c.instances_per_label);
  return static_cast<int>(std::max<std::size_t>(1, (n_clustered + per_batch - 1) / per_batch));
}

// Drops clusters the memory bank could not represent so that the trained
// label set and the bank agree exactly.
ClusterAssignment without_dropped(const ClusterAssignment& a, const std::vector<ClusterId>& dropped) {
  if (dropped.empty()) return a;
  std::vector<int> raw(a.labels().begin(), a.labels().end());
  for (auto& l : raw) {
    if (std::find(dropped.begin(), dropped.end(), l) != dropped.end()) l = kOutlier;
  }
  return ClusterAssignment::from_raw(raw, a.scope());
}

struct EpochLosses {
  double inter = 0.0;
  double domain = 0.0;
  double total = 0.0;
};

// One pass of balanced batches over `labels`. Memory entries are updated
// after each optimizer step, one query at a time in batch order.
EpochLosses train_epoch(model::EncoderModel& encoder, model::DomainClassifier* classifier,
                        model::AdamW& enc_opt, model::AdamW* cls_opt, model::MemoryBank& bank,
                        const Matrix& inputs, const std::vector<CameraId>& cameras,
                        const ClusterAssignment& labels, const std::vector<double>& cluster_weights,
                        const TrainConfig& config, bool use_domain, Rng& rng) {
  std::size_t n_clustered = labels.size() - labels.n_outliers();
  const auto batches = make_balanced_batches(labels, bank.cluster_ids(), config.labels_per_batch,
                                             config.instances_per_label,
                                             batches_per_epoch(config, n_clustered), rng);
  model::ObjectiveOptions opts{config.beta, config.lambda, use_domain};
  const model::DomainClassifier no_classifier =
      model::DomainClassifier::zeros(encoder.config().output_dim, 1);
  EpochLosses sum;
  for (const auto& batch : batches) {
    const Matrix x = gather_rows(inputs, batch.rows);
    std::vector<double> w(batch.rows.size());
    std::vector<CameraId> cams(batch.rows.size());
    for (std::size_t i = 0; i < batch.rows.size(); ++i) {
      w[i] = cluster_weights[static_cast<std::size_t>(batch.targets[i])];
      cams[i] = use_domain ? cameras[batch.rows[i]] : 0;
    }
    const auto loss = model::batch_objective(encoder, classifier ? *classifier : no_classifier, bank,
                                             x, batch.targets, w, cams, opts);
    enc_opt.step(encoder.params(), loss.grad_encoder);
    if (use_domain && classifier && cls_opt) cls_opt->step(classifier->params(), loss.grad_classifier);
    for (std::size_t i = 0; i < batch.rows.size(); ++i) {
      bank.update(batch.targets[i], loss.embeddings.row(static_cast<Eigen::Index>(i)).transpose());
    }
    sum.inter += loss.inter;
    sum.domain += loss.domain;
    sum.total += loss.total;
  }
  const double n = static_cast<double>(std::max<std::size_t>(1, batches.size()));
  return {sum.inter / n, sum.domain / n, sum.total / n};
}

std::vector<double> weights_for(const TrainConfig& c, const ClusterAssignment& a,
                                const std::vector<CameraId>& cameras, int n_cameras) {
  return c.cluster_weighting == ClusterWeighting::CameraDiversity
             ? model::camera_diversity_weights(a, cameras, n_cameras)
             : model::uniform_cluster_weights(a, cameras, n_cameras);
}

std::string fmt(double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.10g", v);
  return buf;
}

std::string fmt_opt(const std::optional<double>& v) { return v ? fmt(*v) : std::string(); }

}  // namespace

model::EncoderModel initial_encoder(const TrainConfig& config, int input_dim) {
  model::EncoderConfig ec;
  ec.arch = config.arch;
  ec.input_dim = input_dim;
  ec.output_dim = config.output_dim > 0 ? config.output_dim : input_dim;
  ec.hidden_dim = config.hidden_dim;
  if (config.arch == model::EncoderArch::Linear && config.identity_init) {
    return model::EncoderModel::identity(ec);
  }
  Rng rng(config.seed, streams::kModelInit);
  return model::EncoderModel::random(ec, rng);
}

Stage1Result run_stage1(const EmbeddingDataset& dataset, const TrainConfig& config,
                        const model::EncoderModel& initial) {
  config.validate();
  const int n_cam = dataset.n_cameras();
  Stage1Result result;
  result.encoders.assign(static_cast<std::size_t>(n_cam), initial);
  result.local.resize(static_cast<std::size_t>(n_cam));
  std::vector<std::vector<EpochStats>> per_cam_stats(static_cast<std::size_t>(n_cam));
  std::vector<std::string> per_cam_warning(static_cast<std::size_t>(n_cam));
  const auto cameras = dataset.camera_labels();

  parallel_for(static_cast<std::size_t>(n_cam), config.threads, [&](std::size_t ci) {
    const auto cam = static_cast<CameraId>(ci);
    const auto rows = dataset.indices_of_camera(cam);
    if (rows.size() < 2) {
      std::vector<ClusterId> labels(dataset.size(), kOutlier);
      for (auto r : rows) labels[r] = 0;
      result.local[ci] = ClusterAssignment(std::move(labels), AssignmentScope::for_camera(cam));
      per_cam_warning[ci] = "camera " + std::to_string(cam) + " has " + std::to_string(rows.size()) +
                            " sample(s); assigned a single local cluster without training";
      return;
    }
    const Matrix inputs = gather_rows(dataset.features(), rows);
    std::vector<CameraId> sub_cams(rows.size(), cam);
    const int k = graph::intra_camera_cluster_count(rows.size());
    auto& encoder = result.encoders[ci];
    model::AdamW opt(encoder.params().size(), config.adam);
    Rng rng = Rng(config.seed, streams::kStage1).split(ci);

    for (int epoch = 1; epoch <= config.intra_epochs; ++epoch) {
      const Matrix feats = encoder.embed(inputs);
      const auto local = ClusterAssignment::from_raw(
          graph::agglomerative_labels(feats, k, config.linkage), AssignmentScope::for_camera(cam));
      auto bank = model::init_memory(local, feats, config.momentum, config.temperature);
      const auto labels = without_dropped(local, bank.dropped());
      if (labels.n_clusters() != static_cast<int>(bank.size())) {
        bank = model::init_memory(labels, feats, config.momentum, config.temperature);
      }
      const auto w = weights_for(config, labels, sub_cams, n_cam);
      const auto losses = train_epoch(encoder, nullptr, opt, nullptr, bank, inputs, sub_cams, labels,
                                      w, config, false, rng);
      EpochStats s;
      s.epoch = epoch;
      s.stage = Stage::Intra;
      s.camera = cam;
      s.loss_inter = losses.inter;
      s.loss_total = losses.total;
      s.n_clusters = static_cast<int>(bank.size());
      s.n_outliers = labels.n_outliers();
      per_cam_stats[ci].push_back(s);
    }
    const auto final_labels = graph::agglomerative_labels(encoder.embed(inputs), k, config.linkage);
    std::vector<ClusterId> labels(dataset.size(), kOutlier);
    for (std::size_t r = 0; r < rows.size(); ++r) labels[rows[r]] = final_labels[r];
    result.local[ci] = ClusterAssignment(std::move(labels), AssignmentScope::for_camera(cam));
  });

  for (std::size_t ci = 0; ci < per_cam_stats.size(); ++ci) {
    result.stats.insert(result.stats.end(), per_cam_stats[ci].begin(), per_cam_stats[ci].end());
    if (!per_cam_warning[ci].empty()) result.warnings.push_back(per_cam_warning[ci]);
  }
  return result;
}

Stage2Result run_stage2(const EmbeddingDataset& dataset, const std::vector<ClusterAssignment>& local,
                        const TrainConfig& config, const model::EncoderModel& initial,
                        const EvalData* eval_data, const EpochCallback& on_epoch) {
  config.validate();
  if (dataset.size() < 2) throw InvalidArgument("run_stage2: need at least 2 samples");
  const auto local_labels = refine::merge_local_labels(dataset, local);
  const auto cameras = dataset.camera_labels();
  const bool has_gt = dataset.has_ground_truth();
  const auto gt = has_gt ? dataset.gt_labels() : std::vector<int>{};

  Stage2Result result;
  result.encoder = initial;
  Rng init_rng(config.seed, streams::kModelInit);
  result.classifier = model::DomainClassifier::random(initial.config().output_dim,
                                                      dataset.n_cameras(), init_rng);
  model::AdamW enc_opt(result.encoder.params().size(), config.adam);
  model::AdamW cls_opt(result.classifier.n_params(), config.adam);
  const Rng batch_stream(config.seed, streams::kStage2Batches);
  const Rng refine_stream(config.seed, streams::kRefinement);
  const Rng infomap_stream(config.seed, streams::kInfomap);

  graph::KnnOptions knn = config.knn;
  knn.k = std::min<int>(knn.k, static_cast<int>(dataset.size()) - 1);
  graph::InfomapOptions im;
  im.trials = config.infomap_trials;

  std::optional<ClusterAssignment> previous;
  const int total = config.inter_epochs;
  for (int epoch = 1; epoch <= total; ++epoch) {
    const Matrix feats = result.encoder.embed(dataset.features());
    EpochStats s;
    s.epoch = epoch;
    s.stage = Stage::Inter;
    s.p = refine::decay_probability(config.schedule, epoch - 1, total - 1, config.p_start, config.p_end);

    const auto g = graph::build_knn_graph(feats, knn, config.threads);
    Rng im_rng = infomap_stream.split(static_cast<std::uint64_t>(epoch));
    const auto global = graph::infomap_cluster(g.graph, im_rng, im).assignment;
    if (has_gt) s.global_quality = eval::cluster_quality(global, gt);

    ClusterAssignment refined = global;
    if (config.use_refinement && global.n_clusters() > 0) {
      refine::RefineOptions ro{config.pivot_neighbors, config.threads};
      const auto plan = refine::refine_assignment(dataset, feats, global, local_labels, s.p,
                                                  refine_stream.split(static_cast<std::uint64_t>(epoch)), ro);
      refined = plan.refined;
      s.discard_ratio = plan.discard_ratio();
    }

    if (refined.n_clusters() == 0) {
      s.aborted = true;
      result.warnings.push_back("epoch " + std::to_string(epoch) +
                                ": every sample is an outlier after clustering; reusing previous labels");
      if (!previous) {
        s.n_outliers = refined.n_outliers();
        if (on_epoch) on_epoch(s);
        result.stats.push_back(s);
        continue;
      }
      refined = *previous;
    }

    auto bank = model::init_memory(refined, feats, config.momentum, config.temperature);
    refined = without_dropped(refined, bank.dropped());
    if (refined.n_clusters() != static_cast<int>(bank.size())) {
      bank = model::init_memory(refined, feats, config.momentum, config.temperature);
    }
    if (has_gt) s.refined_quality = eval::cluster_quality(refined, gt);
    s.n_clusters = refined.n_clusters();
    s.n_outliers = refined.n_outliers();

    const auto w = weights_for(config, refined, cameras, dataset.n_cameras());
    Rng batch_rng = batch_stream.split(static_cast<std::uint64_t>(epoch));
    const auto losses = train_epoch(result.encoder, &result.classifier, enc_opt, &cls_opt, bank,
                                    dataset.features(), cameras, refined, w, config,
                                    config.use_domain_alignment, batch_rng);
    s.loss_inter = losses.inter;
    s.loss_domain = losses.domain;
    s.loss_total = losses.total;

    const bool eval_now = eval_data && (epoch == total || (config.eval_every > 0 && epoch % config.eval_every == 0));
    if (eval_now) {
      s.retrieval = eval::retrieval_eval(result.encoder, eval_data->dataset, eval_data->split, config.max_rank);
    }
    previous = refined;
    result.last_refined = refined;
    if (on_epoch) on_epoch(s);
    result.stats.push_back(std::move(s));
  }
  return result;
}

TrainResult train(const EmbeddingDataset& dataset, const TrainConfig& config, const EvalData* eval_data,
                  const EpochCallback& on_epoch) {
  config.validate();
  TrainResult r;
  r.initial_encoder = initial_encoder(config, dataset.dim());
  r.stage1 = run_stage1(dataset, config, r.initial_encoder);
  if (on_epoch) {
    for (const auto& s : r.stage1.stats) on_epoch(s);
  }
  r.stage2 = run_stage2(dataset, r.stage1.local, config, r.initial_encoder, eval_data, on_epoch);
  r.report.stats = r.stage1.stats;
  r.report.stats.insert(r.report.stats.end(), r.stage2.stats.begin(), r.stage2.stats.end());
  r.report.warnings = r.stage1.warnings;
  r.report.warnings.insert(r.report.warnings.end(), r.stage2.warnings.begin(), r.stage2.warnings.end());
  if (!r.stage2.stats.empty() && r.stage2.stats.back().retrieval) {
    r.report.final_retrieval = r.stage2.stats.back().retrieval;
  }
  return r;
}

std::string to_string(Stage stage) { return stage == Stage::Intra ? "intra" : "inter"; }

std::string epoch_stats_csv_header() {
  return "stage,epoch,camera,p,loss_inter,loss_domain,loss_total,n_clusters,n_outliers,discard_ratio,"
       "aborted,global_precision,global_recall,global_fscore,global_expansion,refined_precision,"
       "refined_recall,refined_fscore,refined_expansion,mAP,rank1,rank5,rank10\n";
}

std::string epoch_stats_csv_row(const EpochStats& s) {
  std::ostringstream o;
  auto quality = [&](const std::optional<eval::ClusterQuality>& q) {
    if (!q) return std::string(",,,");
    return fmt_opt(q->pair_precision) + "," + fmt_opt(q->pair_recall) + "," + fmt(q->f_score) + "," +
           fmt(q->expansion);
  };
  o << to_string(s.stage) << ',' << s.epoch << ',';
  if (s.camera >= 0) o << s.camera;
  o << ',' << fmt(s.p) << ',' << fmt(s.loss_inter) << ',' << fmt(s.loss_domain) << ','
    << fmt(s.loss_total) << ',' << s.n_clusters << ',' << s.n_outliers << ','
    << fmt(s.discard_ratio) << ',' << (s.aborted ? 1 : 0) << ',' << quality(s.global_quality)
    << ',' << quality(s.refined_quality) << ',';
  if (s.retrieval) {
    auto rank = [&](std::size_t k) {
      return k <= s.retrieval->cmc.size() ? fmt(s.retrieval->cmc[k - 1]) : std::string();
    };
    o << fmt(s.retrieval->mAP) << ',' << rank(1) << ',' << rank(5) << ',' << rank(10);
  } else {
    o << ",,,";
  }
  o << '\n';
  return o.str();
}

std::string epoch_stats_csv(const std::vector<EpochStats>& stats) {
  std::string out = epoch_stats_csv_header();
  for (const auto& s : stats) out += epoch_stats_csv_row(s);
  return out;
}

void write_epoch_stats_csv(const std::vector<EpochStats>& stats, const std::filesystem::path& path) {
  std::ofstream out(path, std::ios::trunc | std::ios::binary);
  if (!out) throw IoError("cannot write " + path.string());
  out << epoch_stats_csv(stats);
}

}  // namespace calr::pipeline
