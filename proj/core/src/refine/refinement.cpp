#include "calr/refine/refinement.hpp"

#include "calr/core/error.hpp"
#include "calr/core/numeric.hpp"

#include <algorithm>
#include <string>

namespace calr::refine {

ClusterRefinement refine_cluster(ClusterId cluster, std::span<const std::size_t> members,
                                 std::span<const PivotScore> scores,
                                 std::span<const CameraId> cameras,
                                 std::span<const ClusterId> local_labels, double p, Rng& rng) {
  if (scores.size() != members.size()) {
    throw InvalidArgument("refine_cluster: scores not aligned with members");
  }
  if (!(p >= 0.0 && p <= 1.0)) throw InvalidArgument("refine_cluster: p must be in [0, 1]");

  std::map<CameraId, std::vector<std::size_t>> by_camera;  // positions into members
  for (std::size_t k = 0; k < members.size(); ++k) by_camera[cameras[members[k]]].push_back(k);

  ClusterRefinement out;
  out.cluster = cluster;
  for (const auto& s : scores) out.n_pivots += s.is_pivot;

  for (const auto& [camera, positions] : by_camera) {
    CameraGroupDecision group;
    group.camera = camera;
    std::optional<std::size_t> gov;
    for (std::size_t k : positions) {
      if (!scores[k].is_pivot) continue;
      if (!gov || scores[k].score > scores[*gov].score ||
          (scores[k].score == scores[*gov].score && scores[k].sample_id < scores[*gov].sample_id)) {
        gov = k;
      }
    }
    if (!gov) {
      for (std::size_t k : positions) group.retained.push_back(members[k]);
    } else {
      group.governor = members[*gov];
      const ClusterId pivot_local = local_labels[members[*gov]];
      for (std::size_t k : positions) {
        const std::size_t row = members[k];
        const bool same_local = k == *gov || (pivot_local != kOutlier && local_labels[row] == pivot_local);
        if (same_local || !rng.bernoulli(p)) {
          group.retained.push_back(row);
        } else {
          group.discarded.push_back(row);
        }
      }
    }
    out.kept.insert(out.kept.end(), group.retained.begin(), group.retained.end());
    out.groups.push_back(std::move(group));
  }
  std::sort(out.kept.begin(), out.kept.end());
  return out;
}

std::vector<ClusterId> merge_local_labels(const EmbeddingDataset& dataset,
                                          std::span<const ClusterAssignment> per_camera) {
  std::vector<const ClusterAssignment*> of_camera(static_cast<std::size_t>(dataset.n_cameras()), nullptr);
  for (const auto& a : per_camera) {
    if (a.scope().kind != AssignmentScope::Kind::Camera || a.scope().camera < 0 ||
        a.scope().camera >= dataset.n_cameras()) {
      throw InvalidArgument("merge_local_labels: every local assignment needs a camera scope");
    }
    a.validate_against(dataset);
    of_camera[static_cast<std::size_t>(a.scope().camera)] = &a;
  }
  std::vector<ClusterId> labels(dataset.size(), kOutlier);
  for (std::size_t i = 0; i < dataset.size(); ++i) {
    const CameraId c = dataset.samples()[i].camera_id;
    const auto* a = of_camera[static_cast<std::size_t>(c)];
    if (!a) {
      throw InvalidArgument("merge_local_labels: no local assignment for camera " + std::to_string(c));
    }
    labels[i] = (*a)[i];
  }
  return labels;
}

RefinementPlan refine_assignment(const EmbeddingDataset& dataset, const Matrix& features,
                                 const ClusterAssignment& global,
                                 std::span<const ClusterId> local_labels, double p, const Rng& rng,
                                 const RefineOptions& options) {
  global.validate_against(dataset);
  if (local_labels.size() != dataset.size() ||
      static_cast<std::size_t>(features.rows()) != dataset.size()) {
    throw InvalidArgument("refine_assignment: features/local labels not aligned with dataset");
  }
  const auto cameras = dataset.camera_labels();
  const auto members = global.members();

  RefinementPlan plan;
  plan.p = p;
  plan.clusters.resize(members.size());
  parallel_for(members.size(), options.threads, [&](std::size_t k) {
    const auto& rows = members[k];
    Matrix sub(static_cast<Eigen::Index>(rows.size()), features.cols());
    std::vector<std::int64_t> ids(rows.size());
    for (std::size_t r = 0; r < rows.size(); ++r) {
      sub.row(static_cast<Eigen::Index>(r)) = features.row(static_cast<Eigen::Index>(rows[r]));
      ids[r] = dataset.samples()[rows[r]].sample_id;
    }
    const auto scores = pivot_scores_from_features(sub, ids, options.max_neighbors);
    Rng cluster_rng = rng.split(static_cast<std::uint64_t>(k));
    plan.clusters[k] = refine_cluster(static_cast<ClusterId>(k), rows, scores, cameras,
                                      local_labels, p, cluster_rng);
  });

  std::vector<int> raw(dataset.size(), kOutlier);
  for (const auto& c : plan.clusters) {
    plan.n_pivots += c.n_pivots;
    for (std::size_t row : c.kept) raw[row] = c.cluster;
    for (const auto& g : c.groups) {
      const std::size_t total = g.retained.size() + g.discarded.size();
      plan.n_clustered += total;
      plan.clustered_per_camera[g.camera] += total;
      plan.n_discarded += g.discarded.size();
      plan.discarded_per_camera[g.camera] += g.discarded.size();
    }
  }
  // Every cluster keeps at least its governing pivot, so ids stay contiguous.
  plan.refined = ClusterAssignment(std::move(raw), AssignmentScope::global());
  return plan;
}

}  // namespace calr::refine
