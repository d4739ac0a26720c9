#include "calr/core/error.hpp"
#include "calr/eval/cluster_quality.hpp"
#include "calr/refine/refinement.hpp"
#include "calr/synthgen/synthgen.hpp"
#include "calr/graphcluster/agglomerative.hpp"
#include "calr/graphcluster/infomap.hpp"
#include "calr/graphcluster/knn_graph.hpp"
#include "test_support.hpp"

#include <gtest/gtest.h>

#include <map>
#include <set>

using namespace calr;
using namespace calr::refine;

namespace {

struct Instance {
  std::vector<std::size_t> members;
  std::vector<PivotScore> scores;
  std::vector<CameraId> cameras;
  std::vector<ClusterId> local;
};

Instance random_instance(Rng& rng, std::size_t n_rows) {
  Instance in;
  in.cameras.resize(n_rows);
  in.local.resize(n_rows);
  for (std::size_t r = 0; r < n_rows; ++r) {
    in.cameras[r] = static_cast<CameraId>(rng.uniform_index(4));
    in.local[r] = static_cast<ClusterId>(rng.uniform_index(3));
  }
  const auto m = 1 + rng.uniform_index(std::min<std::size_t>(20, n_rows));
  std::vector<std::size_t> rows(n_rows);
  for (std::size_t r = 0; r < n_rows; ++r) rows[r] = r;
  rng.shuffle(std::span<std::size_t>(rows));
  in.members.assign(rows.begin(), rows.begin() + static_cast<long>(m));
  for (auto r : in.members) {
    // Coarse scores force ties, exercising the sample-id tie-break.
    in.scores.push_back({static_cast<std::int64_t>(r), static_cast<double>(rng.uniform_index(4)), rng.uniform() < 0.4});
  }
  return in;
}

// Independent reading of the refined set at p = 1: per camera, the
// governing pivot's local cluster survives; camera groups with no pivot
// survive whole.
std::set<std::size_t> oracle_keep(const Instance& in) {
  std::map<CameraId, std::vector<std::size_t>> group;  // positions in members
  for (std::size_t k = 0; k < in.members.size(); ++k) group[in.cameras[in.members[k]]].push_back(k);
  std::set<std::size_t> keep;
  for (const auto& [cam, pos] : group) {
    std::optional<std::size_t> gov;
    for (auto k : pos) {
      if (!in.scores[k].is_pivot) continue;
      if (!gov || in.scores[k].score > in.scores[*gov].score ||
          (in.scores[k].score == in.scores[*gov].score && in.scores[k].sample_id < in.scores[*gov].sample_id)) {
        gov = k;
      }
    }
    for (auto k : pos) {
      if (!gov || in.local[in.members[k]] == in.local[in.members[*gov]]) keep.insert(in.members[k]);
    }
  }
  return keep;
}

}  // namespace

TEST(RefineCluster, WorkedExample) {
  // a..e = rows 0..4; cameras 1,1,1,2,2; pivot a; L_a = {a, c}.
  const std::vector<std::size_t> members{0, 1, 2, 3, 4};
  const std::vector<CameraId> cams{1, 1, 1, 2, 2};
  const std::vector<ClusterId> local{0, 1, 0, 5, 6};
  const std::vector<PivotScore> scores{{0, 2.0, true}, {1, 1.0, false}, {2, 1.0, false}, {3, 1.0, false}, {4, 1.0, false}};
  Rng rng(1, 0);
  const auto r = refine_cluster(0, members, scores, cams, local, 1.0, rng);
  EXPECT_EQ(r.kept, (std::vector<std::size_t>{0, 2, 3, 4}));
  ASSERT_EQ(r.groups.size(), 2u);
  EXPECT_EQ(r.groups[0].discarded, std::vector<std::size_t>{1});
  EXPECT_FALSE(r.groups[1].governor.has_value());
}

TEST(RefineCluster, LocalClusterAbsorbsGroup) {
  const std::vector<std::size_t> members{0, 1, 2};
  const std::vector<CameraId> cams{0, 0, 0};
  const std::vector<ClusterId> local{3, 3, 3};
  const std::vector<PivotScore> scores{{0, 1, true}, {1, 1, true}, {2, 0.5, false}};
  for (double p : {0.0, 0.5, 1.0}) {
    Rng rng(2, 0);
    EXPECT_EQ(refine_cluster(0, members, scores, cams, local, p, rng).kept, members);
  }
}

TEST(RefineCluster, ZeroProbabilityKeepsEverything) {
  Rng gen(3, 0);
  for (int t = 0; t < 50; ++t) {
    const auto in = random_instance(gen, 30);
    Rng rng(4, t);
    const auto r = refine_cluster(0, in.members, in.scores, in.cameras, in.local, 0.0, rng);
    EXPECT_EQ(r.kept.size(), in.members.size());
  }
}

TEST(RefineCluster, MatchesSetAlgebraAtFullProbability) {
  Rng gen(5, 0);
  for (int t = 0; t < 200; ++t) {
    const auto in = random_instance(gen, 30);
    Rng rng(6, t);
    const auto r = refine_cluster(0, in.members, in.scores, in.cameras, in.local, 1.0, rng);
    const auto expect = oracle_keep(in);
    EXPECT_EQ(std::set<std::size_t>(r.kept.begin(), r.kept.end()), expect) << "trial " << t;
  }
}

TEST(RefineCluster, NeverDiscardsGovernorOrPivotlessCameras) {
  Rng gen(7, 0);
  for (int t = 0; t < 100; ++t) {
    const auto in = random_instance(gen, 30);
    Rng rng(8, t);
    const auto r = refine_cluster(0, in.members, in.scores, in.cameras, in.local, 0.7, rng);
    const std::set<std::size_t> kept(r.kept.begin(), r.kept.end());
    for (const auto& g : r.groups) {
      if (g.governor) {
        EXPECT_TRUE(kept.count(*g.governor));
      } else {
        EXPECT_TRUE(g.discarded.empty());
      }
      for (auto d : g.discarded) EXPECT_NE(in.local[d], in.local[*g.governor]);
    }
  }
}

TEST(RefineCluster, DiscardRateFollowsProbability) {
  // One camera, pivot's local cluster holds one member, 400 others eligible.
  const std::size_t n = 401;
  std::vector<std::size_t> members(n);
  std::vector<CameraId> cams(n, 0);
  std::vector<ClusterId> local(n, 1);
  std::vector<PivotScore> scores(n);
  for (std::size_t i = 0; i < n; ++i) {
    members[i] = i;
    scores[i] = {static_cast<std::int64_t>(i), i == 0 ? 2.0 : 1.0, i == 0};
  }
  local[0] = 0;
  Rng rng(9, 0);
  const auto r = refine_cluster(0, members, scores, cams, local, 0.3, rng);
  EXPECT_NEAR(static_cast<double>(n - r.kept.size()) / 400.0, 0.3, 0.07);
}

TEST(RefineAssignment, PurityOnSyntheticData) {
  synth::SynthConfig c;
  c.n_identities = 25;
  const auto ds = synth::generate(c);
  std::vector<ClusterAssignment> locals;
  for (CameraId cam = 0; cam < ds.n_cameras(); ++cam) {
    locals.push_back(graph::agglomerative_cluster(ds, cam, graph::intra_camera_cluster_count(ds.indices_of_camera(cam).size())));
  }
  const auto local_labels = merge_local_labels(ds, locals);
  const auto g = graph::build_knn_graph(ds.features(), {15, true, 0.5});
  Rng im(1, 0);
  const auto global = graph::infomap_cluster(g.graph, im).assignment;
  const auto before = eval::cluster_quality(global, ds.gt_labels());
  for (double p : {1.0, 0.5}) {
    const auto plan = refine_assignment(ds, ds.features(), global, local_labels, p, Rng(2, 0));
    const auto after = eval::cluster_quality(plan.refined, ds.gt_labels());
    EXPECT_GE(*after.pair_precision, *before.pair_precision);
    EXPECT_GE(plan.discard_ratio(), 0.0);
    EXPECT_LE(plan.discard_ratio(), 1.0);
    EXPECT_NO_THROW(plan.refined.validate_against(ds));
  }
  const auto none = refine_assignment(ds, ds.features(), global, local_labels, 0.0, Rng(2, 0));
  EXPECT_EQ(none.refined, global);
  EXPECT_EQ(none.n_discarded, 0u);
}

TEST(RefineAssignment, ThreadCountIndependent) {
  synth::SynthConfig c;
  c.n_identities = 15;
  const auto ds = synth::generate(c);
  std::vector<ClusterAssignment> locals;
  for (CameraId cam = 0; cam < ds.n_cameras(); ++cam) {
    locals.push_back(graph::agglomerative_cluster(ds, cam, graph::intra_camera_cluster_count(ds.indices_of_camera(cam).size())));
  }
  const auto local_labels = merge_local_labels(ds, locals);
  Rng im(1, 0);
  const auto global = graph::infomap_cluster(graph::build_knn_graph(ds.features(), {15, true, 0.5}).graph, im).assignment;
  const auto a = refine_assignment(ds, ds.features(), global, local_labels, 0.5, Rng(3, 0), {15, 1});
  const auto b = refine_assignment(ds, ds.features(), global, local_labels, 0.5, Rng(3, 0), {15, 3});
  EXPECT_EQ(a.refined, b.refined);
}

TEST(MergeLocalLabels, RequiresEveryCamera) {
  Matrix f(2, 2);
  f << 1, 0, 0, 1;
  const EmbeddingDataset ds(f, {{0, 0, {}}, {1, 1, {}}}, 2);
  const std::vector<ClusterAssignment> only0{ClusterAssignment({0, kOutlier}, AssignmentScope::for_camera(0))};
  EXPECT_THROW((void)merge_local_labels(ds, only0), InvalidArgument);
}
