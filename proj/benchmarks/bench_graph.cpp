#include "calr/graphcluster/agglomerative.hpp"
#include "calr/graphcluster/infomap.hpp"
#include "calr/graphcluster/knn_graph.hpp"
#include "calr/refine/refinement.hpp"
#include "calr/synthgen/synthgen.hpp"

#include <benchmark/benchmark.h>

namespace {

calr::EmbeddingDataset dataset(int identities) {
  auto c = calr::synth::standard_benchmark();
  c.n_identities = identities;
  return calr::synth::generate(c);
}

void BM_KnnGraph(benchmark::State& state) {
  const auto ds = dataset(static_cast<int>(state.range(0)));
  for (auto _ : state) benchmark::DoNotOptimize(calr::graph::build_knn_graph(ds.features(), {}));
  state.counters["samples"] = static_cast<double>(ds.size());
}
BENCHMARK(BM_KnnGraph)->Arg(25)->Arg(50)->Arg(100)->Unit(benchmark::kMillisecond);

void BM_Infomap(benchmark::State& state) {
  const auto ds = dataset(static_cast<int>(state.range(0)));
  const auto g = calr::graph::build_knn_graph(ds.features(), {});
  for (auto _ : state) {
    calr::Rng rng(1, 0);
    benchmark::DoNotOptimize(calr::graph::infomap_cluster(g.graph, rng));
  }
  state.counters["edges"] = static_cast<double>(g.graph.edges.size());
}
BENCHMARK(BM_Infomap)->Arg(25)->Arg(50)->Arg(100)->Unit(benchmark::kMillisecond);

void BM_AgglomerativeWard(benchmark::State& state) {
  calr::Rng rng(2, 0);
  const auto n = static_cast<int>(state.range(0));
  calr::Matrix x(n, 32);
  for (int i = 0; i < n; ++i) {
    for (int j = 0; j < 32; ++j) x(i, j) = rng.normal();
  }
  for (auto _ : state) benchmark::DoNotOptimize(calr::graph::agglomerative_labels(x, (n + 4) / 5));
}
BENCHMARK(BM_AgglomerativeWard)->Arg(100)->Arg(300)->Arg(600)->Unit(benchmark::kMillisecond);

void BM_Refinement(benchmark::State& state) {
  const auto ds = dataset(50);
  std::vector<calr::ClusterAssignment> locals;
  for (calr::CameraId c = 0; c < ds.n_cameras(); ++c) {
    const auto n = ds.indices_of_camera(c).size();
    locals.push_back(calr::graph::agglomerative_cluster(ds, c, calr::graph::intra_camera_cluster_count(n)));
  }
  const auto local = calr::refine::merge_local_labels(ds, locals);
  calr::Rng rng(3, 0);
  const auto global =
      calr::graph::infomap_cluster(calr::graph::build_knn_graph(ds.features(), {}).graph, rng).assignment;
  for (auto _ : state) {
    benchmark::DoNotOptimize(calr::refine::refine_assignment(ds, ds.features(), global, local, 1.0, calr::Rng(4, 0)));
  }
}
BENCHMARK(BM_Refinement)->Unit(benchmark::kMillisecond);

}  // namespace
