#include "calr/model/losses.hpp"

#include <benchmark/benchmark.h>

#include <numeric>

namespace {

using namespace calr;

void BM_BatchObjective(benchmark::State& state) {
  const int batch = static_cast<int>(state.range(0));
  const int clusters = static_cast<int>(state.range(1));
  const int dim = 32;
  Rng rng(1, 0);
  const auto enc = model::EncoderModel::random({model::EncoderArch::Linear, dim, dim, 0}, rng);
  const auto cls = model::DomainClassifier::random(dim, 6, rng);
  Matrix protos(clusters, dim);
  for (int i = 0; i < clusters; ++i) {
    for (int j = 0; j < dim; ++j) protos(i, j) = rng.normal();
  }
  std::vector<ClusterId> ids(static_cast<std::size_t>(clusters));
  std::iota(ids.begin(), ids.end(), 0);
  const auto bank = model::init_memory(ClusterAssignment(ids, AssignmentScope::global()), protos);
  Matrix x(batch, dim);
  std::vector<ClusterId> targets(batch);
  std::vector<CameraId> cams(batch);
  for (int i = 0; i < batch; ++i) {
    for (int j = 0; j < dim; ++j) x(i, j) = rng.normal();
    targets[i] = static_cast<ClusterId>(rng.uniform_index(clusters));
    cams[i] = static_cast<CameraId>(rng.uniform_index(6));
  }
  const std::vector<double> weights(batch, 1.0);
  for (auto _ : state) {
    benchmark::DoNotOptimize(model::batch_objective(enc, cls, bank, x, targets, weights, cams, {}));
  }
}
BENCHMARK(BM_BatchObjective)->Args({16, 100})->Args({64, 100})->Args({64, 1000});

void BM_MemoryUpdate(benchmark::State& state) {
  Rng rng(2, 0);
  const int clusters = 200, dim = 32;
  Matrix protos(clusters, dim);
  for (int i = 0; i < clusters; ++i) {
    for (int j = 0; j < dim; ++j) protos(i, j) = rng.normal();
  }
  std::vector<ClusterId> ids(clusters);
  std::iota(ids.begin(), ids.end(), 0);
  auto bank = model::init_memory(ClusterAssignment(ids, AssignmentScope::global()), protos);
  Vector q = Vector::Ones(dim) / std::sqrt(static_cast<double>(dim));
  ClusterId c = 0;
  for (auto _ : state) {
    bank.update(c, q);
    c = (c + 1) % clusters;
  }
}
BENCHMARK(BM_MemoryUpdate);

}  // namespace

BENCHMARK_MAIN();
