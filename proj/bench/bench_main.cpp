// Serial reference vs OpenMP kernels on synthetic floor plans.
//
// Run with --benchmark_filter=... to pick one family. The Arg on parallel
// cases is the worker count.

#include <benchmark/benchmark.h>

#include <random>

#include "b2v/embedding.hpp"
#include "b2v/sgns.hpp"
#include "b2v/space_grid.hpp"
#include "b2v/temporal.hpp"
#include "b2v/walks.hpp"

using namespace b2v;

namespace {

struct Floor {
  PropertyGraph graph;
  std::vector<DiscretizedSpace> spaces;
};

// A side x side metre room cut into 1 m cells.
Floor make_floor(int side) {
  Floor f;
  const NodeId space = NodeId::ifc(1);
  f.graph.add_node(space, "IFCSPACE");
  const double s = side;
  f.spaces.push_back(discretize({space, {{0, 0}, {s, 0}, {s, s}, {0, s}}, 0}, 1.0));
  merge_space(f.graph, f.spaces[0]);
  return f;
}

const Floor& floor_plan() {
  static const Floor f = make_floor(30);
  return f;
}

WalkConfig walk_config() {
  WalkConfig wc;
  wc.p = 0.5;
  wc.q = 2.0;
  wc.walk_length = 40;
  wc.walks_per_node = 4;
  return wc;
}

const WalkCorpus& corpus() {
  static const WalkCorpus c = generate_walks_serial(floor_plan().graph, walk_config());
  return c;
}

void BM_WalksSerial(benchmark::State& state) {
  for (auto _ : state) benchmark::DoNotOptimize(generate_walks_serial(floor_plan().graph, walk_config()));
}
BENCHMARK(BM_WalksSerial)->Unit(benchmark::kMillisecond);

void BM_WalksParallel(benchmark::State& state) {
  const int workers = static_cast<int>(state.range(0));
  for (auto _ : state) benchmark::DoNotOptimize(generate_walks(floor_plan().graph, walk_config(), workers));
}
BENCHMARK(BM_WalksParallel)->Arg(1)->Arg(2)->Arg(4)->Unit(benchmark::kMillisecond);

TrainConfig train_config(bool deterministic) {
  TrainConfig tc;
  tc.dimension = 32;
  tc.epochs = 1;
  tc.deterministic = deterministic;
  return tc;
}

void BM_TrainDeterministic(benchmark::State& state) {
  for (auto _ : state) benchmark::DoNotOptimize(train(corpus(), train_config(true)));
}
BENCHMARK(BM_TrainDeterministic)->Unit(benchmark::kMillisecond);

void BM_TrainHogwild(benchmark::State& state) {
  const int workers = static_cast<int>(state.range(0));
  for (auto _ : state) benchmark::DoNotOptimize(train(corpus(), train_config(false), workers));
}
BENCHMARK(BM_TrainHogwild)->Arg(1)->Arg(2)->Arg(4)->Unit(benchmark::kMillisecond);

const EmbeddingMatrix& random_embedding() {
  static const EmbeddingMatrix emb = [] {
    std::vector<NodeId> vocab;
    for (std::int64_t i = 1; i <= 20000; ++i) vocab.push_back(NodeId::ifc(i));
    EmbeddingMatrix m(64, vocab);
    std::mt19937_64 gen(1);
    std::normal_distribution<float> nd;
    for (std::size_t r = 0; r < m.size(); ++r) {
      for (auto& x : m.input(r)) x = nd(gen);
    }
    return m;
  }();
  return emb;
}

void BM_KnnSerial(benchmark::State& state) {
  for (auto _ : state) benchmark::DoNotOptimize(knn_serial(random_embedding(), NodeId::ifc(7), 10));
}
BENCHMARK(BM_KnnSerial)->Unit(benchmark::kMicrosecond);

void BM_KnnParallel(benchmark::State& state) {
  const int workers = static_cast<int>(state.range(0));
  for (auto _ : state) benchmark::DoNotOptimize(knn(random_embedding(), NodeId::ifc(7), 10, {}, workers));
}
BENCHMARK(BM_KnnParallel)->Arg(1)->Arg(2)->Arg(4)->Unit(benchmark::kMicrosecond);

// Twenty occupants wandering for 200 windows.
const std::vector<OccupantFix>& wander() {
  static const std::vector<OccupantFix> fixes = [] {
    std::vector<OccupantFix> out;
    std::mt19937_64 gen(3);
    std::uniform_real_distribution<double> pos(0.0, 30.0);
    for (std::int64_t t = 0; t < 200; ++t) {
      for (std::int64_t o = 1; o <= 20; ++o) {
        out.push_back({NodeId::occupant(o), t * 60, NodeId::ifc(1), {pos(gen), pos(gen)}, std::nullopt});
      }
    }
    return out;
  }();
  return fixes;
}

TemporalConfig temporal_config() {
  TemporalConfig cfg;
  cfg.step = 60;
  return cfg;
}

void BM_SnapshotsSerial(benchmark::State& state) {
  const auto& f = floor_plan();
  for (auto _ : state) {
    benchmark::DoNotOptimize(build_snapshots_serial(f.graph, f.spaces, {}, wander(), temporal_config()));
  }
}
BENCHMARK(BM_SnapshotsSerial)->Unit(benchmark::kMillisecond);

void BM_SnapshotsParallel(benchmark::State& state) {
  const auto& f = floor_plan();
  const int workers = static_cast<int>(state.range(0));
  for (auto _ : state) {
    benchmark::DoNotOptimize(build_snapshots(f.graph, f.spaces, {}, wander(), temporal_config(), workers));
  }
}
BENCHMARK(BM_SnapshotsParallel)->Arg(1)->Arg(2)->Arg(4)->Unit(benchmark::kMillisecond);

}  // namespace

BENCHMARK_MAIN();
