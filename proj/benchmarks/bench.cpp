// Micro benchmarks for the hot paths: Lie group maps, system assembly and
// factorization, whole-graph solves, and incremental hierarchy maintenance.
// Run the binary directly; these are not part of the test suite.

#include <random>
#include <vector>

#include <benchmark/benchmark.h>

#include "hpgo/hierarchy.hpp"
#include "hpgo/optimizer.hpp"
#include "hpgo/phpgo.hpp"
#include "hpgo/se3.hpp"
#include "hpgo/sim.hpp"

namespace hpgo {
namespace {

Twist random_twist(std::mt19937_64& gen) {
  std::normal_distribution<double> n(0.0, 0.3);
  Vector6d v;
  for (int i = 0; i < 6; ++i) v[i] = n(gen);
  return Twist(v);
}

void BM_PoseExpLog(benchmark::State& state) {
  std::mt19937_64 gen(1);
  std::vector<Twist> twists;
  for (int i = 0; i < 256; ++i) twists.push_back(random_twist(gen));
  std::size_t k = 0;
  for (auto _ : state) {
    const Pose p = Pose::exp(twists[k++ % twists.size()]);
    benchmark::DoNotOptimize(p.log().vector());
  }
}
BENCHMARK(BM_PoseExpLog);

void BM_ErrorJacobians(benchmark::State& state) {
  std::mt19937_64 gen(2);
  const Pose xi = Pose::exp(random_twist(gen));
  const Pose xj = Pose::exp(random_twist(gen));
  const Pose zij = Pose::exp(random_twist(gen));
  for (auto _ : state) {
    auto [ji, jj] = error_jacobians(xi, xj, zij);
    benchmark::DoNotOptimize(ji);
    benchmark::DoNotOptimize(jj);
  }
}
BENCHMARK(BM_ErrorJacobians);

SimResult sized_sim(int nodes) {
  SimConfig cfg;
  cfg.nodes = nodes;
  cfg.seed = 17;
  return simulate(cfg);
}

void BM_BuildSystem(benchmark::State& state) {
  const SimResult r = sized_sim(static_cast<int>(state.range(0)));
  std::vector<NodeId> free;
  for (const auto& [id, pose] : r.graph.nodes()) {
    (void)pose;
    if (id != 0) free.push_back(id);
  }
  for (auto _ : state) {
    benchmark::DoNotOptimize(build_system(r.graph, free).b.sum());
  }
}
BENCHMARK(BM_BuildSystem)->Arg(500)->Arg(2000);

void BM_SolveSystem(benchmark::State& state) {
  const SimResult r = sized_sim(static_cast<int>(state.range(0)));
  std::vector<NodeId> free;
  for (const auto& [id, pose] : r.graph.nodes()) {
    (void)pose;
    if (id != 0) free.push_back(id);
  }
  const LinearSystem sys = build_system(r.graph, free);
  for (auto _ : state) {
    benchmark::DoNotOptimize(solve_system(sys, 1e-4).sum());
  }
}
BENCHMARK(BM_SolveSystem)->Arg(500)->Arg(2000);

void BM_OptimizeFull(benchmark::State& state) {
  const SimResult r = sized_sim(static_cast<int>(state.range(0)));
  for (auto _ : state) {
    PoseGraph g = r.graph;
    benchmark::DoNotOptimize(optimize(g).chi2_final);
  }
}
BENCHMARK(BM_OptimizeFull)->Arg(500)->Arg(2000)->Unit(benchmark::kMillisecond);

void BM_OptimizePartial(benchmark::State& state) {
  const SimResult r = sized_sim(static_cast<int>(state.range(0)));
  const NodeId last = r.graph.nodes().rbegin()->first;
  for (auto _ : state) {
    Hierarchy h = Hierarchy::from_graph(r.graph);
    benchmark::DoNotOptimize(
        optimize_mode(h, OptimizeMode::Partial, last).chi2_final);
  }
}
BENCHMARK(BM_OptimizePartial)
    ->Arg(2000)
    ->Arg(8000)
    ->Unit(benchmark::kMillisecond);

void BM_HierarchyAdd(benchmark::State& state) {
  const SimResult r = sized_sim(static_cast<int>(state.range(0)));
  for (auto _ : state) {
    Hierarchy h;
    for (const auto& [id, pose] : r.graph.nodes()) {
      std::vector<Edge> incident;
      for (std::size_t idx : r.graph.edges_of(id)) {
        const Edge& e = r.graph.edges()[idx];
        if (e.from == id || e.to == id) {
          const NodeId other = e.from == id ? e.to : e.from;
          if (other < id) incident.push_back(e);
        }
      }
      h.add_pose(id, pose, incident);
    }
    benchmark::DoNotOptimize(h.level_count());
  }
}
BENCHMARK(BM_HierarchyAdd)->Arg(2000)->Unit(benchmark::kMillisecond);

}  // namespace
}  // namespace hpgo

BENCHMARK_MAIN();
