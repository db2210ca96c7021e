#include <benchmark/benchmark.h>

#include <algorithm>
#include <random>

#include "ibprof/ibprof.hpp"

using namespace ibprof;

namespace {

struct Bench {
  Graph graph;
  Partition partition;
  std::vector<double> x;
};

Bench planted(std::size_t block) {
  SBMSpec spec;
  spec.block_sizes = {block, block, block, block};
  spec.p_within = std::min(1.0, 16.0 / double(block));
  spec.q_between = 2.0 / double(block);
  spec.seed = 7;
  auto [g, p] = sbm(spec);
  std::mt19937_64 rng(11);
  std::vector<double> x(g.node_count());
  for (double& v : x) v = std::uniform_real_distribution<double>(0, 1)(rng);
  return {std::move(g), std::move(p), std::move(x)};
}

}  // namespace

static void BM_SpectralRadius(benchmark::State& state) {
  auto inst = planted(static_cast<std::size_t>(state.range(0)));
  for (auto _ : state) benchmark::DoNotOptimize(spectral_radius(inst.graph).value);
}
BENCHMARK(BM_SpectralRadius)->RangeMultiplier(4)->Range(16, 1024);

static void BM_ProfileScalar(benchmark::State& state) {
  auto inst = planted(static_cast<std::size_t>(state.range(0)));
  auto s = stratify_arcs(inst.graph, inst.partition);
  for (auto _ : state) benchmark::DoNotOptimize(profile_scalar(s, inst.x));
  state.SetItemsProcessed(state.iterations() * static_cast<std::int64_t>(inst.graph.arcs().size()));
}
BENCHMARK(BM_ProfileScalar)->RangeMultiplier(4)->Range(16, 1024);

static void BM_EndemicEquilibrium(benchmark::State& state) {
  auto inst = planted(static_cast<std::size_t>(state.range(0)));
  for (auto _ : state) benchmark::DoNotOptimize(endemic_equilibrium(inst.graph, {0.5, 1.0}).x_star);
}
BENCHMARK(BM_EndemicEquilibrium)->RangeMultiplier(4)->Range(16, 256);

static void BM_CheegerBruteforce(benchmark::State& state) {
  const auto n = static_cast<std::size_t>(state.range(0));
  std::mt19937_64 rng(3);
  std::vector<Arc> arcs;
  for (NodeId v = 0; v < n; ++v) arcs.push_back({v, static_cast<NodeId>((v + 1) % n), 1.0});
  for (NodeId a = 0; a < n; ++a)
    for (NodeId b = 0; b < n; ++b)
      if (a != b && rng() % 4 == 0) arcs.push_back({a, b, 1.0});
  auto g = Graph::build(n, arcs, Directedness::Directed);
  const auto p = transition_matrix(g, WalkSpec::lazy());
  const auto phi = stationary(p).phi;
  for (auto _ : state) benchmark::DoNotOptimize(cheeger_constant_bruteforce(phi, p).h);
}
BENCHMARK(BM_CheegerBruteforce)->DenseRange(8, 16, 4)->Unit(benchmark::kMillisecond);
BENCHMARK_MAIN();
