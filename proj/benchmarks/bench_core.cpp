#include <benchmark/benchmark.h>

#include "oppnet/engine.hpp"
#include "oppnet/map_graph.hpp"
#include "oppnet/network.hpp"
#include "oppnet/rng.hpp"

namespace oppnet {
namespace {

std::vector<Vec2> scatter(std::size_t n, std::uint64_t seed) {
  Rng rng(seed);
  std::vector<Vec2> out(n);
  for (auto& p : out) p = {rng.uniform(0, 4500), rng.uniform(0, 3400)};
  return out;
}

void BM_DetectBruteForce(benchmark::State& state) {
  const auto pos = scatter(static_cast<std::size_t>(state.range(0)), 1);
  for (auto _ : state) benchmark::DoNotOptimize(detect_contacts(pos, 100.0));
}
BENCHMARK(BM_DetectBruteForce)->Arg(150)->Arg(600);

void BM_DetectSweep(benchmark::State& state) {
  auto pos = scatter(static_cast<std::size_t>(state.range(0)), 1);
  Rng jitter(2);
  ContactDetector detector;
  std::vector<NodePair> out;
  for (auto _ : state) {
    for (auto& p : pos) p = {p.x + jitter.uniform(-1, 1), p.y + jitter.uniform(-1, 1)};
    detector.detect(pos, 100.0, out);
    benchmark::DoNotOptimize(out.data());
  }
}
BENCHMARK(BM_DetectSweep)->Arg(150)->Arg(600);

void BM_ShortestPath(benchmark::State& state) {
  const MapGraph map = generate_map(4500, 3400, 1);
  Rng rng(3);
  const auto n = static_cast<std::uint64_t>(map.size());
  for (auto _ : state) {
    const auto from = static_cast<WaypointId>(rng.uniform_int(0, n - 1));
    const auto to = static_cast<WaypointId>(rng.uniform_int(0, n - 1));
    benchmark::DoNotOptimize(shortest_path(map, from, to));
  }
}
BENCHMARK(BM_ShortestPath);

void BM_SimulateHour(benchmark::State& state) {
  ScenarioConfig c = default_uef_scenario();
  c.protocol = static_cast<ProtocolKind>(state.range(0));
  c.sim_duration = kSecondsPerHour;
  c.warmup = 0.0;
  const MapGraph map = build_map(c);
  RunOptions o;
  o.map = &map;
  for (auto _ : state) benchmark::DoNotOptimize(run(c, 1, o));
  state.SetLabel(std::string(to_string(c.protocol)));
}
BENCHMARK(BM_SimulateHour)
    ->Arg(static_cast<int>(ProtocolKind::epidemic))
    ->Arg(static_cast<int>(ProtocolKind::prophet))
    ->Arg(static_cast<int>(ProtocolKind::bubblerap))
    ->Unit(benchmark::kMillisecond);

}  // namespace
}  // namespace oppnet

BENCHMARK_MAIN();
