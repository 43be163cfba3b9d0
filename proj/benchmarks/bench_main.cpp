#include <benchmark/benchmark.h>

#include <random>

#include "plm/association.hpp"
#include "plm/infer.hpp"
#include "plm/learn.hpp"
#include "plm/maps.hpp"
#include "plm/synthgen.hpp"

namespace {

plm::GeneratorSpec small_spec(std::size_t frames) {
  auto spec = plm::demo_generator_spec();
  spec.frames = frames;
  return spec;
}

void BM_Posterior(benchmark::State& state) {
  const auto spec = plm::demo_generator_spec();
  const auto cell = plm::truth_model(spec, {7, 5});
  const plm::Query q{{"FN", "yes"}, {{"Occlusion", "largely_occluded"}, {"Weather", "rain"}}};
  for (auto _ : state) benchmark::DoNotOptimize(plm::posterior(spec.network, cell, q));
}
BENCHMARK(BM_Posterior);

void BM_LearnCell(benchmark::State& state) {
  auto spec = small_spec(static_cast<std::size_t>(state.range(0)));
  spec.grid = plm::GridSpec(280.0, 100.0, -140.0, 140.0, -50.0, 50.0);
  const auto data = plm::sample(spec).truth.instances;
  for (auto _ : state) benchmark::DoNotOptimize(plm::learn_cell(data, spec.network, {0, 0}, 0.0));
  state.SetItemsProcessed(static_cast<std::int64_t>(state.iterations() * data.size()));
}
BENCHMARK(BM_LearnCell)->Arg(100)->Arg(1000);

void BM_MatchFrame(benchmark::State& state) {
  std::mt19937_64 rng(1);
  std::uniform_real_distribution<double> pos(0.0, 30.0);
  std::vector<plm::DataInstance> dets, gts;
  for (std::int64_t i = 0; i < state.range(0); ++i) {
    plm::DataInstance d;
    d.id = i;
    d.x = pos(rng);
    d.y = pos(rng);
    gts.push_back(d);
    d.x += 0.5;
    d.role = plm::RecordRole::detection;
    dets.push_back(d);
  }
  for (auto _ : state) benchmark::DoNotOptimize(plm::match_frame(dets, gts, 1.0));
}
BENCHMARK(BM_MatchFrame)->Arg(10)->Arg(70)->Arg(200);

void BM_PlmMap(benchmark::State& state) {
  const auto spec = plm::demo_generator_spec();
  plm::LearnedModel m;
  m.grid = spec.grid;
  m.network = spec.network;
  for (std::size_t k = 0; k < spec.grid.cell_count(); ++k) m.cells.push_back(plm::truth_model(spec, spec.grid.cell_at(k)));
  for (auto _ : state) benchmark::DoNotOptimize(plm::plm(m, {"FN", "yes"}));
}
BENCHMARK(BM_PlmMap);

}  // namespace

BENCHMARK_MAIN();
