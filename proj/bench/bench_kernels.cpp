#include <benchmark/benchmark.h>

#include <random>

#include "prv/pathplan.hpp"
#include "prv/predictor.hpp"
#include "prv/simharness.hpp"
#include "prv/viewspace.hpp"

using namespace prv;

namespace {

Execution mode(const benchmark::State& st) { return st.range(0) ? Execution::Parallel : Execution::Serial; }

void BM_Tammes(benchmark::State& st) {
  TammesOptions opts;
  opts.execution = mode(st);
  for (auto _ : st) benchmark::DoNotOptimize(tammes_unit_hemisphere(35, opts).min_angle);
}

void BM_CostMatrix(benchmark::State& st) {
  const ViewSpace vs = candidate_grid(120, 0.3);
  const ObstacleSphere obs = object_obstacle(Vec3::Zero(), 0.1);
  for (auto _ : st) benchmark::DoNotOptimize(build_cost_matrix(vs, obs, mode(st)).sum());
}

void BM_HeldKarp(benchmark::State& st) {
  std::mt19937_64 rng(1);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  std::vector<Vec3> pts(16);
  for (auto& p : pts) p = Vec3(u(rng), u(rng), u(rng));
  const CostMatrix m = euclidean_cost_matrix(pts);
  for (auto _ : st) benchmark::DoNotOptimize(hamiltonian_path_exact(m, 0, kExactCap, mode(st)).total_length);
}

void BM_Features(benchmark::State& st) {
  const std::vector<NamedView> views{NamedView::Top, NamedView::Left, NamedView::Front, NamedView::Right,
                                     NamedView::Back};
  const auto images = render_initial_images(gen_object(0, 3), views, {256, 144});
  for (auto _ : st) benchmark::DoNotOptimize(extract_features(images, {}, mode(st)).values[0]);
}

}  // namespace

// Arg 0 = serial reference path, 1 = OpenMP.
BENCHMARK(BM_Tammes)->Arg(0)->Arg(1)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_CostMatrix)->Arg(0)->Arg(1)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_HeldKarp)->Arg(0)->Arg(1)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_Features)->Arg(0)->Arg(1)->Unit(benchmark::kMillisecond);

BENCHMARK_MAIN();
