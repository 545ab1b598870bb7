#include <benchmark/benchmark.h>

#include "qthermo/geometry.hpp"
#include "qthermo/integrate.hpp"
#include "qthermo/pumping.hpp"

using namespace qthermo;

namespace {

std::vector<BathSpec> planar_baths() {
  BathSpec bl, br;
  bl.axis = Vec3(0, 0, 1);
  bl.strength = 0.03;
  bl.temperature = 1.0;
  br.axis = Vec3(1, 0, 0);
  br.strength = 0.03;
  br.temperature = 1.0;
  return {bl, br};
}

void BM_BuildKernel(benchmark::State& state) {
  const FieldMap map = FieldMap::planar_xz();
  const auto baths = planar_baths();
  VecX X(2);
  X << 0.8, 1.1;
  for (auto _ : state) {
    benchmark::DoNotOptimize(build_kernel(map, baths, X));
  }
}
BENCHMARK(BM_BuildKernel);

void BM_FrozenSolve(benchmark::State& state) {
  const FieldMap map = FieldMap::planar_xz();
  const auto baths = planar_baths();
  VecX X(2);
  X << 0.8, 1.1;
  const Kernel k = build_kernel(map, baths, X);
  for (auto _ : state) {
    benchmark::DoNotOptimize(frozen_steady_state_lab(k));
  }
}
BENCHMARK(BM_FrozenSolve);

void BM_GeoTensor(benchmark::State& state) {
  const FieldMap map = FieldMap::planar_xz();
  const auto baths = planar_baths();
  GeoOptions opts;
  opts.bias = state.range(0) != 0;
  VecX X(2);
  X << 0.8, 1.1;
  for (auto _ : state) {
    benchmark::DoNotOptimize(geo_tensor(map, baths, X, opts));
  }
}
BENCHMARK(BM_GeoTensor)->Arg(0)->Arg(1);

void BM_ChernGrid(benchmark::State& state) {
  const FieldMap lat = FieldMap::synthetic_lattice(1.0, -0.5);
  for (auto _ : state) {
    benchmark::DoNotOptimize(chern_number(lat, static_cast<int>(state.range(0))));
  }
}
BENCHMARK(BM_ChernGrid)->Arg(60)->Arg(200);

void BM_CycleIntegration(benchmark::State& state) {
  const FieldMap map = FieldMap::planar_xz();
  const auto baths = planar_baths();
  const auto proto = Protocol::from_closure(
      2,
      [](double s) {
        VecX X(2);
        X << 1.0 + 0.3 * std::cos(2 * M_PI * s), 1.0 + 0.25 * std::sin(2 * M_PI * s);
        return X;
      },
      static_cast<double>(state.range(0)), true);
  const Vec3 r0 = frozen_steady_state_lab(build_kernel(map, baths, proto.point(0.0)));
  IntegrateOptions io;
  io.samples_per_cycle = 64;
  for (auto _ : state) {
    benchmark::DoNotOptimize(integrate_full(map, baths, proto, r0, io));
  }
}
BENCHMARK(BM_CycleIntegration)->Arg(200)->Arg(800)->Unit(benchmark::kMillisecond);

}  // namespace

BENCHMARK_MAIN();
