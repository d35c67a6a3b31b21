#include <benchmark/benchmark.h>

#include <cmath>
#include <vector>

#include "nvscope/acquisition.hpp"
#include "nvscope/analysis/contours.hpp"
#include "nvscope/analysis/rabi_fit.hpp"
#include "nvscope/fieldcore.hpp"
#include "nvscope/nearfield.hpp"

using namespace nvscope;

namespace {

CurrentModel strip_model(int segments) {
  CurrentModel m;
  for (int k = 0; k < segments; ++k) {
    const double x = -60e-6 + 120e-6 * k / std::max(1, segments - 1);
    m.segments.push_back({{x, -1e-3, 0}, {x, 1e-3, 0}, Complex(0.05 / segments, 0)});
  }
  return m;
}

void BM_SegmentField(benchmark::State &st) {
  const WireSegment w{{0, -1e-4, 0}, {0, 1e-4, 0}, Complex(0.05, 0.01)};
  Vec3 p{3e-6, 1e-6, 12e-6};
  for (auto _ : st) {
    benchmark::DoNotOptimize(segment_field(w, p));
    p.x += 1e-12;
  }
}
BENCHMARK(BM_SegmentField);

void BM_PhasorMap(benchmark::State &st) {
  const auto model = strip_model(static_cast<int>(st.range(0)));
  GridSpec g;
  g.origin = {-100e-6, -50e-6, 0};
  g.nx = 64;
  g.ny = 32;
  g.pitch = 3e-6;
  const SensingLayer layer{12e-6, 14e-6, 5};
  for (auto _ : st)
    benchmark::DoNotOptimize(evaluate_phasor_map(model, g, layer, 1));
  st.SetItemsProcessed(st.iterations() * static_cast<long>(g.size()));
}
BENCHMARK(BM_PhasorMap)->Arg(8)->Arg(32)->Unit(benchmark::kMillisecond);

void BM_FitPixel(benchmark::State &st) {
  const auto dt = linear_scan(0, 2000, 100);
  std::vector<double> y;
  for (double t : dt)
    y.push_back(contrast_at(150e-6, t, DecayParams{}, 0.05));
  for (auto _ : st)
    benchmark::DoNotOptimize(analysis::fit_pixel(dt, y, analysis::FitConfig{}));
}
BENCHMARK(BM_FitPixel)->Unit(benchmark::kMicrosecond);

void BM_SimulateCube(benchmark::State &st) {
  GridSpec g;
  g.nx = 64;
  g.ny = 64;
  PolarizedFieldMap m{g, PolarizationComponent::SigmaMinus, std::vector<double>(g.size(), 100e-6)};
  const auto dt = linear_scan(0, 2000, 100);
  for (auto _ : st)
    benchmark::DoNotOptimize(simulate_cube(m, dt, PulseParams{}, DecayParams{}, 7));
}
BENCHMARK(BM_SimulateCube)->Unit(benchmark::kMillisecond);

void BM_Contours(benchmark::State &st) {
  const int n = 121;
  std::vector<double> img;
  for (int j = 0; j < n; ++j)
    for (int i = 0; i < n; ++i)
      img.push_back(contrast_at(595e-6 * 40 / std::hypot(i - 60.3, j - 60.7), 30.0, DecayParams{}, 0.05));
  for (auto _ : st)
    benchmark::DoNotOptimize(analysis::extract_contours(img, n, n, 30.0));
}
BENCHMARK(BM_Contours)->Unit(benchmark::kMicrosecond);

} // namespace

BENCHMARK_MAIN();
