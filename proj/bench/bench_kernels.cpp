// OpenMP stencil kernels against their serial ghost-padded references.
// Arg: cells per side.

#include <benchmark/benchmark.h>

#include <cmath>
#include <random>

#include "pfreact/mesh.hpp"

namespace {

using namespace pfreact;

GridSpec square(int n) {
  GridSpec g;
  g.nx = g.ny = n;
  g.bc_x = AxisBc::periodic;
  g.bc_y = AxisBc::wall;
  return g;
}

ScalarField field(const GridSpec& g, unsigned seed, double lo, double hi) {
  std::mt19937 rng(seed);
  std::uniform_real_distribution<double> d(lo, hi);
  ScalarField s(g);
  for (std::size_t k = 0; k < s.size(); ++k) s[k] = d(rng);
  return s;
}

FaceField velocity(const GridSpec& g) {
  FaceField u(g);
  for (int j = 0; j < g.ny; ++j)
    for (int i = 0; i <= g.nx; ++i) u.x(i, j) = std::sin(g.yc(j));
  for (int j = 0; j <= g.ny; ++j)
    for (int i = 0; i < g.nx; ++i) u.y(i, j) = j == 0 || j == g.ny ? 0.0 : std::cos(g.xc(i));
  sync_periodic(u, g);
  return u;
}

template <auto Kernel>
void grad(benchmark::State& st) {
  const GridSpec g = square(static_cast<int>(st.range(0)));
  const ScalarField s = field(g, 1, -1.0, 1.0);
  for (auto _ : st) benchmark::DoNotOptimize(Kernel(s, g));
  st.SetItemsProcessed(st.iterations() * g.cells());
}

template <auto Kernel>
void div(benchmark::State& st) {
  const GridSpec g = square(static_cast<int>(st.range(0)));
  const FaceField u = velocity(g);
  for (auto _ : st) benchmark::DoNotOptimize(Kernel(u, g));
  st.SetItemsProcessed(st.iterations() * g.cells());
}

template <auto Kernel>
void coeff_laplacian(benchmark::State& st) {
  const GridSpec g = square(static_cast<int>(st.range(0)));
  const ScalarField a = field(g, 2, 0.5, 2.0), s = field(g, 3, -1.0, 1.0);
  for (auto _ : st) benchmark::DoNotOptimize(Kernel(a, s, g));
  st.SetItemsProcessed(st.iterations() * g.cells());
}

template <auto Kernel>
void advect(benchmark::State& st) {
  const GridSpec g = square(static_cast<int>(st.range(0)));
  const FaceField u = velocity(g);
  const ScalarField s = field(g, 4, -1.0, 1.0);
  for (auto _ : st) benchmark::DoNotOptimize(Kernel(u, s, g));
  st.SetItemsProcessed(st.iterations() * g.cells());
}

template <auto Kernel>
void dot(benchmark::State& st) {
  const GridSpec g = square(static_cast<int>(st.range(0)));
  const ScalarField a = field(g, 5, -1.0, 1.0), b = field(g, 6, -1.0, 1.0);
  for (auto _ : st) benchmark::DoNotOptimize(Kernel(a, b, g));
  st.SetItemsProcessed(st.iterations() * g.cells());
}

#define PFREACT_PAIR(name, fn)                                                                  \
  BENCHMARK(name<static_cast<decltype(&pfreact::fn)>(&pfreact::fn)>)                            \
      ->Name(#fn "/parallel")                                                                   \
      ->RangeMultiplier(4)                                                                      \
      ->Range(64, 1024);                                                                        \
  BENCHMARK(name<static_cast<decltype(&pfreact::serial::fn)>(&pfreact::serial::fn)>)            \
      ->Name(#fn "/serial")                                                                     \
      ->RangeMultiplier(4)                                                                      \
      ->Range(64, 1024);

PFREACT_PAIR(grad, grad_c2f)
PFREACT_PAIR(div, div_f2c)
PFREACT_PAIR(coeff_laplacian, div_coeff_grad)
PFREACT_PAIR(advect, advect_div_form)
PFREACT_PAIR(dot, inner)

}  // namespace

BENCHMARK_MAIN();
