#include <benchmark/benchmark.h>

#include <cmath>
#include <cstdint>
#include <optional>
#include <vector>

#include "drawrec/analytics.hpp"
#include "drawrec/estimate.hpp"
#include "drawrec/matrix_exp.hpp"
#include "drawrec/model.hpp"
#include "drawrec/records.hpp"
#include "drawrec/rng.hpp"
#include "drawrec/simulate.hpp"

using drawrec::BetaLaw;
using drawrec::JumpEvent;
using drawrec::Matrix;
using drawrec::ModelSpec;
using drawrec::PriceSeries;
using drawrec::RandomStream;
using drawrec::Vector;

namespace {

ModelSpec two_state_spec() {
  ModelSpec spec;
  spec.k = 2;
  spec.pi = Vector(2);
  spec.pi << 0.5, 0.5;
  spec.Q = Matrix(2, 2);
  spec.Q << 0.6, 0.4, 0.5, 0.5;
  spec.lambda = Vector(2);
  spec.lambda << 2.0, 1.0;
  spec.jump_laws = {BetaLaw{2.0, 20.0}, BetaLaw{2.0, 30.0}};
  return spec;
}

Vector uniform_grid(double horizon, double step) {
  const auto n = static_cast<Eigen::Index>(std::llround(horizon / step)) + 1;
  Vector grid(n);
  for (Eigen::Index i = 0; i < n; ++i) grid[i] = step * static_cast<double>(i);
  return grid;
}

PriceSeries random_walk(int n, std::uint64_t seed) {
  RandomStream rng(seed);
  PriceSeries series;
  series.times.reserve(static_cast<std::size_t>(n));
  series.prices.reserve(static_cast<std::size_t>(n));
  double price = 100.0;
  for (int i = 0; i < n; ++i) {
    series.times.push_back(static_cast<double>(i));
    series.prices.push_back(price);
    price *= std::exp(0.004 * rng.normal() - 0.0002);
  }
  return series;
}

std::vector<JumpEvent> synthetic_events(int n, std::uint64_t seed) {
  RandomStream rng(seed);
  std::vector<JumpEvent> events;
  events.reserve(static_cast<std::size_t>(n));
  double t = 0.0;
  for (int i = 0; i < n; ++i) {
    const bool fast = rng.uniform() < 0.7;
    JumpEvent ev;
    ev.inter_arrival = rng.exponential(fast ? 5.0 : 0.05);
    ev.rho = rng.beta(fast ? 2.0 : 8.0, fast ? 50.0 : 12.0);
    t += ev.inter_arrival;
    ev.time = t;
    events.push_back(ev);
  }
  return events;
}

void BM_SimulatePath(benchmark::State& state) {
  const ModelSpec spec = two_state_spec();
  const RandomStream base(42);
  std::uint64_t index = 0;
  for (auto _ : state) {
    RandomStream stream = base.substream(index++);
    benchmark::DoNotOptimize(
        drawrec::simulate_path(spec, 0.0, std::nullopt, 50.0, stream));
  }
}
BENCHMARK(BM_SimulatePath);

void BM_MonteCarloEnsemble(benchmark::State& state) {
  const ModelSpec spec = two_state_spec();
  const Vector grid = uniform_grid(50.0, 0.5);
  const auto n_paths = static_cast<int>(state.range(0));
  for (auto _ : state) {
    benchmark::DoNotOptimize(drawrec::monte_carlo(spec, 0.0, 50.0, grid, n_paths, 42));
  }
  state.SetItemsProcessed(state.iterations() * n_paths);
}
BENCHMARK(BM_MonteCarloEnsemble)->Arg(1000)->Arg(10000);

void BM_MatrixExponential(benchmark::State& state) {
  const auto k = static_cast<Eigen::Index>(state.range(0));
  RandomStream rng(7);
  Matrix m(k, k);
  for (Eigen::Index i = 0; i < k; ++i)
    for (Eigen::Index j = 0; j < k; ++j) m(i, j) = 4.0 * rng.uniform() - 2.0;
  for (auto _ : state) {
    benchmark::DoNotOptimize(drawrec::matrix_exponential(m));
  }
}
BENCHMARK(BM_MatrixExponential)->Arg(2)->Arg(4)->Arg(8);

void BM_MeanCurve(benchmark::State& state) {
  const ModelSpec spec = two_state_spec();
  const Vector grid = uniform_grid(50.0, 0.5);
  for (auto _ : state) {
    benchmark::DoNotOptimize(drawrec::mean_curve(spec, 0.0, grid));
  }
}
BENCHMARK(BM_MeanCurve);

void BM_VarianceCurve(benchmark::State& state) {
  const ModelSpec spec = two_state_spec();
  const Vector grid = uniform_grid(50.0, 0.5);
  for (auto _ : state) {
    benchmark::DoNotOptimize(drawrec::variance_curve(spec, 0.0, grid));
  }
}
BENCHMARK(BM_VarianceCurve);

void BM_ExtractRecords(benchmark::State& state) {
  const PriceSeries series = random_walk(static_cast<int>(state.range(0)), 99);
  for (auto _ : state) {
    benchmark::DoNotOptimize(drawrec::extract_records(series));
  }
  state.SetItemsProcessed(state.iterations() * state.range(0));
}
BENCHMARK(BM_ExtractRecords)->Range(1 << 10, 1 << 14);

void BM_FitBeta(benchmark::State& state) {
  RandomStream rng(11);
  std::vector<double> sample;
  sample.reserve(10000);
  for (int i = 0; i < 10000; ++i) sample.push_back(rng.beta(2.0, 20.0));
  for (auto _ : state) {
    benchmark::DoNotOptimize(drawrec::fit_beta(sample));
  }
}
BENCHMARK(BM_FitBeta);

void BM_EmFit(benchmark::State& state) {
  const auto events = synthetic_events(static_cast<int>(state.range(0)), 13);
  for (auto _ : state) {
    benchmark::DoNotOptimize(drawrec::em_fit(events, 2));
  }
  state.SetItemsProcessed(state.iterations() * state.range(0));
}
BENCHMARK(BM_EmFit)->Arg(1000);

}  // namespace

int main(int argc, char** argv) {
  benchmark::Initialize(&argc, argv);
  if (benchmark::ReportUnrecognizedArguments(argc, argv)) return 1;
  benchmark::RunSpecifiedBenchmarks();
  benchmark::Shutdown();
  return 0;
}
