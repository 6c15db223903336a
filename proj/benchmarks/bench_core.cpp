#include <benchmark/benchmark.h>

#include <cstdint>

#include "growbatch/data_io.hpp"
#include "growbatch/lbfgs.hpp"
#include "growbatch/linesearch.hpp"
#include "growbatch/problems.hpp"
#include "growbatch/rng.hpp"
#include "growbatch/sampling.hpp"

namespace {

using namespace growbatch;

const BinaryLogisticProblem& logistic_instance() {
  static const BinaryLogisticProblem* p = [] {
    SyntheticDataset sd = generate_synthetic_logistic(1000, 20, 0.5, 7, 4.0);
    return new BinaryLogisticProblem(to_problem_rows(sd.data), sd.data.labels, 20, 0.1);
  }();
  return *p;
}

void bm_full_gradient(benchmark::State& state) {
  const BinaryLogisticProblem& p = logistic_instance();
  CounterRng rng(3, 0);
  const VectorXd x = rng.unit_vector(p.dim());
  for (auto _ : state) {
    VectorXd g = p.full_gradient(x);
    benchmark::DoNotOptimize(g);
  }
}
BENCHMARK(bm_full_gradient);

void bm_two_loop_direction(benchmark::State& state) {
  const int n = 50;
  LbfgsMemory mem(10);
  CounterRng rng(5, 1);
  for (int i = 0; i < 10; ++i) {
    VectorXd s = rng.unit_vector(n);
    VectorXd y = s + 0.1 * rng.unit_vector(n);
    mem.push(s, y);
  }
  const VectorXd g = rng.unit_vector(n);
  for (auto _ : state) {
    VectorXd d = mem.direction(g);
    benchmark::DoNotOptimize(d);
  }
}
BENCHMARK(bm_two_loop_direction);

void bm_draw_sample(benchmark::State& state) {
  std::int64_t k = 0;
  for (auto _ : state) {
    SampleSet s = draw_sample(100000, 1000, SampleMode::Uniform, 42, k++);
    benchmark::DoNotOptimize(s);
  }
}
BENCHMARK(bm_draw_sample);

void bm_armijo_search(benchmark::State& state) {
  const auto phi = [](double a) { return 0.5 * (a - 0.3) * (a - 0.3); };
  const double phi0 = phi(0.0);
  for (auto _ : state) {
    LineSearchResult r = armijo_search(phi, phi0, -0.3, 1.0);
    benchmark::DoNotOptimize(r);
  }
}
BENCHMARK(bm_armijo_search);

}  // namespace

BENCHMARK_MAIN();
