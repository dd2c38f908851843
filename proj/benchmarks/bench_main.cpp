/*
 * (C) Copyright 2026 The ddvar Authors
 *
 * This software is licensed under the terms of the Apache Licence Version 2.0
 * which can be obtained at http://www.apache.org/licenses/LICENSE-2.0.
 */

#include <benchmark/benchmark.h>

#include "ddvar/analysis.hpp"

namespace {

struct Setup {
  ddvar::ProblemInstance inst;
  ddvar::Decomposition dec;
};

Setup make_setup(ddvar::Index np, std::size_t j_sub) {
  const auto grid = ddvar::Grid1D::uniform(np);
  auto inst = ddvar::synthesize(grid, ddvar::build_gaussian_covariance(grid, 2.0, 1.0), np / 5, 0.1, 42);
  auto dec = ddvar::decompose_uniform(grid, j_sub, 2);
  return {std::move(inst), std::move(dec)};
}

void BM_AssembleMps(benchmark::State& state) {
  const Setup s = make_setup(state.range(0), static_cast<std::size_t>(state.range(1)));
  for (auto _ : state) benchmark::DoNotOptimize(ddvar::assemble_all(s.inst, s.dec, ddvar::Scheme::Mps));
}
BENCHMARK(BM_AssembleMps)->Args({200, 4})->Args({800, 8});

void BM_SolveGlobal(benchmark::State& state) {
  const Setup s = make_setup(state.range(0), 1);
  const auto sys = ddvar::assemble_global(s.inst);
  for (auto _ : state) benchmark::DoNotOptimize(ddvar::solve_global(sys));
}
BENCHMARK(BM_SolveGlobal)->Arg(200)->Arg(800);

void BM_SolveDdda(benchmark::State& state) {
  const Setup s = make_setup(state.range(0), static_cast<std::size_t>(state.range(1)));
  const auto locals = ddvar::assemble_all(s.inst, s.dec, ddvar::Scheme::Ddda);
  ddvar::SolverOptions opts;
  opts.threads = 1;
  for (auto _ : state) benchmark::DoNotOptimize(ddvar::solve_ddda(locals, opts));
}
BENCHMARK(BM_SolveDdda)->Args({200, 4})->Args({800, 8});

void BM_SolveMps(benchmark::State& state) {
  const Setup s = make_setup(state.range(0), static_cast<std::size_t>(state.range(1)));
  const auto locals = ddvar::assemble_all(s.inst, s.dec, ddvar::Scheme::Mps);
  ddvar::SolverOptions opts;
  opts.threads = 1;
  for (auto _ : state) {
    auto r = ddvar::solve_mps(locals, {}, opts);
    state.counters["iterations"] = r.iterations;
    benchmark::DoNotOptimize(r);
  }
}
BENCHMARK(BM_SolveMps)->Args({200, 4})->Args({800, 8});

}  // namespace

BENCHMARK_MAIN();
