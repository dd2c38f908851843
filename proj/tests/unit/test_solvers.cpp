/*
 * (C) Copyright 2026 The ddvar Authors
 *
 * This software is licensed under the terms of the Apache Licence Version 2.0
 * which can be obtained at http://www.apache.org/licenses/LICENSE-2.0.
 */

#include <gtest/gtest.h>

#include <algorithm>

#include "ddvar/errors.hpp"
#include "ddvar/solvers.hpp"
#include "support/oracles.hpp"

namespace ddvar {
namespace {

ProblemInstance gaussian_instance(Index np, Index nobs, std::uint64_t seed) {
  const Grid1D grid = Grid1D::uniform(np);
  return synthesize(grid, build_gaussian_covariance(grid, 2.0, 1.0), nobs, 0.1, seed);
}

SolverOptions serial() {
  SolverOptions o;
  o.threads = 1;
  return o;
}

TEST(SolveGlobal, ScalarSystem) {
  GlobalSystem sys{Matrix::Constant(1, 1, 2.0), Vector::Constant(1, 2.0)};
  EXPECT_DOUBLE_EQ(solve_global(sys)[0], 1.0);
}

TEST(SolveGlobal, ResidualAndMinimality) {
  // np=30, seed=7
  const auto inst = gaussian_instance(30, 6, 7);
  const GlobalSystem sys = assemble_global(inst);
  const Vector w = solve_global(sys);
  EXPECT_LE(linf(Vector(sys.a * w - sys.c)), 1e-10);
  testing::TestRng rng(70);
  const double best = cost_w(inst, w);
  for (int k = 0; k < 100; ++k) EXPECT_LE(best, cost_w(inst, w + rng.normal(30).normalized() * 1e-3));
}

TEST(SolveGlobal, AgreesWithCoordinateDescent) {
  const auto inst = gaussian_instance(15, 5, 3);
  const GlobalSystem sys = assemble_global(inst);
  const Vector oracle = testing::coordinate_descent(sys.a, sys.c, 4000);
  EXPECT_LE(linf(Vector(solve_global(sys) - oracle)), 1e-10);
}

TEST(SolveGlobal, RejectsIndefiniteSystem) {
  GlobalSystem sys{Matrix::Identity(3, 3), Vector::Ones(3)};
  sys.a(1, 1) = -1.0;
  try {
    solve_global(sys);
    FAIL() << "expected a factorization failure";
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::FactorizationFailure);
  }
}

TEST(SolveSpd, ConjugateGradientAgreesWithCholesky) {
  const auto inst = gaussian_instance(40, 8, 5);
  const GlobalSystem sys = assemble_global(inst);
  SolverOptions cg;
  cg.local_solver = LocalSolverKind::ConjugateGradient;
  EXPECT_LE(linf(Vector(solve_spd(sys.a, sys.c, cg) - solve_spd(sys.a, sys.c, {}))), 1e-11);
}

TEST(SolveDdda, IndependentLocalSolves) {
  const auto inst = gaussian_instance(30, 6, 1);
  const auto dec = decompose_uniform(inst.grid, 3, 2);
  const auto locals = assemble_all(inst, dec, Scheme::Ddda);
  const auto ws = solve_ddda(locals, serial());
  ASSERT_EQ(ws.size(), 3u);
  for (std::size_t i = 0; i < 3; ++i) EXPECT_LE(linf(Vector(locals[i].a * ws[i] - locals[i].c)), 1e-12);
  EXPECT_THROW(solve_ddda(assemble_all(inst, dec, Scheme::Mps)), Error);
}

TEST(SolveMps, SingleSubdomainConvergesInOneSweep) {
  const auto inst = gaussian_instance(20, 4, 2);
  const auto dec = decompose_uniform(inst.grid, 1, 2);
  const MpsResult r = solve_mps(assemble_all(inst, dec, Scheme::Mps), {}, serial());
  EXPECT_TRUE(r.converged);
  EXPECT_EQ(r.iterations, 1);
  EXPECT_LE(linf(Vector(r.ws[0] - solve_global(assemble_global(inst)))), 1e-12);
}

TEST(SolveMps, NoObservationsFixedPointAtZero) {
  const Grid1D grid = Grid1D::uniform(24);
  const auto inst = make_instance(grid, build_gaussian_covariance(grid, 2.0, 1.0),
                                  make_observations(24, {}, Vector(0), Vector(0)), Vector::Zero(24));
  for (std::size_t j : {1u, 2u, 3u}) {
    const auto locals = assemble_all(inst, decompose_uniform(grid, j, 2), Scheme::Mps);
    const MpsResult r = solve_mps(locals, {}, serial());
    EXPECT_TRUE(r.converged);
    EXPECT_EQ(r.iterations, 1);
    for (const Vector& w : r.ws) EXPECT_EQ(w, Vector::Zero(w.size()));
    for (double res : fixed_point_residual(locals, r.ws)) EXPECT_EQ(res, 0.0);
  }
}

TEST(SolveMps, ConvergedIterateIsAFixedPoint) {
  for (std::uint64_t seed = 1; seed <= 5; ++seed) {
    const auto inst = gaussian_instance(36, 7, seed);
    const auto locals = assemble_all(inst, decompose_uniform(inst.grid, 3, 2), Scheme::Mps);
    const SolverOptions opts = serial();
    const MpsResult r = solve_mps(locals, {}, opts);
    ASSERT_TRUE(r.converged);
    double kappa = 1.0;
    for (const auto& s : locals) kappa = std::max(kappa, 1.0 + row_sum_norm(s.a));
    for (double res : fixed_point_residual(locals, r.ws)) EXPECT_LE(res, opts.tol * kappa);
    const auto& recs = r.history.records();
    ASSERT_EQ(recs.size(), static_cast<std::size_t>(r.iterations));
    EXPECT_LE(recs.back().max_delta, opts.tol);
    EXPECT_EQ(recs.front().iter, 1);
  }
}

TEST(SolveMps, MaxItersFlagsBestIterate) {
  const auto inst = gaussian_instance(40, 8, 42);
  const auto locals = assemble_all(inst, decompose_uniform(inst.grid, 2, 2), Scheme::Mps);
  SolverOptions opts = serial();
  opts.max_iters = 3;
  const MpsResult r = solve_mps(locals, {}, opts);
  EXPECT_FALSE(r.converged);
  EXPECT_EQ(r.iterations, 3);
  EXPECT_EQ(r.history.size(), 3u);
}

TEST(SolveMps, ThreadCountDoesNotChangeIterates) {
  const auto inst = gaussian_instance(45, 9, 8);
  const auto locals = assemble_all(inst, decompose_uniform(inst.grid, 3, 2), Scheme::Mps);
  const MpsResult a = solve_mps(locals, {}, serial());
  for (std::size_t t : {2u, 3u, 8u}) {
    SolverOptions opts;
    opts.threads = t;
    const MpsResult b = solve_mps(locals, {}, opts);
    EXPECT_EQ(a.iterations, b.iterations);
    for (std::size_t i = 0; i < 3; ++i) EXPECT_EQ(a.ws[i], b.ws[i]);
  }
}

TEST(SolveMps, ProcessingOrderDoesNotChangeIterates) {
  const auto inst = gaussian_instance(45, 9, 8);
  const auto locals = assemble_all(inst, decompose_uniform(inst.grid, 3, 1), Scheme::Mps);
  const MpsResult a = solve_mps(locals, {}, serial());
  std::vector<std::size_t> order{0, 1, 2};
  while (std::next_permutation(order.begin(), order.end())) {
    SolverOptions opts = serial();
    opts.order = order;
    const MpsResult b = solve_mps(locals, {}, opts);
    for (std::size_t i = 0; i < 3; ++i) EXPECT_EQ(a.ws[i], b.ws[i]);
  }
  SolverOptions bad = serial();
  bad.order = {0, 0, 2};
  EXPECT_THROW(solve_mps(locals, {}, bad), Error);
}

TEST(SolveMps, CostProbeFeedsHistory) {
  const auto inst = gaussian_instance(30, 6, 4);
  const auto locals = assemble_all(inst, decompose_uniform(inst.grid, 2, 2), Scheme::Mps);
  int calls = 0;
  const MpsResult r = solve_mps(locals, {}, serial(), [&](const std::vector<Vector>&) { return ++calls; });
  ASSERT_EQ(calls, r.iterations);
  for (std::size_t k = 0; k < r.history.size(); ++k)
    EXPECT_EQ(r.history.records()[k].global_cost, static_cast<double>(k + 1));
}

TEST(SolveMps, RejectsMisshapedStart) {
  const auto inst = gaussian_instance(30, 6, 4);
  const auto locals = assemble_all(inst, decompose_uniform(inst.grid, 2, 2), Scheme::Mps);
  EXPECT_THROW(solve_mps(locals, {Vector::Zero(3), Vector::Zero(3)}), Error);
  EXPECT_THROW(fixed_point_residual(locals, {Vector::Zero(3)}), Error);
}

TEST(SolverOptions, Validation) {
  SolverOptions o;
  o.tol = 0.0;
  EXPECT_THROW(o.validate(), Error);
  o = {};
  o.max_iters = 0;
  EXPECT_THROW(o.validate(), Error);
  EXPECT_GE(resolve_threads(0), 1u);
  EXPECT_EQ(resolve_threads(4), 4u);
}

TEST(IterationHistory, EnforcesIncreasingIterations) {
  IterationHistory h;
  h.append({1, 0.5, 0.0, {}});
  EXPECT_THROW(h.append({1, 0.1, 0.0, {}}), Error);
}

}  // namespace
}  // namespace ddvar
