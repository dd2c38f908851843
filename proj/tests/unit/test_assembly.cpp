/*
 * (C) Copyright 2026 The ddvar Authors
 *
 * This software is licensed under the terms of the Apache Licence Version 2.0
 * which can be obtained at http://www.apache.org/licenses/LICENSE-2.0.
 */

#include <gtest/gtest.h>

#include <map>

#include "ddvar/assembly.hpp"
#include "ddvar/errors.hpp"
#include "support/oracles.hpp"

namespace ddvar {
namespace {

ErrorCode code_of(const std::function<void()>& f) {
  try {
    f();
  } catch (const Error& e) {
    return e.code();
  }
  ADD_FAILURE() << "no error thrown";
  return ErrorCode::InvalidArgument;
}

ProblemInstance identity_instance(Index np, std::vector<Index> idx, const Vector& v, const Vector& ub) {
  const Grid1D grid = Grid1D::uniform(np);
  auto obs = make_observations(np, std::move(idx), v, Vector::Ones(v.size()));
  return make_instance(grid, build_identity_covariance(grid), std::move(obs), ub);
}

ProblemInstance random_instance(Index np, std::uint64_t seed) {
  const Grid1D grid = Grid1D::uniform(np);
  return synthesize(grid, build_gaussian_covariance(grid, 2.0, 1.0), np / 4, 0.1, seed);
}

TEST(GlobalSystem, ScalarHandValues) {
  const auto inst = identity_instance(1, {0}, Vector::Constant(1, 2.0), Vector::Zero(1));
  const GlobalSystem sys = assemble_global(inst);
  EXPECT_EQ(sys.a(0, 0), 2.0);
  EXPECT_EQ(sys.c[0], 2.0);
  EXPECT_EQ(sys.c[0] / sys.a(0, 0), 1.0);
}

TEST(GlobalSystem, NoObservationsGivesIdentity) {
  const Grid1D grid = Grid1D::uniform(9);
  auto inst = make_instance(grid, build_gaussian_covariance(grid, 2.0, 1.0), make_observations(9, {}, Vector(0), Vector(0)),
                            Vector::LinSpaced(9, 0.0, 1.0));
  const GlobalSystem sys = assemble_global(inst);
  EXPECT_EQ(sys.a, Matrix::Identity(9, 9));
  EXPECT_EQ(sys.c, Vector::Zero(9));
}

TEST(GlobalSystem, FullyObservedIdentity) {
  const Vector v = Vector::LinSpaced(6, 1.0, 6.0);
  const Vector ub = Vector::Constant(6, 0.5);
  const auto inst = identity_instance(6, {0, 1, 2, 3, 4, 5}, v, ub);
  const GlobalSystem sys = assemble_global(inst);
  EXPECT_EQ(sys.a, Matrix(2.0 * Matrix::Identity(6, 6)));
  EXPECT_EQ(sys.c, Vector(v - ub));
}

TEST(GlobalSystem, MatchesDenseProducts) {
  for (std::uint64_t seed = 1; seed <= 5; ++seed) {
    const auto inst = random_instance(24, seed);
    const Matrix h = testing::dense_h(inst);
    const Matrix rinv = inst.obs.r_cov.r_diag.cwiseInverse().asDiagonal();
    const Matrix hv = h * inst.cov.v_factor;
    const Matrix a = hv.transpose() * rinv * hv + Matrix::Identity(24, 24);
    const Vector c = hv.transpose() * rinv * (inst.obs.values - h * inst.u_background);
    const GlobalSystem sys = assemble_global(inst);
    EXPECT_LE(max_abs(sys.a - a), 1e-12 * max_abs(a));
    EXPECT_LE(linf(Vector(sys.c - c)), 1e-12 * (1.0 + linf(c)));
    EXPECT_EQ(sys.a, sys.a.transpose());
  }
}

TEST(CostW, QuadraticIdentity) {
  testing::TestRng rng(3);
  for (std::uint64_t seed = 1; seed <= 5; ++seed) {
    const auto inst = random_instance(20, seed);
    const GlobalSystem sys = assemble_global(inst);
    const Vector d = innovation(inst);
    const double k = 0.5 * d.dot(inst.obs.r_cov.r_diag.cwiseInverse().cwiseProduct(d));
    for (int t = 0; t < 10; ++t) {
      const Vector w = rng.normal(20);
      const double quad = 0.5 * w.dot(sys.a * w) - sys.c.dot(w) + k;
      const double direct = cost_w(inst, w);
      EXPECT_LE(std::abs(quad - direct), 1e-10 * std::abs(direct));
    }
  }
}

TEST(LocalSystem, SingleSubdomainEqualsGlobalBitwise) {
  const auto inst = random_instance(17, 4);
  const auto dec = decompose_uniform(inst.grid, 1, 2);
  const GlobalSystem g = assemble_global(inst);
  for (Scheme s : {Scheme::Mps, Scheme::Ddda}) {
    const LocalSystem l = assemble_local(inst, dec, 0, s);
    EXPECT_EQ(l.a, g.a);
    EXPECT_EQ(l.c, g.c);
    EXPECT_TRUE(l.couplings.empty());
  }
}

TEST(LocalSystem, IdentityCovarianceHandBlocks) {
  // np=10, J=2, halo=1: Omega_1 = [0,6), Omega_2 = [4,10), interface point 5 (local 5 / local 1)
  const auto inst = identity_instance(10, {}, Vector(0), Vector::Zero(10));
  const auto dec = decompose_uniform(inst.grid, 2, 1);
  const LocalSystem mps = assemble_local(inst, dec, 0, Scheme::Mps);
  Matrix expected = Matrix::Identity(6, 6);
  expected(5, 5) += 1.0;
  EXPECT_EQ(mps.a, expected);
  ASSERT_EQ(mps.couplings.size(), 1u);
  EXPECT_EQ(mps.couplings[0].neighbor, 1u);
  Matrix block = Matrix::Zero(6, 6);
  block(5, 1) = 1.0;
  EXPECT_EQ(mps.couplings[0].block, block);

  const LocalSystem ddda = assemble_local(inst, dec, 0, Scheme::Ddda);
  EXPECT_EQ(ddda.a, Matrix::Identity(6, 6));
  EXPECT_EQ(ddda.c, Vector::Zero(6));
  EXPECT_TRUE(ddda.couplings.empty());
}

TEST(LocalSystem, SchemesShareRightHandSideAndDifferByGram) {
  for (std::uint64_t seed = 1; seed <= 6; ++seed) {
    const auto inst = random_instance(31, seed);
    const auto dec = decompose_uniform(inst.grid, 3, 2);
    for (std::size_t i = 0; i < 3; ++i) {
      const LocalSystem m = assemble_local(inst, dec, i, Scheme::Mps);
      const LocalSystem d = assemble_local(inst, dec, i, Scheme::Ddda);
      EXPECT_EQ(m.c, d.c);
      Matrix sum = d.a;
      for (std::size_t j : dec.neighbors(i)) sum += interface_gram(interface_coupling(inst.cov, dec, i, j).first);
      EXPECT_EQ(m.a, sum);
      EXPECT_EQ(m.a, m.a.transpose());
      for (const Coupling& c : m.couplings) {
        auto [pi, pj] = interface_coupling(inst.cov, dec, i, c.neighbor);
        EXPECT_LE(max_abs(c.block - pi.transpose() * pj), 1e-15);
      }
    }
  }
}

TEST(LocalSystem, DddaMatchesLocalDenseProducts) {
  const auto inst = random_instance(30, 9);
  const auto dec = decompose_uniform(inst.grid, 2, 2);
  const Matrix h = testing::dense_h(inst);
  const Vector d = innovation(inst);
  for (std::size_t i = 0; i < 2; ++i) {
    const auto rng = dec.subdomain(i);
    // observations inside Omega_i
    std::vector<Index> rows;
    for (Index k = 0; k < inst.obs.size(); ++k)
      if (rng.contains(inst.obs.obs_indices[static_cast<std::size_t>(k)])) rows.push_back(k);
    Matrix hi(static_cast<Index>(rows.size()), rng.size());
    Vector di(static_cast<Index>(rows.size())), rinv(static_cast<Index>(rows.size()));
    for (std::size_t r = 0; r < rows.size(); ++r) {
      hi.row(static_cast<Index>(r)) = h.row(rows[r]).segment(rng.begin, rng.size());
      di[static_cast<Index>(r)] = d[rows[r]];
      rinv[static_cast<Index>(r)] = 1.0 / inst.obs.r_cov.r_diag[rows[r]];
    }
    const Matrix vi = inst.cov.v_factor.block(rng.begin, rng.begin, rng.size(), rng.size());
    const Matrix a = (hi * vi).transpose() * rinv.asDiagonal() * (hi * vi) + Matrix::Identity(rng.size(), rng.size());
    const Vector c = (hi * vi).transpose() * rinv.asDiagonal() * di;
    const LocalSystem sys = assemble_local(inst, dec, i, Scheme::Ddda);
    EXPECT_LE(max_abs(sys.a - a), 1e-12 * max_abs(a));
    EXPECT_LE(linf(Vector(sys.c - c)), 1e-12 * (1.0 + linf(c)));
  }
}

TEST(LocalGradient, MatchesFiniteDifferences) {
  testing::TestRng rng(21);
  for (std::uint64_t seed = 1; seed <= 4; ++seed) {
    const auto inst = random_instance(26, seed);
    const auto dec = decompose_uniform(inst.grid, 3, 1);
    for (std::size_t i = 0; i < 3; ++i) {
      const LocalSystem sys = assemble_local(inst, dec, i, Scheme::Mps);
      std::map<std::size_t, Vector> nbrs;
      for (std::size_t j : dec.neighbors(i)) nbrs[j] = rng.normal(dec.size(j));
      const Vector w = rng.normal(dec.size(i));
      const Vector g = local_gradient(sys, w, nbrs);
      const Vector fd =
          testing::central_difference([&](const Vector& x) { return local_cost(inst, dec, i, x, nbrs); }, w);
      EXPECT_LE((g - fd).norm() / std::max(1.0, g.norm()), 1e-6);
    }
  }
}

TEST(LocalGradient, VanishesAtLocalSolve) {
  const auto inst = random_instance(20, 2);
  const auto dec = decompose_uniform(inst.grid, 2, 2);
  const LocalSystem sys = assemble_local(inst, dec, 1, Scheme::Mps);
  std::map<std::size_t, Vector> nbrs{{0, Vector::Ones(dec.size(0))}};
  Vector rhs = sys.c + sys.couplings[0].block * nbrs[0];
  const Vector w = sys.a.llt().solve(rhs);
  EXPECT_LE(linf(local_gradient(sys, w, nbrs)), 1e-12);
}

TEST(LocalGradient, ReportsMissingOrMisshapedNeighbors) {
  const auto inst = random_instance(20, 2);
  const auto dec = decompose_uniform(inst.grid, 2, 2);
  const LocalSystem sys = assemble_local(inst, dec, 0, Scheme::Mps);
  const Vector w = Vector::Zero(dec.size(0));
  EXPECT_EQ(code_of([&] { local_gradient(sys, w, {}); }), ErrorCode::MissingNeighbor);
  EXPECT_EQ(code_of([&] { local_gradient(sys, w, {{1, Vector::Zero(3)}}); }), ErrorCode::DimensionMismatch);
  EXPECT_EQ(code_of([&] { local_gradient(sys, Vector::Zero(2), {{1, Vector::Zero(dec.size(1))}}); }),
            ErrorCode::DimensionMismatch);
}

}  // namespace
}  // namespace ddvar
