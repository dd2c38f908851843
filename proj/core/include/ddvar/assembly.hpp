/*
 * (C) Copyright 2026 The ddvar Authors
 *
 * This software is licensed under the terms of the Apache Licence Version 2.0
 * which can be obtained at http://www.apache.org/licenses/LICENSE-2.0.
 */

#pragma once

#include <cstddef>
#include <map>
#include <string_view>
#include <vector>

#include "ddvar/geometry.hpp"
#include "ddvar/observation.hpp"
#include "ddvar/types.hpp"

namespace ddvar {

enum class Scheme { Mps, Ddda };

std::string_view to_string(Scheme scheme);

/// Normal equations of the preconditioned 3D-Var functional on the whole grid.
struct GlobalSystem {
  Matrix a;  ///< V^T H^T R^-1 H V + I
  Vector c;  ///< V^T H^T R^-1 d
};

struct Coupling {
  std::size_t neighbor = 0;
  Matrix block;  ///< A_ij = P_i^T P_j  (r_i x r_j)
};

/**
 * Local system of subdomain i.
 *
 * Both schemes share c_i = V_i^T H_i^T R_i^-1 d_i and the base matrix
 * V_i^T H_i^T R_i^-1 H_i V_i + I_i. The MPS matrix adds one interface Gram
 * block P_i^T P_i per neighbour (ascending neighbour order) and carries the
 * couplings A_ij; the DD-DA system has none. MPS iterates
 *   a_i w_i^{n+1} = c_i + sum_j A_ij w_j^n.
 */
struct LocalSystem {
  std::size_t subdomain = 0;
  Scheme scheme = Scheme::Ddda;
  Matrix a;
  Vector c;
  std::vector<Coupling> couplings;

  Index size() const { return c.size(); }
};

GlobalSystem assemble_global(const ProblemInstance& inst);

LocalSystem assemble_local(const ProblemInstance& inst, const Decomposition& dec, std::size_t i, Scheme scheme);

/// All J local systems of one scheme, in subdomain order.
std::vector<LocalSystem> assemble_all(const ProblemInstance& inst, const Decomposition& dec, Scheme scheme);

/// P^T P, exactly symmetric.
Matrix interface_gram(const Matrix& p);

/// 1/2 w^T w + 1/2 (H V w - d)^T R^-1 (H V w - d)
double cost_w(const ProblemInstance& inst, const Vector& w);

/**
 * Local MPS functional of subdomain i given neighbour iterates:
 *   1/2 |w_i|^2 + 1/2 |H_i V_i w_i - d_i|^2_{R_i^-1} + sum_j 1/2 |P_i w_i - P_j w_j|^2.
 */
double local_cost(const ProblemInstance& inst, const Decomposition& dec, std::size_t i, const Vector& w_i,
                  const std::map<std::size_t, Vector>& neighbor_ws);

/// a_i w_i - c_i - sum_j A_ij w_j; vanishes exactly at the local solve.
Vector local_gradient(const LocalSystem& sys, const Vector& w_i, const std::map<std::size_t, Vector>& neighbor_ws);

}  // namespace ddvar
