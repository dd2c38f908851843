/*
 * (C) Copyright 2026 The ddvar Authors
 *
 * This software is licensed under the terms of the Apache Licence Version 2.0
 * which can be obtained at http://www.apache.org/licenses/LICENSE-2.0.
 */

#pragma once

#include <cstddef>
#include <functional>
#include <string_view>
#include <vector>

#include "ddvar/assembly.hpp"
#include "ddvar/types.hpp"

namespace ddvar {

enum class LocalSolverKind { DirectCholesky, ConjugateGradient };

std::string_view to_string(LocalSolverKind kind);

struct SolverOptions {
  double tol = 1e-12;  ///< stop when max_i |w_i^{n+1} - w_i^n|_inf <= tol
  int max_iters = 500;
  LocalSolverKind local_solver = LocalSolverKind::DirectCholesky;
  double cg_tol = 1e-14;  ///< relative to 1 + |rhs|_inf
  int cg_max = 10000;
  /// Worker threads for subdomain solves; 0 picks the hardware default.
  std::size_t threads = 0;
  /// Order in which subdomain solves are issued within a sweep (empty: 0..J-1).
  std::vector<std::size_t> order;

  void validate() const;
};

struct IterationRecord {
  int iter = 0;
  double max_delta = 0.0;
  double global_cost = 0.0;
  std::vector<double> residuals;  ///< per subdomain fixed-point residual
};

class IterationHistory {
 public:
  void append(IterationRecord record);
  const std::vector<IterationRecord>& records() const { return records_; }
  bool empty() const { return records_.empty(); }
  std::size_t size() const { return records_.size(); }

 private:
  std::vector<IterationRecord> records_;
};

struct MpsResult {
  std::vector<Vector> ws;
  IterationHistory history;
  bool converged = false;
  int iterations = 0;
};

/// Evaluates the global cost of a set of subdomain iterates (for the history).
using CostProbe = std::function<double(const std::vector<Vector>&)>;

/// Solve a x = b for SPD a with the configured local solver.
Vector solve_spd(const Matrix& a, const Vector& b, const SolverOptions& opts, long id = -1);

Vector solve_global(const GlobalSystem& sys, const SolverOptions& opts = {});

/// Independent solves a_i w_i = c_i, one per subdomain.
std::vector<Vector> solve_ddda(const std::vector<LocalSystem>& locals, const SolverOptions& opts = {});

/**
 * Parallel Schwarz fixed-point iteration
 *   a_i w_i^{n+1} = c_i + sum_j A_ij w_j^n.
 * Every solve in sweep n+1 reads only sweep-n iterates. Stops when the sup-norm
 * of successive iterates drops to opts.tol, after the first sweep when no
 * subdomain is coupled (the sweep is then exact), or at opts.max_iters; the
 * latter returns converged = false with the iterate of smallest residual.
 * `w0` empty means all zeros.
 */
MpsResult solve_mps(const std::vector<LocalSystem>& locals, const std::vector<Vector>& w0,
                    const SolverOptions& opts = {}, const CostProbe& probe = {});

/// |a_i w_i - c_i - sum_j A_ij w_j|_inf for each subdomain.
std::vector<double> fixed_point_residual(const std::vector<LocalSystem>& locals, const std::vector<Vector>& ws);

/// Resolved worker count for opts.threads (never 0).
std::size_t resolve_threads(std::size_t requested);

}  // namespace ddvar
