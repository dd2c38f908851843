/*
 * (C) Copyright 2026 The ddvar Authors
 *
 * This software is licensed under the terms of the Apache Licence Version 2.0
 * which can be obtained at http://www.apache.org/licenses/LICENSE-2.0.
 */

#include "ddvar/solvers.hpp"

#include <algorithm>
#include <exception>
#include <limits>
#include <optional>
#include <string>
#include <thread>

#include "ddvar/errors.hpp"

namespace ddvar {

std::string_view to_string(LocalSolverKind kind) {
  switch (kind) {
    case LocalSolverKind::DirectCholesky:
      return "direct_cholesky";
    case LocalSolverKind::ConjugateGradient:
      return "cg";
  }
  return "unknown";
}

void SolverOptions::validate() const {
  if (!(tol > 0.0)) throw Error(ErrorCode::InvalidArgument, "tol must be > 0");
  if (max_iters < 1) throw Error(ErrorCode::InvalidArgument, "max_iters must be >= 1");
  if (local_solver == LocalSolverKind::ConjugateGradient && (!(cg_tol > 0.0) || cg_max < 1))
    throw Error(ErrorCode::InvalidArgument, "cg_tol must be > 0 and cg_max >= 1");
}

void IterationHistory::append(IterationRecord record) {
  if (!records_.empty() && record.iter <= records_.back().iter)
    throw Error(ErrorCode::InvalidArgument, "iteration records must be appended in increasing order");
  records_.push_back(std::move(record));
}

std::size_t resolve_threads(std::size_t requested) {
  if (requested > 0) return requested;
  return std::max<std::size_t>(1, std::thread::hardware_concurrency());
}

namespace {

Vector conjugate_gradient(const Matrix& a, const Vector& b, double rel_tol, int max_iters, long id) {
  Vector x = Vector::Zero(b.size());
  Vector r = b;
  Vector p = r;
  double rr = r.squaredNorm();
  const double stop = rel_tol * (1.0 + linf(b));
  for (int k = 0; k < max_iters && linf(r) > stop; ++k) {
    const Vector ap = a * p;
    const double pap = p.dot(ap);
    if (!(pap > 0.0)) throw FactorizationError(id, "conjugate gradient met a non-positive curvature direction");
    const double alpha = rr / pap;
    x += alpha * p;
    r -= alpha * ap;
    const double rr_next = r.squaredNorm();
    p = r + (rr_next / rr) * p;
    rr = rr_next;
  }
  return x;
}

// A local operator prepared once and reused for every sweep.
class PreparedSolve {
 public:
  PreparedSolve(const Matrix& a, const SolverOptions& opts, long id) : a_(&a), opts_(&opts), id_(id) {
    if (opts.local_solver == LocalSolverKind::DirectCholesky) {
      llt_.emplace(a);
      if (llt_->info() != Eigen::Success)
        throw FactorizationError(id, id < 0 ? "global system is not positive definite"
                                            : "local system " + std::to_string(id) + " is not positive definite");
    }
  }

  Vector solve(const Vector& b) const {
    if (llt_) return llt_->solve(b);
    return conjugate_gradient(*a_, b, opts_->cg_tol, opts_->cg_max, id_);
  }

 private:
  const Matrix* a_;
  const SolverOptions* opts_;
  long id_;
  std::optional<Eigen::LLT<Matrix>> llt_;
};

std::vector<std::size_t> processing_order(const SolverOptions& opts, std::size_t n) {
  if (opts.order.empty()) {
    std::vector<std::size_t> order(n);
    for (std::size_t k = 0; k < n; ++k) order[k] = k;
    return order;
  }
  std::vector<std::size_t> sorted = opts.order;
  std::sort(sorted.begin(), sorted.end());
  for (std::size_t k = 0; k < sorted.size(); ++k) {
    if (sorted.size() != n || sorted[k] != k)
      throw Error(ErrorCode::InvalidArgument, "processing order must be a permutation of the subdomains");
  }
  return opts.order;
}

// Runs task(order[k]) for every k on up to `threads` workers. Each task writes
// only its own slot, so the outcome does not depend on scheduling. The first
// failure in `order` is rethrown.
template <typename Task>
void for_each_subdomain(const std::vector<std::size_t>& order, std::size_t threads, Task&& task) {
  const std::size_t n = order.size();
  std::vector<std::exception_ptr> errors(n);
  auto run = [&](std::size_t k) {
    try {
      task(order[k]);
    } catch (...) {
      errors[k] = std::current_exception();
    }
  };
  const std::size_t workers = std::min(threads, n);
  if (workers <= 1) {
    for (std::size_t k = 0; k < n; ++k) run(k);
  } else {
    std::vector<std::jthread> pool;
    pool.reserve(workers);
    for (std::size_t t = 0; t < workers; ++t) {
      pool.emplace_back([&, t] {
        for (std::size_t k = t; k < n; k += workers) run(k);
      });
    }
  }
  for (const auto& e : errors) {
    if (e) std::rethrow_exception(e);
  }
}

std::vector<PreparedSolve> prepare(const std::vector<LocalSystem>& locals, const SolverOptions& opts,
                                   const std::vector<std::size_t>& order) {
  std::vector<std::optional<PreparedSolve>> slots(locals.size());
  for_each_subdomain(order, resolve_threads(opts.threads), [&](std::size_t i) {
    slots[i].emplace(locals[i].a, opts, static_cast<long>(i));
  });
  std::vector<PreparedSolve> out;
  out.reserve(locals.size());
  for (auto& s : slots) out.push_back(std::move(*s));
  return out;
}

void check_shapes(const std::vector<LocalSystem>& locals, const std::vector<Vector>& ws) {
  if (ws.size() != locals.size())
    throw Error(ErrorCode::DimensionMismatch, "expected one vector per subdomain");
  for (std::size_t i = 0; i < locals.size(); ++i) {
    if (ws[i].size() != locals[i].size())
      throw Error(ErrorCode::DimensionMismatch, "iterate " + std::to_string(i) + " has wrong length");
    for (const Coupling& cp : locals[i].couplings) {
      if (cp.neighbor >= locals.size() || cp.block.cols() != locals[cp.neighbor].size())
        throw Error(ErrorCode::DimensionMismatch, "coupling of subdomain " + std::to_string(i) + " is inconsistent");
    }
  }
}

}  // namespace

Vector solve_spd(const Matrix& a, const Vector& b, const SolverOptions& opts, long id) {
  if (a.rows() != a.cols() || a.rows() != b.size())
    throw Error(ErrorCode::DimensionMismatch, "solve_spd: system dimensions disagree");
  return PreparedSolve(a, opts, id).solve(b);
}

Vector solve_global(const GlobalSystem& sys, const SolverOptions& opts) {
  opts.validate();
  return solve_spd(sys.a, sys.c, opts);
}

std::vector<Vector> solve_ddda(const std::vector<LocalSystem>& locals, const SolverOptions& opts) {
  opts.validate();
  for (const LocalSystem& s : locals) {
    if (s.scheme != Scheme::Ddda)
      throw Error(ErrorCode::InvalidArgument, "solve_ddda expects DD-DA local systems");
  }
  const auto order = processing_order(opts, locals.size());
  std::vector<Vector> ws(locals.size());
  for_each_subdomain(order, resolve_threads(opts.threads), [&](std::size_t i) {
    ws[i] = solve_spd(locals[i].a, locals[i].c, opts, static_cast<long>(i));
  });
  return ws;
}

std::vector<double> fixed_point_residual(const std::vector<LocalSystem>& locals, const std::vector<Vector>& ws) {
  check_shapes(locals, ws);
  std::vector<double> out(locals.size());
  for (std::size_t i = 0; i < locals.size(); ++i) {
    Vector r = locals[i].a * ws[i] - locals[i].c;
    for (const Coupling& cp : locals[i].couplings) r -= cp.block * ws[cp.neighbor];
    out[i] = linf(r);
  }
  return out;
}

MpsResult solve_mps(const std::vector<LocalSystem>& locals, const std::vector<Vector>& w0,
                    const SolverOptions& opts, const CostProbe& probe) {
  opts.validate();
  for (const LocalSystem& s : locals) {
    if (s.scheme != Scheme::Mps) throw Error(ErrorCode::InvalidArgument, "solve_mps expects MPS local systems");
  }
  const std::size_t nsub = locals.size();
  std::vector<Vector> current;
  if (w0.empty()) {
    for (const LocalSystem& s : locals) current.push_back(Vector::Zero(s.size()));
  } else {
    current = w0;
  }
  check_shapes(locals, current);

  const auto order = processing_order(opts, nsub);
  const std::size_t threads = resolve_threads(opts.threads);
  const std::vector<PreparedSolve> solvers = prepare(locals, opts, order);
  const bool coupled = std::any_of(locals.begin(), locals.end(),
                                   [](const LocalSystem& s) { return !s.couplings.empty(); });

  MpsResult result;
  double best_residual = std::numeric_limits<double>::infinity();
  std::vector<Vector> next(nsub);
  for (int n = 1; n <= opts.max_iters; ++n) {
    for_each_subdomain(order, threads, [&](std::size_t i) {
      Vector rhs = locals[i].c;
      for (const Coupling& cp : locals[i].couplings) rhs += cp.block * current[cp.neighbor];
      next[i] = solvers[i].solve(rhs);
    });

    IterationRecord rec;
    rec.iter = n;
    for (std::size_t i = 0; i < nsub; ++i) rec.max_delta = std::max(rec.max_delta, linf(next[i] - current[i]));
    rec.residuals = fixed_point_residual(locals, next);
    rec.global_cost = probe ? probe(next) : std::numeric_limits<double>::quiet_NaN();
    const double worst = rec.residuals.empty() ? 0.0 : *std::max_element(rec.residuals.begin(), rec.residuals.end());
    const bool done = rec.max_delta <= opts.tol || !coupled;
    result.history.append(std::move(rec));

    current.swap(next);
    result.iterations = n;
    if (done) {
      result.converged = true;
      result.ws = current;
      return result;
    }
    if (worst < best_residual) {
      best_residual = worst;
      result.ws = current;
    }
  }
  return result;
}

}  // namespace ddvar
