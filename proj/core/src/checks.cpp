/*
 * (C) Copyright 2026 The ddvar Authors
 *
 * This software is licensed under the terms of the Apache Licence Version 2.0
 * which can be obtained at http://www.apache.org/licenses/LICENSE-2.0.
 */

#include <algorithm>
#include <cmath>
#include <functional>
#include <map>
#include <ostream>
#include <sstream>
#include <string>
#include <vector>

#include "ddvar/analysis.hpp"
#include "ddvar/experiment.hpp"
#include "ddvar/output.hpp"

namespace ddvar {

namespace {

struct Case {
  Index np;
  std::size_t j_sub;
  Index halo;
  CovarianceKind kind;
  std::uint64_t seed;

  std::string label() const {
    std::ostringstream s;
    s << "np=" << np << " J=" << j_sub << " halo=" << halo << " cov=" << to_string(kind) << " seed=" << seed;
    return s.str();
  }
};

std::vector<Case> case_matrix() {
  std::vector<Case> cases;
  std::uint64_t seed = 11;
  for (Index np : {12, 20, 31}) {
    for (std::size_t j : {1u, 2u, 3u}) {
      for (Index h : {1, 2}) {
        if (j > 1 && np / static_cast<Index>(j) < 2 * h + 1) continue;
        for (CovarianceKind kind : {CovarianceKind::Identity, CovarianceKind::Gaussian}) {
          cases.push_back({np, j, h, kind, seed++});
        }
      }
    }
  }
  return cases;
}

ProblemInstance make_case_instance(const Case& c) {
  const Grid1D grid = Grid1D::uniform(c.np);
  const CovarianceModel cov =
      c.kind == CovarianceKind::Identity ? build_identity_covariance(grid) : build_gaussian_covariance(grid, 2.0, 1.0);
  return synthesize(grid, cov, c.np / 3, 0.1, c.seed);
}

// A property returns an empty string on success, otherwise a failure note.
using Property = std::function<std::string(const Case&, const ProblemInstance&, const Decomposition&,
                                           const SolverOptions&)>;

std::string fail(const std::string& what, double value) { return what + " = " + format_real(value); }

std::string prop_factor(const Case&, const ProblemInstance& inst, const Decomposition&, const SolverOptions&) {
  const double r = factor_check(inst.cov);
  return r <= 1e-12 ? "" : fail("max|B - V V^T|", r);
}

std::string prop_rhs_identity(const Case&, const ProblemInstance& inst, const Decomposition& dec,
                              const SolverOptions&) {
  for (std::size_t i = 0; i < dec.num_subdomains(); ++i) {
    const Vector a = assemble_local(inst, dec, i, Scheme::Mps).c;
    const Vector b = assemble_local(inst, dec, i, Scheme::Ddda).c;
    if (a.size() != b.size() || !std::equal(a.data(), a.data() + a.size(), b.data()))
      return "c_i differs for subdomain " + std::to_string(i);
  }
  return "";
}

std::string prop_matrix_structure(const Case&, const ProblemInstance& inst, const Decomposition& dec,
                                  const SolverOptions&) {
  for (std::size_t i = 0; i < dec.num_subdomains(); ++i) {
    Matrix expected = assemble_local(inst, dec, i, Scheme::Ddda).a;
    for (std::size_t j : dec.neighbors(i)) expected += interface_gram(interface_coupling(inst.cov, dec, i, j).first);
    const double d = max_abs(assemble_local(inst, dec, i, Scheme::Mps).a - expected);
    if (d != 0.0) return fail("structure defect, subdomain " + std::to_string(i), d);
  }
  return "";
}

std::string prop_global_optimality(const Case& c, const ProblemInstance& inst, const Decomposition&,
                                   const SolverOptions& opts) {
  const GlobalSystem sys = assemble_global(inst);
  const Vector w = solve_global(sys, opts);
  const double res = linf(Vector(sys.a * w - sys.c));
  if (res > 1e-10 * (1.0 + linf(sys.c))) return fail("global residual", res);
  NormalStream rng(c.seed + 1000);
  const double best = cost_w(inst, w);
  for (int k = 0; k < 20; ++k) {
    const Vector delta = rng.draw(inst.np()).normalized() * 1e-3;
    if (cost_w(inst, w + delta) < best) return "perturbation lowered the cost";
  }
  return "";
}

std::string prop_local_gradient(const Case& c, const ProblemInstance& inst, const Decomposition& dec,
                                const SolverOptions&) {
  NormalStream rng(c.seed + 2000);
  for (std::size_t i = 0; i < dec.num_subdomains(); ++i) {
    const LocalSystem sys = assemble_local(inst, dec, i, Scheme::Mps);
    std::map<std::size_t, Vector> nbrs;
    for (std::size_t j : dec.neighbors(i)) nbrs[j] = rng.draw(dec.size(j));
    const Vector w = rng.draw(dec.size(i));
    const Vector g = local_gradient(sys, w, nbrs);
    Vector fd(w.size());
    for (Index k = 0; k < w.size(); ++k) {
      const double h = 1e-6 * (1.0 + std::abs(w[k]));
      Vector wp = w, wm = w;
      wp[k] += h;
      wm[k] -= h;
      fd[k] = (local_cost(inst, dec, i, wp, nbrs) - local_cost(inst, dec, i, wm, nbrs)) / (2.0 * h);
    }
    const double rel = (g - fd).norm() / std::max(1.0, g.norm());
    if (rel > 1e-6) return fail("gradient relative error, subdomain " + std::to_string(i), rel);
  }
  return "";
}

std::string prop_single_subdomain(const Case& c, const ProblemInstance& inst, const Decomposition& dec,
                                  const SolverOptions& opts) {
  if (c.j_sub != 1) return "";
  const Vector w = solve_global(assemble_global(inst), opts);
  const MpsResult mps = solve_mps(assemble_all(inst, dec, Scheme::Mps), {}, opts);
  if (mps.iterations != 1 || !mps.converged) return "MPS did not converge in one sweep";
  const auto ddda = solve_ddda(assemble_all(inst, dec, Scheme::Ddda), opts);
  const double d1 = linf(Vector(mps.ws[0] - w));
  const double d2 = linf(Vector(ddda[0] - w));
  if (std::max(d1, d2) > 1e-12) return fail("|w - w_global|", std::max(d1, d2));
  return "";
}

std::string prop_mps_fixed_point(const Case&, const ProblemInstance& inst, const Decomposition& dec,
                                 const SolverOptions& opts) {
  const auto locals = assemble_all(inst, dec, Scheme::Mps);
  const MpsResult mps = solve_mps(locals, {}, opts);
  if (!mps.converged) return "MPS did not converge";
  double kappa = 1.0;
  for (const LocalSystem& s : locals) kappa = std::max(kappa, 1.0 + row_sum_norm(s.a));
  const auto res = fixed_point_residual(locals, mps.ws);
  const double worst = *std::max_element(res.begin(), res.end());
  return worst <= opts.tol * kappa ? "" : fail("fixed-point residual", worst);
}

std::string prop_patch(const Case&, const ProblemInstance& inst, const Decomposition& dec, const SolverOptions&) {
  std::vector<Vector> pieces;
  for (std::size_t i = 0; i < dec.num_subdomains(); ++i)
    pieces.push_back(subdomain_restriction(dec, i).restrict(inst.u_background));
  const Vector back = patch(dec, pieces);
  return back == inst.u_background ? "" : "patch of restrictions differs from the original";
}

std::string prop_thread_invariance(const Case&, const ProblemInstance& inst, const Decomposition& dec,
                                   const SolverOptions& opts) {
  const auto locals = assemble_all(inst, dec, Scheme::Mps);
  SolverOptions serial = opts, threaded = opts;
  serial.threads = 1;
  threaded.threads = 3;
  const MpsResult a = solve_mps(locals, {}, serial);
  const MpsResult b = solve_mps(locals, {}, threaded);
  if (a.iterations != b.iterations) return "iteration counts differ";
  for (std::size_t i = 0; i < a.ws.size(); ++i) {
    if (a.ws[i] != b.ws[i]) return "iterates differ for subdomain " + std::to_string(i);
  }
  return "";
}

}  // namespace

bool run_property_checks(std::ostream& out, const RunOptions& run_opts) {
  const std::vector<std::pair<std::string, Property>> properties = {
      {"factor_fidelity", prop_factor},
      {"rhs_identity", prop_rhs_identity},
      {"matrix_structure", prop_matrix_structure},
      {"global_optimality", prop_global_optimality},
      {"local_gradient_fd", prop_local_gradient},
      {"single_subdomain", prop_single_subdomain},
      {"mps_fixed_point", prop_mps_fixed_point},
      {"patch_consistency", prop_patch},
      {"thread_invariance", prop_thread_invariance},
  };
  const auto cases = case_matrix();
  SolverOptions opts;
  opts.threads = run_opts.threads;

  bool all_ok = true;
  for (const auto& [name, prop] : properties) {
    std::string first_failure;
    std::size_t failures = 0;
    for (const Case& c : cases) {
      std::string note;
      try {
        const ProblemInstance inst = make_case_instance(c);
        const Decomposition dec = decompose_uniform(inst.grid, c.j_sub, c.halo);
        note = prop(c, inst, dec, opts);
      } catch (const std::exception& e) {
        note = std::string("exception: ") + e.what();
      }
      if (!note.empty()) {
        if (failures++ == 0) first_failure = c.label() + ": " + note;
      }
    }
    all_ok = all_ok && failures == 0;
    out << (failures == 0 ? "PASS " : "FAIL ") << name << " (" << cases.size() - failures << "/" << cases.size()
        << " configs)";
    if (failures > 0) out << "  first failure: " << first_failure;
    out << '\n';
  }
  out << (all_ok ? "all properties hold\n" : "property check FAILED\n");
  return all_ok;
}

}  // namespace ddvar
