/*
 * (C) Copyright 2026 The ddvar Authors
 *
 * This software is licensed under the terms of the Apache Licence Version 2.0
 * which can be obtained at http://www.apache.org/licenses/LICENSE-2.0.
 */

#include "ddvar/analysis.hpp"

#include <algorithm>
#include <string>

#include "ddvar/covariance.hpp"
#include "ddvar/errors.hpp"

namespace ddvar {

std::string_view to_string(Method method) {
  switch (method) {
    case Method::Global:
      return "global";
    case Method::Mps:
      return "mps";
    case Method::Ddda:
      return "ddda";
  }
  return "unknown";
}

std::string_view to_string(UpdateConvention convention) {
  switch (convention) {
    case UpdateConvention::VTimesW:
      return "v_times_w";
    case UpdateConvention::BinvVTimesW:
      return "binv_v_times_w";
  }
  return "unknown";
}

Vector local_update(const ProblemInstance& inst, const Decomposition& dec, std::size_t i, const Vector& w_i,
                    UpdateConvention convention) {
  if (w_i.size() != dec.size(i))
    throw Error(ErrorCode::DimensionMismatch, "local_update: w_i has length " + std::to_string(w_i.size()) +
                                                  ", expected " + std::to_string(dec.size(i)));
  const SelectionMap omega = subdomain_restriction(dec, i);
  const Vector increment = local_factor(inst.cov, dec, i) * w_i;
  if (convention == UpdateConvention::VTimesW) return omega.restrict(inst.u_background) + increment;

  Eigen::LLT<Matrix> llt(local_covariance(inst.cov, dec, i));
  if (llt.info() != Eigen::Success)
    throw FactorizationError(static_cast<long>(i), "local background covariance is singular");
  return omega.restrict(inst.u_background) + llt.solve(increment);
}

Vector patch(const Decomposition& dec, const std::vector<Vector>& local_us) {
  if (local_us.size() != dec.num_subdomains())
    throw Error(ErrorCode::DimensionMismatch, "patch: expected one vector per subdomain");
  Vector out = Vector::Zero(dec.np());
  std::vector<bool> assigned(static_cast<std::size_t>(dec.np()), false);
  for (std::size_t i = 0; i < local_us.size(); ++i) {
    const IndexRange& r = dec.subdomain(i);
    if (local_us[i].size() != r.size())
      throw Error(ErrorCode::DimensionMismatch, "patch: vector " + std::to_string(i) + " has wrong length");
    out.segment(r.begin, r.size()) = local_us[i];
    std::fill(assigned.begin() + r.begin, assigned.begin() + r.end, true);
  }
  auto gap = std::find(assigned.begin(), assigned.end(), false);
  if (gap != assigned.end())
    throw Error(ErrorCode::UncoveredPoint,
                "grid point " + std::to_string(gap - assigned.begin()) + " is in no subdomain");
  return out;
}

double interface_mismatch(const CovarianceModel& cov, const Decomposition& dec, const std::vector<Vector>& ws) {
  if (ws.size() != dec.num_subdomains())
    throw Error(ErrorCode::DimensionMismatch, "interface_mismatch: expected one vector per subdomain");
  double worst = 0.0;
  for (std::size_t i = 0; i < dec.num_subdomains(); ++i) {
    for (std::size_t j : dec.neighbors(i)) {
      auto [p_i, p_j] = interface_coupling(cov, dec, i, j);
      if (ws[i].size() != p_i.cols() || ws[j].size() != p_j.cols())
        throw Error(ErrorCode::DimensionMismatch, "interface_mismatch: iterate has wrong length");
      worst = std::max(worst, linf(Vector(p_i * ws[i] - p_j * ws[j])));
    }
  }
  return worst;
}

double analysis_cost(const ProblemInstance& inst, const Vector& u) {
  if (u.size() != inst.np()) throw Error(ErrorCode::DimensionMismatch, "analysis_cost: wrong length");
  const Vector w = inst.cov.v_factor.triangularView<Eigen::Lower>().solve(u - inst.u_background);
  return cost_w(inst, w);
}

Vector global_analysis(const ProblemInstance& inst, const Vector& w_star, UpdateConvention convention) {
  if (w_star.size() != inst.np()) throw Error(ErrorCode::DimensionMismatch, "global_analysis: wrong length");
  if (convention == UpdateConvention::VTimesW) return inst.u_background + inst.cov.v_factor * w_star;
  // B^-1 V = V^-T
  return inst.u_background + inst.cov.v_factor.transpose().triangularView<Eigen::Upper>().solve(w_star);
}

namespace {

Vector patched_analysis(const ProblemInstance& inst, const Decomposition& dec, const std::vector<Vector>& ws,
                        UpdateConvention convention) {
  std::vector<Vector> us;
  us.reserve(ws.size());
  for (std::size_t i = 0; i < ws.size(); ++i) us.push_back(local_update(inst, dec, i, ws[i], convention));
  return patch(dec, us);
}

}  // namespace

AssimilationResult assimilate(const ProblemInstance& inst, const Decomposition& dec, Method method,
                              const SolverOptions& opts, UpdateConvention convention) {
  const Vector w_global = solve_global(assemble_global(inst), opts);
  const Vector u_global = global_analysis(inst, w_global, convention);

  AssimilationResult res;
  res.scheme = method;
  switch (method) {
    case Method::Global:
      res.per_subdomain_w = {w_global};
      res.u_analysis = u_global;
      res.iterations = 1;
      break;
    case Method::Ddda:
      res.per_subdomain_w = solve_ddda(assemble_all(inst, dec, Scheme::Ddda), opts);
      res.u_analysis = patched_analysis(inst, dec, res.per_subdomain_w, convention);
      res.iterations = 1;
      break;
    case Method::Mps: {
      auto probe = [&](const std::vector<Vector>& ws) {
        return analysis_cost(inst, patched_analysis(inst, dec, ws, convention));
      };
      MpsResult mps = solve_mps(assemble_all(inst, dec, Scheme::Mps), {}, opts, probe);
      res.per_subdomain_w = std::move(mps.ws);
      res.history = std::move(mps.history);
      res.converged = mps.converged;
      res.iterations = mps.iterations;
      res.u_analysis = patched_analysis(inst, dec, res.per_subdomain_w, convention);
      break;
    }
  }
  res.diagnostics.global_cost = analysis_cost(inst, res.u_analysis);
  res.diagnostics.interface_mismatch =
      method == Method::Global ? 0.0 : interface_mismatch(inst.cov, dec, res.per_subdomain_w);
  res.diagnostics.vs_global_linf = linf(Vector(res.u_analysis - u_global));
  return res;
}

EquivalenceReport equivalence_report(const ProblemInstance& inst, const Decomposition& dec,
                                     const SolverOptions& opts, UpdateConvention convention) {
  const auto ddda = assemble_all(inst, dec, Scheme::Ddda);
  const auto mps = assemble_all(inst, dec, Scheme::Mps);

  EquivalenceReport rep;
  rep.c_equal = true;
  rep.a_structure_exact = true;
  for (std::size_t i = 0; i < dec.num_subdomains(); ++i) {
    const Vector& c_d = ddda[i].c;
    const Vector& c_m = mps[i].c;
    if (c_d.size() != c_m.size() || !std::equal(c_d.data(), c_d.data() + c_d.size(), c_m.data()))
      rep.c_equal = false;

    Matrix expected = ddda[i].a;
    for (std::size_t j : dec.neighbors(i)) expected += interface_gram(interface_coupling(inst.cov, dec, i, j).first);
    const double diff = max_abs(mps[i].a - expected);
    rep.a_structure_max_abs = std::max(rep.a_structure_max_abs, diff);
    if (diff != 0.0) rep.a_structure_exact = false;
  }

  const auto w_ddda = solve_ddda(ddda, opts);
  auto probe = [&](const std::vector<Vector>& ws) {
    return analysis_cost(inst, patched_analysis(inst, dec, ws, convention));
  };
  MpsResult run = solve_mps(mps, {}, opts, probe);

  rep.interface_mismatch = interface_mismatch(inst.cov, dec, w_ddda);
  const auto res = fixed_point_residual(mps, w_ddda);
  rep.ddda_in_mps_residual = res.empty() ? 0.0 : *std::max_element(res.begin(), res.end());
  for (std::size_t i = 0; i < w_ddda.size(); ++i) {
    const double delta = linf(Vector(run.ws[i] - w_ddda[i]));
    rep.w_delta_per_subdomain.push_back(delta);
    rep.w_delta_linf = std::max(rep.w_delta_linf, delta);
  }
  const Vector w_global = solve_global(assemble_global(inst), opts);
  rep.cost_global = analysis_cost(inst, global_analysis(inst, w_global, convention));
  rep.cost_mps = analysis_cost(inst, patched_analysis(inst, dec, run.ws, convention));
  rep.cost_ddda = analysis_cost(inst, patched_analysis(inst, dec, w_ddda, convention));
  rep.iters_mps = run.iterations;
  rep.mps_converged = run.converged;
  rep.history_mps = std::move(run.history);
  return rep;
}

}  // namespace ddvar
