/*
 * (C) Copyright 2026 The ddvar Authors
 *
 * This software is licensed under the terms of the Apache Licence Version 2.0
 * which can be obtained at http://www.apache.org/licenses/LICENSE-2.0.
 */

#include "ddvar/assembly.hpp"

#include <string>

#include "ddvar/covariance.hpp"
#include "ddvar/errors.hpp"

namespace ddvar {

std::string_view to_string(Scheme scheme) {
  switch (scheme) {
    case Scheme::Mps:
      return "mps";
    case Scheme::Ddda:
      return "ddda";
  }
  return "unknown";
}

namespace {

// Shared by the global and local assembly so that J = 1 reproduces the global
// system bit for bit. `hv` is H V restricted to the relevant rows/columns.
GlobalSystem normal_equations(const Matrix& hv, const Vector& r_diag, const Vector& d) {
  const Vector inv_r = r_diag.cwiseInverse();
  const Matrix scaled = inv_r.cwiseSqrt().asDiagonal() * hv;
  Matrix a = interface_gram(scaled);
  a.diagonal().array() += 1.0;
  Vector c = hv.transpose() * inv_r.cwiseProduct(d);
  return GlobalSystem{std::move(a), std::move(c)};
}

}  // namespace

Matrix interface_gram(const Matrix& p) {
  const Matrix g = p.transpose() * p;
  return g.selfadjointView<Eigen::Lower>();
}

GlobalSystem assemble_global(const ProblemInstance& inst) {
  const Vector d = innovation(inst);
  const SelectionMap all = SelectionMap::identity(inst.np());
  const Matrix hv = restrict_matrix(inst.obs.h_op, all, inst.cov.v_factor);
  return normal_equations(hv, inst.obs.r_cov.r_diag, d);
}

LocalSystem assemble_local(const ProblemInstance& inst, const Decomposition& dec, std::size_t i, Scheme scheme) {
  if (dec.np() != inst.np())
    throw Error(ErrorCode::DimensionMismatch, "decomposition and instance disagree on np");
  const Vector d = innovation(inst);
  const LocalObservations local = local_observations(inst, dec, i, d);
  const Matrix v_i = local_factor(inst.cov, dec, i);
  const Matrix hv = restrict_matrix(local.h_local, SelectionMap::identity(v_i.cols()), v_i);
  GlobalSystem base = normal_equations(hv, local.r_diag, local.d);

  LocalSystem sys;
  sys.subdomain = i;
  sys.scheme = scheme;
  sys.a = std::move(base.a);
  sys.c = std::move(base.c);
  if (scheme == Scheme::Mps) {
    for (std::size_t j : dec.neighbors(i)) {
      auto [p_i, p_j] = interface_coupling(inst.cov, dec, i, j);
      sys.a += interface_gram(p_i);
      sys.couplings.push_back(Coupling{j, p_i.transpose() * p_j});
    }
  }
  return sys;
}

std::vector<LocalSystem> assemble_all(const ProblemInstance& inst, const Decomposition& dec, Scheme scheme) {
  std::vector<LocalSystem> out;
  out.reserve(dec.num_subdomains());
  for (std::size_t i = 0; i < dec.num_subdomains(); ++i) out.push_back(assemble_local(inst, dec, i, scheme));
  return out;
}

double cost_w(const ProblemInstance& inst, const Vector& w) {
  if (w.size() != inst.np())
    throw Error(ErrorCode::DimensionMismatch, "cost_w: w has length " + std::to_string(w.size()) +
                                                  ", expected " + std::to_string(inst.np()));
  const Vector misfit = inst.obs.h_op.restrict(inst.cov.v_factor * w) - innovation(inst);
  return 0.5 * w.squaredNorm() + 0.5 * misfit.dot(inst.obs.r_cov.r_diag.cwiseInverse().cwiseProduct(misfit));
}

double local_cost(const ProblemInstance& inst, const Decomposition& dec, std::size_t i, const Vector& w_i,
                  const std::map<std::size_t, Vector>& neighbor_ws) {
  if (w_i.size() != dec.size(i)) throw Error(ErrorCode::DimensionMismatch, "local_cost: w_i has wrong length");
  const LocalObservations local = local_observations(inst, dec, i, innovation(inst));
  const Vector misfit = local.h_local.restrict(local_factor(inst.cov, dec, i) * w_i) - local.d;
  double value = 0.5 * w_i.squaredNorm() + 0.5 * misfit.dot(local.r_diag.cwiseInverse().cwiseProduct(misfit));
  for (std::size_t j : dec.neighbors(i)) {
    auto it = neighbor_ws.find(j);
    if (it == neighbor_ws.end())
      throw Error(ErrorCode::MissingNeighbor, "local_cost: no iterate for neighbour " + std::to_string(j));
    auto [p_i, p_j] = interface_coupling(inst.cov, dec, i, j);
    if (it->second.size() != p_j.cols())
      throw Error(ErrorCode::DimensionMismatch, "local_cost: neighbour iterate has wrong length");
    value += 0.5 * (p_i * w_i - p_j * it->second).squaredNorm();
  }
  return value;
}

Vector local_gradient(const LocalSystem& sys, const Vector& w_i, const std::map<std::size_t, Vector>& neighbor_ws) {
  if (w_i.size() != sys.size()) throw Error(ErrorCode::DimensionMismatch, "local_gradient: w_i has wrong length");
  Vector g = sys.a * w_i - sys.c;
  for (const Coupling& cp : sys.couplings) {
    auto it = neighbor_ws.find(cp.neighbor);
    if (it == neighbor_ws.end())
      throw Error(ErrorCode::MissingNeighbor,
                  "local_gradient: no iterate for neighbour " + std::to_string(cp.neighbor));
    if (it->second.size() != cp.block.cols())
      throw Error(ErrorCode::DimensionMismatch, "local_gradient: neighbour iterate has wrong length");
    g -= cp.block * it->second;
  }
  return g;
}

}  // namespace ddvar
