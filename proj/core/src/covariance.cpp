/*
 * (C) Copyright 2026 The ddvar Authors
 *
 * This software is licensed under the terms of the Apache Licence Version 2.0
 * which can be obtained at http://www.apache.org/licenses/LICENSE-2.0.
 */

#include "ddvar/covariance.hpp"

#include <cmath>
#include <string>

#include "ddvar/errors.hpp"

namespace ddvar {

std::string_view to_string(CovarianceKind kind) {
  switch (kind) {
    case CovarianceKind::Identity:
      return "identity";
    case CovarianceKind::Gaussian:
      return "gaussian";
  }
  return "unknown";
}

ObsCovariance::ObsCovariance(Vector diag) : r_diag(std::move(diag)) {
  for (Index k = 0; k < r_diag.size(); ++k) {
    if (!(r_diag[k] > 0.0) || !std::isfinite(r_diag[k]))
      throw Error(ErrorCode::InvalidArgument,
                  "observation error variance at " + std::to_string(k) + " must be positive");
  }
}

namespace {

Matrix cholesky_lower(const Matrix& b) {
  Eigen::LLT<Matrix> llt(b);
  if (llt.info() != Eigen::Success)
    throw FactorizationError(-1, "background covariance is not positive definite");
  return llt.matrixL();
}

}  // namespace

CovarianceModel build_identity_covariance(const Grid1D& grid) {
  CovarianceModel m;
  m.b = Matrix::Identity(grid.np(), grid.np());
  m.v_factor = m.b;
  m.kind = CovarianceKind::Identity;
  return m;
}

CovarianceModel build_gaussian_covariance(const Grid1D& grid, double length_scale, double sigma_b) {
  if (!(length_scale > 0.0) || !std::isfinite(length_scale))
    throw Error(ErrorCode::InvalidArgument, "length_scale must be > 0");
  if (!(sigma_b > 0.0) || !std::isfinite(sigma_b))
    throw Error(ErrorCode::InvalidArgument, "sigma_b must be > 0");

  const Index np = grid.np();
  const double var = sigma_b * sigma_b;
  const double denom = 2.0 * length_scale * length_scale;
  CovarianceModel m;
  m.b.resize(np, np);
  for (Index p = 0; p < np; ++p) {
    for (Index q = 0; q < np; ++q) {
      const double dx = grid.coord(p) - grid.coord(q);
      m.b(p, q) = var * std::exp(-(dx * dx) / denom);
    }
    m.b(p, p) += kGaussianJitter * var;
  }
  m.v_factor = cholesky_lower(m.b);
  m.kind = CovarianceKind::Gaussian;
  m.length_scale = length_scale;
  m.sigma_b = sigma_b;
  return m;
}

double factor_check(const CovarianceModel& model) {
  const Matrix product = model.v_factor * model.v_factor.transpose();
  return max_abs(model.b - product);
}

std::pair<Matrix, Matrix> interface_coupling(const CovarianceModel& model, const Decomposition& dec,
                                             std::size_t i, std::size_t j) {
  const SelectionMap gamma = interface_restriction(dec, i, j);
  const SelectionMap omega_i = subdomain_restriction(dec, i);
  const SelectionMap omega_j = subdomain_restriction(dec, j);
  return {restrict_matrix(gamma, omega_i, model.v_factor), restrict_matrix(gamma, omega_j, model.v_factor)};
}

Matrix local_factor(const CovarianceModel& model, const Decomposition& dec, std::size_t i) {
  const SelectionMap omega = subdomain_restriction(dec, i);
  return restrict_matrix(omega, omega, model.v_factor);
}

Matrix local_covariance(const CovarianceModel& model, const Decomposition& dec, std::size_t i) {
  const SelectionMap omega = subdomain_restriction(dec, i);
  return restrict_matrix(omega, omega, model.b);
}

}  // namespace ddvar
