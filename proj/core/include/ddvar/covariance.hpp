/*
 * (C) Copyright 2026 The ddvar Authors
 *
 * This software is licensed under the terms of the Apache Licence Version 2.0
 * which can be obtained at http://www.apache.org/licenses/LICENSE-2.0.
 */

#pragma once

#include <cstddef>
#include <string_view>
#include <utility>

#include "ddvar/geometry.hpp"
#include "ddvar/types.hpp"

namespace ddvar {

enum class CovarianceKind { Identity, Gaussian };

std::string_view to_string(CovarianceKind kind);

/// Relative diagonal jitter added to the Gaussian kernel before factorization.
inline constexpr double kGaussianJitter = 1e-10;

/**
 * Background error covariance B together with its lower-triangular Cholesky
 * factor V (B = V V^T). V is the control-variable transform: increments are
 * represented as V w.
 */
struct CovarianceModel {
  Matrix b;
  Matrix v_factor;
  CovarianceKind kind = CovarianceKind::Identity;
  double length_scale = 0.0;  // Gaussian only
  double sigma_b = 1.0;

  Index np() const { return b.rows(); }
};

/// Diagonal observation-error covariance R.
struct ObsCovariance {
  Vector r_diag;

  explicit ObsCovariance(Vector diag);
  Index size() const { return r_diag.size(); }
};

CovarianceModel build_identity_covariance(const Grid1D& grid);

/// B(p,q) = sigma_b^2 exp(-(x_p - x_q)^2 / (2 L^2)) + jitter * sigma_b^2 * delta_pq.
CovarianceModel build_gaussian_covariance(const Grid1D& grid, double length_scale, double sigma_b);

/// max |B - V V^T|
double factor_check(const CovarianceModel& model);

/**
 * Interface penalty operators between subdomains i and j.
 *
 * first  = P_i = V[Gamma_ij, Omega_i]  (t_ij x r_i)
 * second = P_j = V[Gamma_ij, Omega_j]  (t_ij x r_j)
 *
 * P_i w_i is the physical increment from subdomain i evaluated on Gamma_ij; the
 * penalty is 1/2 |P_i w_i - P_j w_j|^2.
 */
std::pair<Matrix, Matrix> interface_coupling(const CovarianceModel& model, const Decomposition& dec,
                                             std::size_t i, std::size_t j);

/// V_i = V[Omega_i, Omega_i]
Matrix local_factor(const CovarianceModel& model, const Decomposition& dec, std::size_t i);

/// B_i = B[Omega_i, Omega_i]
Matrix local_covariance(const CovarianceModel& model, const Decomposition& dec, std::size_t i);

}  // namespace ddvar
