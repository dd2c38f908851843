/*
 * (C) Copyright 2026 The ddvar Authors
 *
 * This software is licensed under the terms of the Apache Licence Version 2.0
 * which can be obtained at http://www.apache.org/licenses/LICENSE-2.0.
 */

#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <random>
#include <string>
#include <string_view>
#include <vector>

#include "ddvar/covariance.hpp"
#include "ddvar/geometry.hpp"
#include "ddvar/types.hpp"

namespace ddvar {

/**
 * Point observations v at strictly increasing grid indices. H is the nobs x NP
 * selection of those indices (the linearized observation operator).
 */
struct ObservationSet {
  std::vector<Index> obs_indices;
  Vector values;
  SelectionMap h_op;
  ObsCovariance r_cov;

  Index size() const { return values.size(); }
};

ObservationSet make_observations(Index np, std::vector<Index> obs_indices, Vector values, Vector r_diag);

struct ProblemInstance {
  Grid1D grid;
  CovarianceModel cov;
  ObservationSet obs;
  Vector u_background;
  std::optional<Vector> u_truth;
  std::uint64_t seed = 0;

  Index np() const { return grid.np(); }
};

/// Validates all dimensions against grid.np().
ProblemInstance make_instance(Grid1D grid, CovarianceModel cov, ObservationSet obs, Vector u_background,
                              std::optional<Vector> u_truth = std::nullopt, std::uint64_t seed = 0);

/// d = v - H u^b
Vector innovation(const ProblemInstance& inst);

/// Observations falling inside one subdomain, in subdomain-local coordinates.
struct LocalObservations {
  std::vector<Index> rows;  ///< positions in the global observation vector
  SelectionMap h_local;     ///< n_i x r_i
  Vector r_diag;
  Vector d;                 ///< innovation slice
};

LocalObservations local_observations(const ProblemInstance& inst, const Decomposition& dec, std::size_t i,
                                     const Vector& d);

/// Equispaced observation indices floor(k * np / nobs), k = 0..nobs-1.
std::vector<Index> equispaced_indices(Index np, Index nobs);

/**
 * Standard normal stream: mt19937_64 driving Box-Muller. Pinned so that draws
 * are identical across standard library implementations.
 */
class NormalStream {
 public:
  explicit NormalStream(std::uint64_t seed) : engine_(seed) {}
  double next();
  Vector draw(Index n);

 private:
  double uniform_open();

  std::mt19937_64 engine_;
  std::optional<double> spare_;
};

/**
 * Synthetic twin experiment. Draw order from one seeded stream: z (truth),
 * z' (background error), then observation noise.
 *   u_truth = V z,  u^b = u_truth + V z',  v = H u_truth + sigma_o * eps.
 * sigma_o = 0 gives noiseless observations; R then falls back to unit
 * variances since a zero R is singular.
 */
ProblemInstance synthesize(const Grid1D& grid, const CovarianceModel& cov, Index nobs, double sigma_o,
                           std::uint64_t seed);

/**
 * Instance invariant under the reflection p -> np-1-p: unit grid, Gaussian B,
 * observations at `left_obs` and their mirror images, and mirrored truth,
 * background and observation values. `left_obs` must lie in the left half.
 */
ProblemInstance make_mirror_symmetric_instance(Index np, double length_scale, double sigma_b, double sigma_o,
                                               const std::vector<Index>& left_obs, std::uint64_t seed);

std::string instance_to_json(const ProblemInstance& inst);
ProblemInstance instance_from_json(std::string_view text);

}  // namespace ddvar
