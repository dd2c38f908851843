/*
 * (C) Copyright 2026 The ddvar Authors
 *
 * This software is licensed under the terms of the Apache Licence Version 2.0
 * which can be obtained at http://www.apache.org/licenses/LICENSE-2.0.
 */

#pragma once

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "ddvar/analysis.hpp"
#include "ddvar/covariance.hpp"
#include "ddvar/solvers.hpp"

namespace ddvar {

enum class ExperimentMethod { Global, Mps, Ddda, Compare };

std::string_view to_string(ExperimentMethod method);

/**
 * Flat experiment description. Loaded from `key = value` text; every key is
 * optional and unknown keys are rejected.
 *
 *   np = 40               grid points
 *   j_sub = 2             subdomains
 *   halo = 2              overlap half-width (points)
 *   cov_kind = gaussian   identity | gaussian
 *   length_scale = 2.0    Gaussian correlation length (grid units)
 *   sigma_b = 1.0
 *   sigma_o = 0.1
 *   nobs = np/5
 *   seed = 0
 *   method = compare      global | mps | ddda | compare
 *   tol = 1e-12
 *   max_iters = 500
 *   update_convention = v_times_w    v_times_w | binv_v_times_w
 *   local_solver = direct_cholesky   direct_cholesky | cg
 *   cg_tol = 1e-14
 *   cg_max = 10000
 *   output_dir = ddvar_out
 */
struct ExperimentConfig {
  long np = 40;
  long j_sub = 2;
  long halo = 2;
  CovarianceKind cov_kind = CovarianceKind::Gaussian;
  double length_scale = 2.0;
  double sigma_b = 1.0;
  double sigma_o = 0.1;
  std::optional<long> nobs;  ///< defaults to np / 5
  std::uint64_t seed = 0;
  ExperimentMethod method = ExperimentMethod::Compare;
  double tol = 1e-12;
  long max_iters = 500;
  UpdateConvention update_convention = UpdateConvention::VTimesW;
  LocalSolverKind local_solver = LocalSolverKind::DirectCholesky;
  double cg_tol = 1e-14;
  long cg_max = 10000;
  std::filesystem::path output_dir = "ddvar_out";

  long effective_nobs() const { return nobs.value_or(np / 5); }
};

/// Keys accepted by the config parser, in canonical order.
const std::vector<std::string>& config_keys();

/// Parses `key = value` lines ('#' starts a comment) and validates the result.
ExperimentConfig parse_config(std::string_view text);
ExperimentConfig load_config(const std::filesystem::path& path);

/// Sets one key from its textual value (ParseError on unknown key / bad value).
void set_config_value(ExperimentConfig& cfg, const std::string& key, const std::string& value, int line = 0);

/// Checks geometry and solver preconditions; ValidationError names the key.
void validate_config(const ExperimentConfig& cfg);

/// Canonical `key = value` text; parse_config(config_to_text(c)) reproduces c.
std::string config_to_text(const ExperimentConfig& cfg);

struct RunOptions {
  std::size_t threads = 0;  ///< 0: implementation default
};

/// Reads DDVAR_THREADS; absent or empty gives 0.
std::size_t threads_from_env();

ProblemInstance build_instance(const ExperimentConfig& cfg);
Decomposition build_decomposition(const ExperimentConfig& cfg);
SolverOptions build_solver_options(const ExperimentConfig& cfg, const RunOptions& run_opts);

/**
 * Runs one experiment and writes result.json (and history.csv for MPS-based
 * methods) into cfg.output_dir. Summary goes to `out`, errors to `err`.
 * Returns 0 on success, 2 when MPS hit max_iters, 1 on error.
 */
int run_experiment(const ExperimentConfig& cfg, const RunOptions& run_opts, std::ostream& out, std::ostream& err);

/// One run per value with `key` overridden; outputs go to <output_dir>/<key>=<value>.
int run_sweep(const ExperimentConfig& base, const std::string& key, const std::vector<std::string>& values,
              const RunOptions& run_opts, std::ostream& out, std::ostream& err);

/// Built-in property suite over a matrix of small configurations. Prints one
/// PASS/FAIL line per property; returns true when all pass.
bool run_property_checks(std::ostream& out, const RunOptions& run_opts = {});

}  // namespace ddvar
