/*
 * (C) Copyright 2026 The ddvar Authors
 *
 * This software is licensed under the terms of the Apache Licence Version 2.0
 * which can be obtained at http://www.apache.org/licenses/LICENSE-2.0.
 */

#include "ddvar/observation.hpp"

#include <cmath>
#include <numbers>

#include "ddvar/errors.hpp"
#include "json.hpp"

namespace ddvar {

ObservationSet make_observations(Index np, std::vector<Index> obs_indices, Vector values, Vector r_diag) {
  const auto nobs = static_cast<Index>(obs_indices.size());
  if (nobs > np)
    throw Error(ErrorCode::InvalidArgument, "more observations than grid points");
  if (values.size() != nobs || r_diag.size() != nobs)
    throw Error(ErrorCode::DimensionMismatch, "observation values / variances do not match obs_indices");
  for (std::size_t k = 1; k < obs_indices.size(); ++k) {
    if (obs_indices[k] <= obs_indices[k - 1])
      throw Error(ErrorCode::InvalidArgument, "observation indices must be strictly increasing");
  }
  SelectionMap h(np, obs_indices);
  return ObservationSet{std::move(obs_indices), std::move(values), std::move(h), ObsCovariance(std::move(r_diag))};
}

ProblemInstance make_instance(Grid1D grid, CovarianceModel cov, ObservationSet obs, Vector u_background,
                              std::optional<Vector> u_truth, std::uint64_t seed) {
  const Index np = grid.np();
  if (cov.b.rows() != np || cov.b.cols() != np || cov.v_factor.rows() != np || cov.v_factor.cols() != np)
    throw Error(ErrorCode::DimensionMismatch, "covariance size does not match the grid");
  if (obs.h_op.source_dim() != np)
    throw Error(ErrorCode::DimensionMismatch, "observation operator does not act on the grid");
  if (u_background.size() != np)
    throw Error(ErrorCode::DimensionMismatch, "background length does not match the grid");
  if (u_truth && u_truth->size() != np)
    throw Error(ErrorCode::DimensionMismatch, "truth length does not match the grid");
  return ProblemInstance{std::move(grid), std::move(cov), std::move(obs), std::move(u_background),
                         std::move(u_truth), seed};
}

Vector innovation(const ProblemInstance& inst) {
  if (inst.u_background.size() != inst.obs.h_op.source_dim())
    throw Error(ErrorCode::DimensionMismatch, "background does not match the observation operator");
  return inst.obs.values - inst.obs.h_op.restrict(inst.u_background);
}

LocalObservations local_observations(const ProblemInstance& inst, const Decomposition& dec, std::size_t i,
                                     const Vector& d) {
  if (d.size() != inst.obs.size())
    throw Error(ErrorCode::DimensionMismatch, "innovation length does not match the observations");
  const IndexRange& omega = dec.subdomain(i);
  std::vector<Index> rows;
  std::vector<Index> local_pos;
  for (Index k = 0; k < inst.obs.size(); ++k) {
    const Index p = inst.obs.obs_indices[static_cast<std::size_t>(k)];
    if (omega.contains(p)) {
      rows.push_back(k);
      local_pos.push_back(p - omega.begin);
    }
  }
  const auto n = static_cast<Index>(rows.size());
  Vector r(n);
  Vector di(n);
  for (Index k = 0; k < n; ++k) {
    r[k] = inst.obs.r_cov.r_diag[rows[static_cast<std::size_t>(k)]];
    di[k] = d[rows[static_cast<std::size_t>(k)]];
  }
  return LocalObservations{std::move(rows), SelectionMap(omega.size(), std::move(local_pos)), std::move(r),
                           std::move(di)};
}

std::vector<Index> equispaced_indices(Index np, Index nobs) {
  if (nobs < 0 || nobs > np) throw Error(ErrorCode::InvalidArgument, "need 0 <= nobs <= np");
  std::vector<Index> out;
  out.reserve(static_cast<std::size_t>(nobs));
  for (Index k = 0; k < nobs; ++k) out.push_back(k * np / nobs);
  return out;
}

// ---------------------------------------------------------------------------
double NormalStream::uniform_open() {
  // 53 random bits mapped to the open interval (0, 1).
  const std::uint64_t bits = engine_() >> 11;
  return (static_cast<double>(bits) + 0.5) * 0x1.0p-53;
}

double NormalStream::next() {
  if (spare_) {
    const double z = *spare_;
    spare_.reset();
    return z;
  }
  const double u1 = uniform_open();
  const double u2 = uniform_open();
  const double radius = std::sqrt(-2.0 * std::log(u1));
  const double angle = 2.0 * std::numbers::pi * u2;
  spare_ = radius * std::sin(angle);
  return radius * std::cos(angle);
}

Vector NormalStream::draw(Index n) {
  Vector z(n);
  for (Index k = 0; k < n; ++k) z[k] = next();
  return z;
}

ProblemInstance synthesize(const Grid1D& grid, const CovarianceModel& cov, Index nobs, double sigma_o,
                           std::uint64_t seed) {
  const Index np = grid.np();
  if (nobs < 0 || nobs > np) throw Error(ErrorCode::InvalidArgument, "need 0 <= nobs <= np");
  if (!(sigma_o >= 0.0) || !std::isfinite(sigma_o))
    throw Error(ErrorCode::InvalidArgument, "sigma_o must be >= 0");
  if (cov.np() != np) throw Error(ErrorCode::DimensionMismatch, "covariance size does not match the grid");

  NormalStream stream(seed);
  const Vector z = stream.draw(np);
  const Vector z_bg = stream.draw(np);
  const Vector eps = stream.draw(nobs);

  Vector truth = cov.v_factor * z;
  Vector background = truth + cov.v_factor * z_bg;

  auto indices = equispaced_indices(np, nobs);
  const SelectionMap h(np, indices);
  Vector values = h.restrict(truth) + sigma_o * eps;
  const double variance = sigma_o > 0.0 ? sigma_o * sigma_o : 1.0;
  Vector r_diag = Vector::Constant(nobs, variance);

  auto obs = make_observations(np, std::move(indices), std::move(values), std::move(r_diag));
  return make_instance(grid, cov, std::move(obs), std::move(background), std::move(truth), seed);
}

ProblemInstance make_mirror_symmetric_instance(Index np, double length_scale, double sigma_b, double sigma_o,
                                               const std::vector<Index>& left_obs, std::uint64_t seed) {
  if (np < 2 || np % 2 != 0) throw Error(ErrorCode::InvalidArgument, "mirror-symmetric instance needs even np");
  if (!(sigma_o > 0.0)) throw Error(ErrorCode::InvalidArgument, "sigma_o must be > 0");
  const Index half = np / 2;
  for (std::size_t k = 0; k < left_obs.size(); ++k) {
    if (left_obs[k] < 0 || left_obs[k] >= half || (k > 0 && left_obs[k] <= left_obs[k - 1]))
      throw Error(ErrorCode::InvalidArgument, "left_obs must be increasing indices in [0, np/2)");
  }

  const Grid1D grid = Grid1D::uniform(np);
  CovarianceModel cov = build_gaussian_covariance(grid, length_scale, sigma_b);

  NormalStream stream(seed);
  const Vector raw_truth = cov.v_factor * stream.draw(np);
  const Vector raw_error = cov.v_factor * stream.draw(np);
  const Vector eps = stream.draw(static_cast<Index>(left_obs.size()));

  auto mirror = [&](const Vector& v) {
    Vector out(np);
    for (Index p = 0; p < half; ++p) {
      out[p] = v[p];
      out[np - 1 - p] = v[p];
    }
    return out;
  };
  Vector truth = mirror(raw_truth);
  Vector background = truth + mirror(raw_error);

  const auto nleft = static_cast<Index>(left_obs.size());
  std::vector<Index> indices(left_obs);
  for (auto it = left_obs.rbegin(); it != left_obs.rend(); ++it) indices.push_back(np - 1 - *it);
  Vector values(2 * nleft);
  for (Index k = 0; k < nleft; ++k) {
    const double v = truth[left_obs[static_cast<std::size_t>(k)]] + sigma_o * eps[k];
    values[k] = v;
    values[2 * nleft - 1 - k] = v;
  }
  Vector r_diag = Vector::Constant(2 * nleft, sigma_o * sigma_o);
  auto obs = make_observations(np, std::move(indices), std::move(values), std::move(r_diag));
  return make_instance(grid, std::move(cov), std::move(obs), std::move(background), std::move(truth), seed);
}

// ---------------------------------------------------------------------------
namespace {

std::vector<double> to_std(const Vector& v) { return std::vector<double>(v.data(), v.data() + v.size()); }

Vector from_std(const std::vector<double>& v) {
  Vector out(static_cast<Index>(v.size()));
  for (std::size_t k = 0; k < v.size(); ++k) out[static_cast<Index>(k)] = v[k];
  return out;
}

}  // namespace

std::string instance_to_json(const ProblemInstance& inst) {
  nlohmann::json j;
  j["coords"] = inst.grid.coords();
  j["covariance"] = {{"kind", std::string(to_string(inst.cov.kind))},
                     {"length_scale", inst.cov.length_scale},
                     {"sigma_b", inst.cov.sigma_b}};
  j["obs_indices"] = inst.obs.obs_indices;
  j["obs_values"] = to_std(inst.obs.values);
  j["r_diag"] = to_std(inst.obs.r_cov.r_diag);
  j["u_background"] = to_std(inst.u_background);
  if (inst.u_truth) j["u_truth"] = to_std(*inst.u_truth);
  j["seed"] = inst.seed;
  return j.dump(1);
}

ProblemInstance instance_from_json(std::string_view text) {
  nlohmann::json j;
  try {
    j = nlohmann::json::parse(text);
    Grid1D grid(j.at("coords").get<std::vector<double>>());
    const auto& c = j.at("covariance");
    const auto kind = c.at("kind").get<std::string>();
    CovarianceModel cov;
    if (kind == "identity") {
      cov = build_identity_covariance(grid);
    } else if (kind == "gaussian") {
      cov = build_gaussian_covariance(grid, c.at("length_scale").get<double>(), c.at("sigma_b").get<double>());
    } else {
      throw Error(ErrorCode::ParseError, "unknown covariance kind '" + kind + "'");
    }
    auto obs = make_observations(grid.np(), j.at("obs_indices").get<std::vector<Index>>(),
                                 from_std(j.at("obs_values").get<std::vector<double>>()),
                                 from_std(j.at("r_diag").get<std::vector<double>>()));
    std::optional<Vector> truth;
    if (j.contains("u_truth")) truth = from_std(j.at("u_truth").get<std::vector<double>>());
    Vector background = from_std(j.at("u_background").get<std::vector<double>>());
    return make_instance(std::move(grid), std::move(cov), std::move(obs), std::move(background), std::move(truth),
                         j.at("seed").get<std::uint64_t>());
  } catch (const nlohmann::json::exception& e) {
    throw Error(ErrorCode::ParseError, std::string("instance JSON: ") + e.what());
  }
}

}  // namespace ddvar
