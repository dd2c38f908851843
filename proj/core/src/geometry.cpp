/*
 * (C) Copyright 2026 The ddvar Authors
 *
 * This software is licensed under the terms of the Apache Licence Version 2.0
 * which can be obtained at http://www.apache.org/licenses/LICENSE-2.0.
 */

#include "ddvar/geometry.hpp"

#include <algorithm>
#include <string>

#include "ddvar/errors.hpp"

namespace ddvar {

namespace {

const std::vector<Index> kEmpty;

std::vector<Index> intersect(const IndexRange& a, const IndexRange& b) {
  std::vector<Index> out;
  for (Index p = std::max(a.begin, b.begin); p < std::min(a.end, b.end); ++p) out.push_back(p);
  return out;
}

}  // namespace

// ---------------------------------------------------------------------------
Grid1D::Grid1D(std::vector<double> coords) : coords_(std::move(coords)) {
  if (coords_.empty()) throw Error(ErrorCode::InvalidArgument, "grid needs at least one point");
  for (std::size_t p = 1; p < coords_.size(); ++p) {
    if (!(coords_[p] > coords_[p - 1]))
      throw Error(ErrorCode::InvalidArgument,
                  "grid coordinates must be strictly increasing (index " + std::to_string(p) + ")");
  }
}

Grid1D Grid1D::uniform(Index np, double spacing) {
  if (np < 1) throw Error(ErrorCode::InvalidArgument, "np must be >= 1");
  if (!(spacing > 0.0)) throw Error(ErrorCode::InvalidArgument, "grid spacing must be > 0");
  std::vector<double> coords(static_cast<std::size_t>(np));
  for (Index p = 0; p < np; ++p) coords[static_cast<std::size_t>(p)] = spacing * static_cast<double>(p);
  return Grid1D(std::move(coords));
}

// ---------------------------------------------------------------------------
Decomposition::Decomposition(Grid1D grid, std::size_t j_sub, Index halo,
                             std::vector<IndexRange> subdomains)
    : grid_(std::move(grid)), halo_(halo), subdomains_(std::move(subdomains)) {
  if (subdomains_.size() != j_sub || j_sub == 0)
    throw Error(ErrorCode::InvalidDecomposition, "subdomain count does not match J");
  if (halo_ < 0) throw Error(ErrorCode::InvalidDecomposition, "halo must be >= 0");

  std::vector<bool> covered(static_cast<std::size_t>(grid_.np()), false);
  for (std::size_t i = 0; i < j_sub; ++i) {
    const IndexRange& r = subdomains_[i];
    if (r.begin < 0 || r.end > grid_.np() || r.size() < 1)
      throw Error(ErrorCode::InvalidDecomposition,
                  "subdomain " + std::to_string(i) + " is empty or leaves the grid");
    if (i > 0 && (r.begin <= subdomains_[i - 1].begin || r.end <= subdomains_[i - 1].end))
      throw Error(ErrorCode::InvalidDecomposition, "subdomains must be ordered left to right");
    for (Index p = r.begin; p < r.end; ++p) covered[static_cast<std::size_t>(p)] = true;
  }
  if (std::find(covered.begin(), covered.end(), false) != covered.end())
    throw Error(ErrorCode::InvalidDecomposition, "subdomains do not cover the grid");

  for (std::size_t i = 0; i < j_sub; ++i) {
    for (std::size_t j = 0; j < j_sub; ++j) {
      if (i == j) continue;
      auto shared = intersect(subdomains_[i], subdomains_[j]);
      if (shared.empty()) continue;
      if (i + 1 != j && j + 1 != i)
        throw Error(ErrorCode::InvalidDecomposition, "only neighbouring subdomains may overlap");

      const IndexRange& own = subdomains_[i];
      IndexRange edge = (j > i) ? IndexRange{std::max(own.begin, own.end - halo_), own.end}
                                : IndexRange{own.begin, std::min(own.end, own.begin + halo_)};
      auto gamma = intersect(edge, subdomains_[j]);
      overlaps_[{i, j}] = std::move(shared);
      if (!gamma.empty()) interfaces_[{i, j}] = std::move(gamma);
    }
  }
}

void Decomposition::check_id(std::size_t i) const {
  if (i >= subdomains_.size())
    throw Error(ErrorCode::IndexOutOfRange, "subdomain id " + std::to_string(i) + " out of range [0, " +
                                                std::to_string(subdomains_.size()) + ")");
}

const IndexRange& Decomposition::subdomain(std::size_t i) const {
  check_id(i);
  return subdomains_[i];
}

std::vector<Index> Decomposition::indices(std::size_t i) const {
  const IndexRange& r = subdomain(i);
  std::vector<Index> out;
  out.reserve(static_cast<std::size_t>(r.size()));
  for (Index p = r.begin; p < r.end; ++p) out.push_back(p);
  return out;
}

std::vector<std::size_t> Decomposition::neighbors(std::size_t i) const {
  check_id(i);
  std::vector<std::size_t> out;
  for (const auto& [key, gamma] : interfaces_) {
    if (key.first == i) out.push_back(key.second);
  }
  return out;
}

bool Decomposition::adjacent(std::size_t i, std::size_t j) const {
  check_id(i);
  check_id(j);
  return interfaces_.count({i, j}) > 0;
}

const std::vector<Index>& Decomposition::overlap(std::size_t i, std::size_t j) const {
  check_id(i);
  check_id(j);
  auto it = overlaps_.find({i, j});
  return it == overlaps_.end() ? kEmpty : it->second;
}

const std::vector<Index>& Decomposition::interface(std::size_t i, std::size_t j) const {
  check_id(i);
  check_id(j);
  auto it = interfaces_.find({i, j});
  return it == interfaces_.end() ? kEmpty : it->second;
}

// ---------------------------------------------------------------------------
SelectionMap::SelectionMap(Index source_dim, std::vector<Index> selected)
    : source_dim_(source_dim), selected_(std::move(selected)) {
  if (source_dim_ < 0) throw Error(ErrorCode::InvalidArgument, "negative source dimension");
  std::vector<bool> seen(static_cast<std::size_t>(source_dim_), false);
  for (Index p : selected_) {
    if (p < 0 || p >= source_dim_)
      throw Error(ErrorCode::IndexOutOfRange, "selected index " + std::to_string(p) + " outside [0, " +
                                                  std::to_string(source_dim_) + ")");
    if (seen[static_cast<std::size_t>(p)])
      throw Error(ErrorCode::InvalidArgument, "duplicate selected index " + std::to_string(p));
    seen[static_cast<std::size_t>(p)] = true;
  }
}

SelectionMap SelectionMap::identity(Index n) {
  std::vector<Index> all(static_cast<std::size_t>(n));
  for (Index p = 0; p < n; ++p) all[static_cast<std::size_t>(p)] = p;
  return SelectionMap(n, std::move(all));
}

std::optional<Index> SelectionMap::position_of(Index source_index) const {
  auto it = std::find(selected_.begin(), selected_.end(), source_index);
  if (it == selected_.end()) return std::nullopt;
  return static_cast<Index>(it - selected_.begin());
}

Vector SelectionMap::restrict(const Vector& v) const {
  if (v.size() != source_dim_)
    throw Error(ErrorCode::DimensionMismatch, "restrict: vector has length " + std::to_string(v.size()) +
                                                  ", expected " + std::to_string(source_dim_));
  Vector out(size());
  for (Index k = 0; k < size(); ++k) out[k] = v[(*this)[k]];
  return out;
}

Vector SelectionMap::extend(const Vector& local) const {
  if (local.size() != size())
    throw Error(ErrorCode::DimensionMismatch, "extend: vector has length " + std::to_string(local.size()) +
                                                  ", expected " + std::to_string(size()));
  Vector out = Vector::Zero(source_dim_);
  for (Index k = 0; k < size(); ++k) out[(*this)[k]] = local[k];
  return out;
}

Matrix SelectionMap::to_matrix() const {
  Matrix m = Matrix::Zero(size(), source_dim_);
  for (Index k = 0; k < size(); ++k) m(k, (*this)[k]) = 1.0;
  return m;
}

// ---------------------------------------------------------------------------
Decomposition decompose_uniform(const Grid1D& grid, std::size_t j_sub, Index halo) {
  const Index np = grid.np();
  const auto nsub = static_cast<Index>(j_sub);
  if (j_sub < 1) throw Error(ErrorCode::InvalidDecomposition, "J must be >= 1");
  if (halo < 0) throw Error(ErrorCode::InvalidDecomposition, "halo must be >= 0");
  if (np < nsub)
    throw Error(ErrorCode::InvalidDecomposition,
                "grid has " + std::to_string(np) + " points, fewer than J = " + std::to_string(j_sub));
  const Index base = np / nsub;
  const Index extra = np % nsub;
  if (j_sub > 1 && base < 2 * halo + 1)
    throw Error(ErrorCode::InvalidDecomposition,
                "blocks of " + std::to_string(base) + " points are too small for halo " +
                    std::to_string(halo) + " (need >= 2*halo+1)");

  std::vector<IndexRange> ranges;
  ranges.reserve(j_sub);
  Index start = 0;
  for (Index k = 0; k < nsub; ++k) {
    const Index len = base + (k < extra ? 1 : 0);
    IndexRange r{start, start + len};
    if (k > 0) r.begin -= halo;
    if (k + 1 < nsub) r.end += halo;
    ranges.push_back(r);
    start += len;
  }
  return Decomposition(grid, j_sub, halo, std::move(ranges));
}

SelectionMap subdomain_restriction(const Decomposition& dec, std::size_t i) {
  return SelectionMap(dec.np(), dec.indices(i));
}

SelectionMap interface_restriction(const Decomposition& dec, std::size_t i, std::size_t j) {
  const auto& gamma = dec.interface(i, j);
  if (gamma.empty())
    throw Error(ErrorCode::NoInterface,
                "subdomains " + std::to_string(i) + " and " + std::to_string(j) + " share no interface");
  return SelectionMap(dec.np(), gamma);
}

Vector restrict_vector(const SelectionMap& map, const Vector& v) { return map.restrict(v); }

Vector extend_vector(const SelectionMap& map, const Vector& local) { return map.extend(local); }

Matrix restrict_matrix(const SelectionMap& rows, const SelectionMap& cols, const Matrix& m) {
  if (m.rows() != rows.source_dim() || m.cols() != cols.source_dim())
    throw Error(ErrorCode::DimensionMismatch,
                "restrict_matrix: matrix is " + std::to_string(m.rows()) + "x" + std::to_string(m.cols()) +
                    ", maps expect " + std::to_string(rows.source_dim()) + "x" +
                    std::to_string(cols.source_dim()));
  return m(rows.indices(), cols.indices());
}

}  // namespace ddvar
