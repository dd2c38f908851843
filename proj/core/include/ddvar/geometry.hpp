/*
 * (C) Copyright 2026 The ddvar Authors
 *
 * This software is licensed under the terms of the Apache Licence Version 2.0
 * which can be obtained at http://www.apache.org/licenses/LICENSE-2.0.
 */

#pragma once

#include <cstddef>
#include <map>
#include <optional>
#include <utility>
#include <vector>

#include "ddvar/types.hpp"

namespace ddvar {

/// One-dimensional grid: NP strictly increasing coordinates.
class Grid1D {
 public:
  explicit Grid1D(std::vector<double> coords);

  /// Unit-spaced grid 0, 1, ..., np-1.
  static Grid1D uniform(Index np, double spacing = 1.0);

  Index np() const { return static_cast<Index>(coords_.size()); }
  const std::vector<double>& coords() const { return coords_; }
  double coord(Index p) const { return coords_[static_cast<std::size_t>(p)]; }

 private:
  std::vector<double> coords_;
};

/// Half-open contiguous range [begin, end) of grid indices.
struct IndexRange {
  Index begin = 0;
  Index end = 0;

  Index size() const { return end - begin; }
  bool contains(Index p) const { return p >= begin && p < end; }
};

/**
 * Overlapping split of a Grid1D into J contiguous subdomains.
 *
 * Subdomain i is its balanced base block widened by `halo` points into each
 * neighbouring block. The overlap with a neighbour j is the index set shared
 * with it; the interface of i toward j is the `halo` outermost points of
 * subdomain i that lie inside j. Only nearest neighbours (|i - j| = 1) can
 * share points.
 */
class Decomposition {
 public:
  Decomposition(Grid1D grid, std::size_t j_sub, Index halo, std::vector<IndexRange> subdomains);

  const Grid1D& grid() const { return grid_; }
  Index np() const { return grid_.np(); }
  std::size_t num_subdomains() const { return subdomains_.size(); }
  Index halo() const { return halo_; }

  const IndexRange& subdomain(std::size_t i) const;
  const std::vector<IndexRange>& subdomains() const { return subdomains_; }
  /// r_i
  Index size(std::size_t i) const { return subdomain(i).size(); }
  std::vector<Index> indices(std::size_t i) const;

  /// Neighbours sharing an interface with i, ascending.
  std::vector<std::size_t> neighbors(std::size_t i) const;
  bool adjacent(std::size_t i, std::size_t j) const;

  /// Omega_i ∩ Omega_j (empty when disjoint).
  const std::vector<Index>& overlap(std::size_t i, std::size_t j) const;
  /// Gamma_ij (empty when i, j are not adjacent).
  const std::vector<Index>& interface(std::size_t i, std::size_t j) const;

  Index overlap_size(std::size_t i, std::size_t j) const {
    return static_cast<Index>(overlap(i, j).size());
  }
  Index interface_size(std::size_t i, std::size_t j) const {
    return static_cast<Index>(interface(i, j).size());
  }

  // Offsets of the square zero-padded restriction layout: s_ij = r_i - C_ij and
  // s̄_ij = s_ij + t_ij. Unused by the rectangular operators; kept for reference.
  Index offset_s(std::size_t i, std::size_t j) const { return size(i) - overlap_size(i, j); }
  Index offset_s_bar(std::size_t i, std::size_t j) const {
    return offset_s(i, j) + interface_size(i, j);
  }

 private:
  void check_id(std::size_t i) const;

  Grid1D grid_;
  Index halo_ = 0;
  std::vector<IndexRange> subdomains_;
  std::map<std::pair<std::size_t, std::size_t>, std::vector<Index>> overlaps_;
  std::map<std::pair<std::size_t, std::size_t>, std::vector<Index>> interfaces_;
};

/**
 * Rectangular selection operator: |selected| x source_dim matrix with one unit
 * entry per row. restrict() picks entries, extend() is its transpose (zero fill).
 */
class SelectionMap {
 public:
  SelectionMap(Index source_dim, std::vector<Index> selected);

  /// Identity selection of all n coordinates.
  static SelectionMap identity(Index n);

  Index source_dim() const { return source_dim_; }
  Index size() const { return static_cast<Index>(selected_.size()); }
  const std::vector<Index>& indices() const { return selected_; }
  Index operator[](Index k) const { return selected_[static_cast<std::size_t>(k)]; }

  /// Position of a source index in the selection, if selected.
  std::optional<Index> position_of(Index source_index) const;

  Vector restrict(const Vector& v) const;
  Vector extend(const Vector& local) const;
  /// Dense |selected| x source_dim matrix (tests and small diagnostics only).
  Matrix to_matrix() const;

 private:
  Index source_dim_;
  std::vector<Index> selected_;
};

Decomposition decompose_uniform(const Grid1D& grid, std::size_t j_sub, Index halo);

SelectionMap subdomain_restriction(const Decomposition& dec, std::size_t i);
SelectionMap interface_restriction(const Decomposition& dec, std::size_t i, std::size_t j);

Vector restrict_vector(const SelectionMap& map, const Vector& v);
Vector extend_vector(const SelectionMap& map, const Vector& local);
/// out(a, b) = m(rows[a], cols[b])
Matrix restrict_matrix(const SelectionMap& rows, const SelectionMap& cols, const Matrix& m);

}  // namespace ddvar
