#pragma once

#include <cstddef>
#include <string>
#include <vector>

#include "reluexact/lp.hpp"
#include "reluexact/network.hpp"

namespace reluexact {

/// A full-dimensional activation cell and the affine map the network equals on it.
struct RegionCell {
  /// One character per hidden unit, layer by layer: '1' active, '0' inactive.
  std::string pattern;
  /// Closure of the cell, every row non-strict; includes the domain rows.
  std::vector<LinearConstraint> constraints;
  /// output_dim x n.
  AffineMap affine;
  /// A rational point strictly inside the cell.
  RationalVector interior;
};

struct RegionOptions {
  /// Non-strict rows bounding the region of interest; empty means all of R^n.
  std::vector<LinearConstraint> domain;
  std::size_t max_cells = 200'000;
  unsigned threads = 1;
};

/// [lo, hi]^n as 2n rows.
std::vector<LinearConstraint> box_domain(std::size_t n, const Rational& lo, const Rational& hi);

/// Splits the domain neuron by neuron along each pre-activation's zero set,
/// keeping only strictly feasible children. The result is sorted by pattern
/// and does not depend on the thread count. Throws BudgetExceeded once the
/// frontier grows past `max_cells`, ValidationError when the domain has no interior.
std::vector<RegionCell> enumerate_cells(const ReluNetwork& net, const RegionOptions& options = {});

/// True when the two cells meet in a common (n-1)-dimensional face.
bool share_facet(const RegionCell& a, const RegionCell& b);

/// Number of groups left after uniting facet-adjacent cells that carry the
/// same affine map.
std::size_t merge_cells(const std::vector<RegionCell>& cells, unsigned threads = 1);

struct PieceReport {
  std::size_t cells = 0;
  std::size_t pieces = 0;
};

PieceReport count_regions(const ReluNetwork& net, const RegionOptions& options = {});
std::size_t count_pieces(const ReluNetwork& net, const RegionOptions& options = {});

}  // namespace reluexact
