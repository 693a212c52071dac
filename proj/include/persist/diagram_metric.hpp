#pragma once

#include <cstddef>
#include <span>
#include <string>
#include <vector>

#include "persist/persistence.hpp"

namespace persist {

struct PlanePoint {
  double x = 0.0;
  double y = 0.0;
};

// Closest point on the diagonal y = x.
PlanePoint diagonal_projection(const PersistencePoint& p);

// Euclidean distance from p to its diagonal projection, (death - birth) / sqrt(2).
double distance_to_diagonal(const PersistencePoint& p);

struct MetricOptions {
  double exponent = 2.0;          // q >= 1: costs are Euclidean distance^q, result is (total)^(1/q)
  bool include_essential = true;  // essential points take part as ordinary points at (birth, r_max)
};

// Square cost matrix of size n + m. Rows are X's n off-diagonal points followed
// by m diagonal slots (projections of Y's points); columns are Y's m points
// followed by n diagonal slots (projections of X's points).
struct CostMatrix {
  std::size_t size = 0;
  std::size_t x_points = 0;
  std::size_t y_points = 0;
  double exponent = 2.0;
  std::vector<double> entries;  // row-major

  double operator()(std::size_t i, std::size_t j) const { return entries[i * size + j]; }
};

CostMatrix cost_matrix(const PersistenceDiagram& x, const PersistenceDiagram& y, const MetricOptions& opts = {});

struct Assignment {
  std::vector<std::size_t> row_to_col;
  double cost = 0.0;
};

// Minimum-cost perfect matching of a square matrix (Hungarian method with
// potentials, O(k^3)).
Assignment optimal_assignment(std::span<const double> entries, std::size_t size);
Assignment optimal_assignment(const CostMatrix& cm);

double diagram_distance(const PersistenceDiagram& x, const PersistenceDiagram& y, const MetricOptions& opts = {});

// d(X, Y)^2, computed without a square root round trip when q = 2.
double squared_diagram_distance(const PersistenceDiagram& x, const PersistenceDiagram& y,
                                const MetricOptions& opts = {});

// Pairwise distance matrix as CSV: header `id,<ids...>`, then one row per id.
std::string distance_matrix_csv(std::span<const std::string> ids, std::span<const double> values);

}  // namespace persist
