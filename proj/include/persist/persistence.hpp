#pragma once

#include <cstddef>
#include <filesystem>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "persist/vr_filtration.hpp"

namespace persist {

// Z2 boundary matrix in filtration order. Column j holds the sorted positions
// of the facets of simplex j; all of them are < j.
struct BoundaryMatrix {
  std::vector<std::vector<Index>> columns;
  std::vector<int> dims;

  std::size_t size() const { return columns.size(); }
};

struct Reduction {
  std::vector<std::vector<Index>> reduced;      // reduced columns, same layout as the input
  std::vector<std::pair<Index, Index>> pairs;   // (birth simplex, death simplex)
  std::vector<Index> unpaired;                  // essential simplices, ascending
};

struct PersistencePoint {
  double birth = 0.0;
  double death = 0.0;
  int dim = 0;
  bool essential = false;

  bool operator==(const PersistencePoint&) const = default;
};

struct PersistenceDiagram {
  int dim = 0;
  double r_max = 0.0;
  std::vector<PersistencePoint> points;  // sorted by (birth, death)

  std::size_t size() const { return points.size(); }
  bool operator==(const PersistenceDiagram&) const = default;
};

BoundaryMatrix boundary_matrix(const FilteredComplex& fc);

// Left-to-right column reduction over Z2.
Reduction reduce(const BoundaryMatrix& bm);

// Diagrams for homological dimensions 0..max_hom_dim. Zero-persistence pairs
// are dropped; classes still alive at r_max become essential points
// (birth, r_max).
std::vector<PersistenceDiagram> diagrams(const FilteredComplex& fc, int max_hom_dim);

// Dense Z2 linear algebra. Both functions are independent of reduce() and are
// meant for small complexes (at most kDenseRankLimit simplices).
inline constexpr std::size_t kDenseRankLimit = 2000;

// Rank of H_dim of complex_at(fc, r).
int betti_at(const FilteredComplex& fc, double r, int dim);

// Rank of the map H_dim(complex_at(fc, b)) -> H_dim(complex_at(fc, d)), b <= d.
int persistent_betti(const FilteredComplex& fc, double b, double d, int dim);

// Rank over Z2 of a matrix given as sparse columns of row indices.
std::size_t z2_rank(std::span<const std::vector<Index>> columns, std::size_t num_rows);

// Diagram CSV: header `dim,birth,death,essential`, rows sorted by (dim, birth, death).
std::string diagrams_csv(std::span<const PersistenceDiagram> diagrams);
// Parses diagram CSV. r_max of each diagram is the largest essential death
// found (or the largest death when there is none).
std::vector<PersistenceDiagram> parse_diagrams_csv(const std::filesystem::path& path);

// Diagram of dimension `dim` from a list, or an empty one with that dim.
PersistenceDiagram select_dim(std::span<const PersistenceDiagram> diagrams, int dim);

}  // namespace persist
