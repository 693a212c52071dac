#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <span>
#include <string>
#include <vector>

namespace persist {

using Index = std::uint32_t;

// Points in R^m, stored row-major. All points share the ambient dimension and
// have finite coordinates; the constructor enforces both.
class PointCloud {
 public:
  PointCloud() = default;
  PointCloud(std::size_t dim, std::vector<double> coords);
  static PointCloud from_rows(const std::vector<std::vector<double>>& rows);

  std::size_t size() const { return dim_ == 0 ? 0 : coords_.size() / dim_; }
  std::size_t dim() const { return dim_; }
  bool empty() const { return size() == 0; }
  const double* point(std::size_t i) const { return coords_.data() + i * dim_; }
  const std::vector<double>& coords() const { return coords_; }

  void append(std::span<const double> p);

 private:
  std::size_t dim_ = 0;
  std::vector<double> coords_;
};

// Dense symmetric matrix of pairwise distances.
class DistanceMatrix {
 public:
  DistanceMatrix() = default;
  explicit DistanceMatrix(std::size_t n) : n_(n), values_(n * n, 0.0) {}
  // Validates square shape, zero diagonal, symmetry and finiteness.
  static DistanceMatrix from_rows(const std::vector<std::vector<double>>& rows);

  std::size_t size() const { return n_; }
  double operator()(std::size_t i, std::size_t j) const { return values_[i * n_ + j]; }
  double& operator()(std::size_t i, std::size_t j) { return values_[i * n_ + j]; }
  double max() const;

 private:
  std::size_t n_ = 0;
  std::vector<double> values_;
};

struct Simplex {
  std::vector<Index> vertices;  // strictly increasing
  double filtration = 0.0;

  int dim() const { return static_cast<int>(vertices.size()) - 1; }
  bool operator==(const Simplex&) const = default;
};

// Filtration order: (filtration, dimension, lexicographic vertices).
bool filtration_less(const Simplex& a, const Simplex& b);

struct FilteredComplex {
  std::vector<Simplex> simplices;
  int max_dim = 1;
  double r_max = 0.0;
  std::size_t num_vertices = 0;

  std::size_t count(int dim) const;
  bool operator==(const FilteredComplex&) const = default;
};

inline constexpr std::size_t kDefaultSimplexBudget = 5'000'000;

DistanceMatrix pairwise_distances(const PointCloud& cloud);

// All simplices with at most max_dim + 1 vertices whose diameter is <= r_max.
// A simplex enters at its diameter; vertices enter at 0. Throws ResourceError
// once more than `budget` simplices would be produced.
FilteredComplex build_filtration(const DistanceMatrix& distances, int max_dim, double r_max,
                                 std::size_t budget = kDefaultSimplexBudget);
FilteredComplex build_filtration(const PointCloud& cloud, int max_dim, double r_max,
                                 std::size_t budget = kDefaultSimplexBudget);

// Sub-filtration of simplices with filtration <= r.
FilteredComplex complex_at(const FilteredComplex& fc, double r);

// Largest pairwise distance; 0 for clouds with fewer than two points.
double diameter(const PointCloud& cloud);

// Point-cloud CSV: one row per point, one column per coordinate.
PointCloud read_point_cloud(const std::filesystem::path& path, bool header = false);
std::string point_cloud_csv(const PointCloud& cloud);

// Debug text format, one simplex per line: `dim;v1,v2,...;filtration`.
std::string complex_text(const FilteredComplex& fc);

}  // namespace persist
