#include "persist/vr_filtration.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "persist/csv.hpp"
#include "persist/errors.hpp"

namespace persist {

PointCloud::PointCloud(std::size_t dim, std::vector<double> coords) : dim_(dim), coords_(std::move(coords)) {
  if (dim_ == 0) throw InputError("point cloud dimension must be at least 1");
  if (coords_.size() % dim_ != 0) throw InputError("coordinate count is not a multiple of the dimension");
  for (std::size_t i = 0; i < coords_.size(); ++i) {
    if (!std::isfinite(coords_[i])) {
      throw InputError("non-finite coordinate at point " + std::to_string(i / dim_ + 1) + ", column " +
                       std::to_string(i % dim_ + 1));
    }
  }
}

PointCloud PointCloud::from_rows(const std::vector<std::vector<double>>& rows) {
  if (rows.empty()) return {};
  const std::size_t dim = rows.front().size();
  std::vector<double> coords;
  coords.reserve(rows.size() * dim);
  for (const auto& row : rows) {
    if (row.size() != dim) throw InputError("points have differing dimensions");
    coords.insert(coords.end(), row.begin(), row.end());
  }
  return PointCloud(dim, std::move(coords));
}

void PointCloud::append(std::span<const double> p) {
  if (dim_ == 0) dim_ = p.size();
  if (p.size() != dim_ || dim_ == 0) throw InputError("point dimension mismatch");
  for (double x : p) {
    if (!std::isfinite(x)) throw InputError("non-finite coordinate");
  }
  coords_.insert(coords_.end(), p.begin(), p.end());
}

DistanceMatrix DistanceMatrix::from_rows(const std::vector<std::vector<double>>& rows) {
  DistanceMatrix m(rows.size());
  for (std::size_t i = 0; i < rows.size(); ++i) {
    if (rows[i].size() != rows.size()) throw InputError("distance matrix is not square");
    for (std::size_t j = 0; j < rows.size(); ++j) {
      const double v = rows[i][j];
      if (!std::isfinite(v) || v < 0.0) throw InputError("distance matrix entries must be finite and nonnegative");
      m(i, j) = v;
    }
  }
  for (std::size_t i = 0; i < m.size(); ++i) {
    if (m(i, i) != 0.0) throw InputError("distance matrix has a nonzero diagonal entry");
    for (std::size_t j = 0; j < i; ++j) {
      if (m(i, j) != m(j, i)) throw InputError("distance matrix is not symmetric");
    }
  }
  return m;
}

double DistanceMatrix::max() const {
  double best = 0.0;
  for (double v : values_) best = std::max(best, v);
  return best;
}

bool filtration_less(const Simplex& a, const Simplex& b) {
  if (a.filtration != b.filtration) return a.filtration < b.filtration;
  if (a.vertices.size() != b.vertices.size()) return a.vertices.size() < b.vertices.size();
  return a.vertices < b.vertices;
}

std::size_t FilteredComplex::count(int dim) const {
  return static_cast<std::size_t>(
      std::count_if(simplices.begin(), simplices.end(), [dim](const Simplex& s) { return s.dim() == dim; }));
}

DistanceMatrix pairwise_distances(const PointCloud& cloud) {
  if (cloud.empty()) throw InputError("point cloud is empty");
  const std::size_t n = cloud.size();
  const std::size_t m = cloud.dim();
  DistanceMatrix d(n);
  for (std::size_t i = 0; i < n; ++i) {
    const double* p = cloud.point(i);
    for (std::size_t j = i + 1; j < n; ++j) {
      const double* q = cloud.point(j);
      double sum = 0.0;
      for (std::size_t k = 0; k < m; ++k) {
        const double diff = p[k] - q[k];
        sum += diff * diff;
      }
      d(i, j) = d(j, i) = std::sqrt(sum);
    }
  }
  return d;
}

namespace {

class CliqueEnumerator {
 public:
  CliqueEnumerator(const DistanceMatrix& d, int max_dim, double r_max, std::size_t budget, FilteredComplex& out)
      : d_(d), max_dim_(max_dim), budget_(budget), out_(out), higher_(d.size()) {
    for (Index i = 0; i < d.size(); ++i) {
      for (Index j = i + 1; j < d.size(); ++j) {
        if (d(i, j) <= r_max) higher_[i].push_back(j);
      }
    }
  }

  void run() {
    std::vector<Index> current;
    for (Index v = 0; v < d_.size(); ++v) {
      current.assign(1, v);
      emit(current, 0.0);
      extend(current, higher_[v], 0.0);
    }
  }

 private:
  // `candidates` are vertices above the last one that are within range of
  // every vertex in `current`.
  void extend(std::vector<Index>& current, const std::vector<Index>& candidates, double filtration) {
    if (static_cast<int>(current.size()) > max_dim_) return;
    for (std::size_t c = 0; c < candidates.size(); ++c) {
      const Index v = candidates[c];
      double f = filtration;
      for (Index u : current) f = std::max(f, d_(u, v));
      current.push_back(v);
      emit(current, f);
      if (static_cast<int>(current.size()) <= max_dim_) {
        std::vector<Index> next;
        const auto& adj = higher_[v];
        std::set_intersection(candidates.begin() + static_cast<std::ptrdiff_t>(c) + 1, candidates.end(), adj.begin(),
                              adj.end(), std::back_inserter(next));
        if (!next.empty()) extend(current, next, f);
      }
      current.pop_back();
    }
  }

  void emit(const std::vector<Index>& vertices, double filtration) {
    if (out_.simplices.size() >= budget_) {
      throw ResourceError("simplex budget of " + std::to_string(budget_) +
                          " exceeded; lower r_max or max_dim, or raise the budget");
    }
    out_.simplices.push_back(Simplex{vertices, filtration});
  }

  const DistanceMatrix& d_;
  int max_dim_;
  std::size_t budget_;
  FilteredComplex& out_;
  std::vector<std::vector<Index>> higher_;
};

}  // namespace

FilteredComplex build_filtration(const DistanceMatrix& distances, int max_dim, double r_max, std::size_t budget) {
  if (distances.size() == 0) throw InputError("point cloud is empty");
  if (max_dim < 1) throw InputError("max_dim must be at least 1");
  if (!(r_max > 0.0) || !std::isfinite(r_max)) throw InputError("r_max must be a positive finite number");
  FilteredComplex fc;
  fc.max_dim = max_dim;
  fc.r_max = r_max;
  fc.num_vertices = distances.size();
  CliqueEnumerator(distances, max_dim, r_max, budget, fc).run();
  std::sort(fc.simplices.begin(), fc.simplices.end(), filtration_less);
  return fc;
}

FilteredComplex build_filtration(const PointCloud& cloud, int max_dim, double r_max, std::size_t budget) {
  return build_filtration(pairwise_distances(cloud), max_dim, r_max, budget);
}

FilteredComplex complex_at(const FilteredComplex& fc, double r) {
  if (!(r >= 0.0) || r > fc.r_max) {
    std::ostringstream msg;
    msg << "parameter " << r << " outside [0, " << fc.r_max << "]";
    throw InputError(msg.str());
  }
  FilteredComplex sub;
  sub.max_dim = fc.max_dim;
  sub.r_max = r;
  sub.num_vertices = fc.num_vertices;
  for (const Simplex& s : fc.simplices) {
    if (s.filtration > r) break;
    sub.simplices.push_back(s);
  }
  return sub;
}

double diameter(const PointCloud& cloud) {
  if (cloud.size() < 2) return 0.0;
  return pairwise_distances(cloud).max();
}

PointCloud read_point_cloud(const std::filesystem::path& path, bool header) {
  auto rows = csv::read_numeric(path, header);
  if (rows.empty()) throw InputError("'" + path.string() + "' contains no points");
  return PointCloud::from_rows(rows);
}

std::string point_cloud_csv(const PointCloud& cloud) {
  std::string out;
  for (std::size_t i = 0; i < cloud.size(); ++i) {
    for (std::size_t k = 0; k < cloud.dim(); ++k) {
      if (k) out += ',';
      out += csv::format_real(cloud.point(i)[k]);
    }
    out += '\n';
  }
  return out;
}

std::string complex_text(const FilteredComplex& fc) {
  std::string out;
  for (const Simplex& s : fc.simplices) {
    out += std::to_string(s.dim());
    out += ';';
    for (std::size_t i = 0; i < s.vertices.size(); ++i) {
      if (i) out += ',';
      out += std::to_string(s.vertices[i]);
    }
    out += ';';
    out += csv::format_real(s.filtration);
    out += '\n';
  }
  return out;
}

}  // namespace persist
