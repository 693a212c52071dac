#include "persist/persistence.hpp"

#include <algorithm>
#include <bit>
#include <cstdint>
#include <limits>
#include <unordered_map>

#include "persist/csv.hpp"
#include "persist/errors.hpp"

namespace persist {

namespace {

struct VertexListHash {
  std::size_t operator()(const std::vector<Index>& v) const noexcept {
    std::uint64_t h = 0x9e3779b97f4a7c15ULL;
    for (Index x : v) {
      h ^= x + 0x9e3779b97f4a7c15ULL + (h << 6) + (h >> 2);
    }
    return static_cast<std::size_t>(h);
  }
};

constexpr Index kNone = std::numeric_limits<Index>::max();

void symmetric_difference_into(std::vector<Index>& target, const std::vector<Index>& other,
                               std::vector<Index>& scratch) {
  scratch.clear();
  std::set_symmetric_difference(target.begin(), target.end(), other.begin(), other.end(),
                                std::back_inserter(scratch));
  target.swap(scratch);
}

}  // namespace

BoundaryMatrix boundary_matrix(const FilteredComplex& fc) {
  BoundaryMatrix bm;
  const std::size_t n = fc.simplices.size();
  bm.columns.resize(n);
  bm.dims.resize(n);
  std::unordered_map<std::vector<Index>, Index, VertexListHash> position;
  position.reserve(n);
  std::vector<Index> face;
  for (std::size_t j = 0; j < n; ++j) {
    const Simplex& s = fc.simplices[j];
    bm.dims[j] = s.dim();
    if (s.dim() > 0) {
      auto& col = bm.columns[j];
      col.reserve(s.vertices.size());
      for (std::size_t skip = 0; skip < s.vertices.size(); ++skip) {
        face.clear();
        for (std::size_t k = 0; k < s.vertices.size(); ++k) {
          if (k != skip) face.push_back(s.vertices[k]);
        }
        const auto it = position.find(face);
        if (it == position.end()) {
          throw ConsistencyError("simplex " + std::to_string(j) + " has a facet that does not precede it");
        }
        col.push_back(it->second);
      }
      std::sort(col.begin(), col.end());
    }
    if (!position.emplace(s.vertices, static_cast<Index>(j)).second) {
      throw ConsistencyError("duplicate simplex at position " + std::to_string(j));
    }
  }
  return bm;
}

Reduction reduce(const BoundaryMatrix& bm) {
  const std::size_t n = bm.size();
  Reduction out;
  out.reduced = bm.columns;
  std::vector<Index> pivot_owner(n, kNone);  // row -> column whose lowest one sits there
  std::vector<bool> paired(n, false);
  std::vector<Index> scratch;

  // Additions only ever combine columns of equal dimension, so the matrix can
  // be reduced one dimension at a time without changing the result. Once every
  // cycle-creating (d-1)-simplex has been paired, no later d-column can have a
  // nonzero reduction and those columns are cleared directly.
  int top = 0;
  for (int d : bm.dims) top = std::max(top, d);
  std::size_t open_cycles = 0;
  for (int dim = 0; dim <= top; ++dim) {
    bool all_closed = dim > 0 && open_cycles == 0;
    std::size_t created = 0;
    for (std::size_t j = 0; j < n; ++j) {
      if (bm.dims[j] != dim) continue;
      auto& col = out.reduced[j];
      if (all_closed) {
        col.clear();
      }
      while (!col.empty() && pivot_owner[col.back()] != kNone) {
        symmetric_difference_into(col, out.reduced[pivot_owner[col.back()]], scratch);
      }
      if (col.empty()) {
        ++created;
        continue;
      }
      const Index low = col.back();
      if (bm.dims[low] != dim - 1) throw ConsistencyError("boundary column mixes dimensions");
      pivot_owner[low] = static_cast<Index>(j);
      paired[low] = paired[j] = true;
      out.pairs.emplace_back(low, static_cast<Index>(j));
      if (--open_cycles == 0) all_closed = true;
    }
    open_cycles = created;
  }
  std::sort(out.pairs.begin(), out.pairs.end(),
            [](const auto& a, const auto& b) { return a.second < b.second; });
  for (std::size_t j = 0; j < n; ++j) {
    if (!paired[j]) out.unpaired.push_back(static_cast<Index>(j));
  }
  return out;
}

std::vector<PersistenceDiagram> diagrams(const FilteredComplex& fc, int max_hom_dim) {
  if (max_hom_dim < 0 || max_hom_dim > fc.max_dim - 1) {
    throw InputError("homological dimension " + std::to_string(max_hom_dim) +
                     " needs simplices up to dimension " + std::to_string(max_hom_dim + 1) +
                     ", but the complex was built through dimension " + std::to_string(fc.max_dim));
  }
  const Reduction red = reduce(boundary_matrix(fc));
  std::vector<PersistenceDiagram> out(static_cast<std::size_t>(max_hom_dim) + 1);
  for (int d = 0; d <= max_hom_dim; ++d) {
    out[d].dim = d;
    out[d].r_max = fc.r_max;
  }
  for (const auto& [b, k] : red.pairs) {
    const int dim = fc.simplices[b].dim();
    if (dim > max_hom_dim) continue;
    const double birth = fc.simplices[b].filtration;
    const double death = fc.simplices[k].filtration;
    if (birth < death) out[dim].points.push_back({birth, death, dim, false});
  }
  for (Index i : red.unpaired) {
    const int dim = fc.simplices[i].dim();
    if (dim > max_hom_dim) continue;
    const double birth = fc.simplices[i].filtration;
    if (birth < fc.r_max) out[dim].points.push_back({birth, fc.r_max, dim, true});
  }
  for (auto& dgm : out) {
    std::sort(dgm.points.begin(), dgm.points.end(), [](const PersistencePoint& a, const PersistencePoint& b) {
      if (a.birth != b.birth) return a.birth < b.birth;
      if (a.death != b.death) return a.death < b.death;
      return a.essential < b.essential;
    });
  }
  return out;
}

std::size_t z2_rank(std::span<const std::vector<Index>> columns, std::size_t num_rows) {
  const std::size_t words = (num_rows + 63) / 64;
  // basis[r] holds a vector whose highest set bit is r.
  std::vector<std::vector<std::uint64_t>> basis(num_rows);
  std::size_t rank = 0;
  std::vector<std::uint64_t> v(words);
  for (const auto& col : columns) {
    std::fill(v.begin(), v.end(), 0);
    for (Index r : col) v[r / 64] ^= std::uint64_t{1} << (r % 64);
    for (std::size_t w = words; w-- > 0;) {
      while (v[w] != 0) {
        const std::size_t bit = w * 64 + 63 - static_cast<std::size_t>(std::countl_zero(v[w]));
        if (basis[bit].empty()) {
          basis[bit] = v;
          ++rank;
          goto next_column;
        }
        for (std::size_t k = 0; k <= w; ++k) v[k] ^= basis[bit][k];
      }
    }
  next_column:;
  }
  return rank;
}

namespace {

// Boundary of the dim-simplices of `sub` (rows = (dim-1)-simplices of `rows_from`,
// restricted by `keep_row`). Returns the columns with rows renumbered densely.
struct DenseBlock {
  std::vector<std::vector<Index>> columns;
  std::size_t num_rows = 0;
};

DenseBlock boundary_block(const FilteredComplex& fc, double col_cap, int dim, double row_min_exclusive,
                          double row_cap) {
  // Rows: (dim-1)-simplices with row_min_exclusive < filtration <= row_cap.
  // Columns: dim-simplices with filtration <= col_cap.
  DenseBlock block;
  if (dim <= 0) return block;
  std::unordered_map<std::vector<Index>, Index, VertexListHash> row_of;
  for (const Simplex& s : fc.simplices) {
    if (s.dim() == dim - 1 && s.filtration > row_min_exclusive && s.filtration <= row_cap) {
      row_of.emplace(s.vertices, static_cast<Index>(block.num_rows++));
    }
  }
  std::vector<Index> face;
  for (const Simplex& s : fc.simplices) {
    if (s.dim() != dim || s.filtration > col_cap) continue;
    std::vector<Index> col;
    for (std::size_t skip = 0; skip < s.vertices.size(); ++skip) {
      face.clear();
      for (std::size_t k = 0; k < s.vertices.size(); ++k) {
        if (k != skip) face.push_back(s.vertices[k]);
      }
      const auto it = row_of.find(face);
      if (it != row_of.end()) col.push_back(it->second);
    }
    block.columns.push_back(std::move(col));
  }
  return block;
}

std::size_t block_rank(const DenseBlock& b) { return z2_rank(b.columns, b.num_rows); }

void check_dense_size(const FilteredComplex& fc, double r) {
  std::size_t count = 0;
  for (const Simplex& s : fc.simplices) count += s.filtration <= r ? 1 : 0;
  if (count > kDenseRankLimit) {
    throw ResourceError("dense Betti computation limited to " + std::to_string(kDenseRankLimit) + " simplices, got " +
                        std::to_string(count));
  }
}

}  // namespace

int persistent_betti(const FilteredComplex& fc, double b, double d, int dim) {
  if (dim < 0) throw InputError("homological dimension must be nonnegative");
  if (!(0.0 <= b && b <= d && d <= fc.r_max)) throw InputError("persistent Betti needs 0 <= b <= d <= r_max");
  check_dense_size(fc, d);
  const double lowest = -std::numeric_limits<double>::infinity();
  std::size_t cycles_b = 0;
  for (const Simplex& s : fc.simplices) cycles_b += (s.dim() == dim && s.filtration <= b) ? 1 : 0;
  cycles_b -= block_rank(boundary_block(fc, b, dim, lowest, b));
  // Boundaries of K_d that live in K_b: rank(del) - rank(del restricted to rows outside K_b).
  const std::size_t bounds_d = block_rank(boundary_block(fc, d, dim + 1, lowest, d));
  const std::size_t outside = block_rank(boundary_block(fc, d, dim + 1, b, d));
  return static_cast<int>(cycles_b - (bounds_d - outside));
}

int betti_at(const FilteredComplex& fc, double r, int dim) {
  if (dim < 0) throw InputError("homological dimension must be nonnegative");
  if (!(0.0 <= r && r <= fc.r_max)) throw InputError("parameter outside [0, r_max]");
  check_dense_size(fc, r);
  const double lowest = -std::numeric_limits<double>::infinity();
  std::size_t chains = 0;
  for (const Simplex& s : fc.simplices) chains += (s.dim() == dim && s.filtration <= r) ? 1 : 0;
  const std::size_t rank_down = block_rank(boundary_block(fc, r, dim, lowest, r));
  const std::size_t rank_up = block_rank(boundary_block(fc, r, dim + 1, lowest, r));
  return static_cast<int>(chains - rank_down - rank_up);
}

std::string diagrams_csv(std::span<const PersistenceDiagram> dgms) {
  std::vector<PersistencePoint> all;
  for (const auto& d : dgms) all.insert(all.end(), d.points.begin(), d.points.end());
  std::sort(all.begin(), all.end(), [](const PersistencePoint& a, const PersistencePoint& b) {
    if (a.dim != b.dim) return a.dim < b.dim;
    if (a.birth != b.birth) return a.birth < b.birth;
    if (a.death != b.death) return a.death < b.death;
    return a.essential < b.essential;
  });
  std::string out = "dim,birth,death,essential\n";
  for (const auto& p : all) {
    out += std::to_string(p.dim) + ',' + csv::format_real(p.birth) + ',' + csv::format_real(p.death) + ',' +
           (p.essential ? "1" : "0") + '\n';
  }
  return out;
}

std::vector<PersistenceDiagram> parse_diagrams_csv(const std::filesystem::path& path) {
  const auto records = csv::read_records(path);
  std::vector<PersistenceDiagram> out;
  std::size_t start = 0;
  if (!records.empty() && !records[0].empty() && records[0][0] == "dim") start = 1;
  std::vector<double> essential_cap;
  std::vector<double> any_cap;
  for (std::size_t r = start; r < records.size(); ++r) {
    const auto& rec = records[r];
    if (rec.size() != 4) throw InputError("diagram row " + std::to_string(r + 1) + " must have 4 fields");
    const double dim_value = csv::parse_real(rec[0], r + 1, 1);
    const int dim = static_cast<int>(dim_value);
    if (dim < 0 || dim_value != dim) throw InputError("bad homological dimension at row " + std::to_string(r + 1));
    PersistencePoint p;
    p.dim = dim;
    p.birth = csv::parse_real(rec[1], r + 1, 2);
    p.death = csv::parse_real(rec[2], r + 1, 3);
    p.essential = csv::parse_real(rec[3], r + 1, 4) != 0.0;
    if (!(p.birth <= p.death)) throw InputError("birth exceeds death at row " + std::to_string(r + 1));
    while (static_cast<int>(out.size()) <= dim) {
      out.push_back(PersistenceDiagram{static_cast<int>(out.size()), 0.0, {}});
      essential_cap.push_back(0.0);
      any_cap.push_back(0.0);
    }
    out[dim].points.push_back(p);
    any_cap[dim] = std::max(any_cap[dim], p.death);
    if (p.essential) essential_cap[dim] = std::max(essential_cap[dim], p.death);
  }
  for (std::size_t d = 0; d < out.size(); ++d) out[d].r_max = essential_cap[d] > 0.0 ? essential_cap[d] : any_cap[d];
  return out;
}

PersistenceDiagram select_dim(std::span<const PersistenceDiagram> dgms, int dim) {
  for (const auto& d : dgms) {
    if (d.dim == dim) return d;
  }
  return PersistenceDiagram{dim, 0.0, {}};
}

}  // namespace persist
