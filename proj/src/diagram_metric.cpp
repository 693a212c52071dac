#include "persist/diagram_metric.hpp"

#include <algorithm>
#include <cmath>
#include <utility>
#include <limits>
#include <numbers>

#include "persist/csv.hpp"
#include "persist/errors.hpp"

namespace persist {

PlanePoint diagonal_projection(const PersistencePoint& p) {
  const double mid = (p.birth + p.death) / 2.0;
  return {mid, mid};
}

double distance_to_diagonal(const PersistencePoint& p) {
  return (p.death - p.birth) / std::numbers::sqrt2;
}

namespace {

std::vector<PersistencePoint> off_diagonal(const PersistenceDiagram& d, const MetricOptions& opts) {
  std::vector<PersistencePoint> out;
  out.reserve(d.points.size());
  for (const auto& p : d.points) {
    if (p.birth == p.death) continue;
    if (p.essential && !opts.include_essential) continue;
    out.push_back(p);
  }
  std::sort(out.begin(), out.end(), [](const PersistencePoint& a, const PersistencePoint& b) {
    return a.birth != b.birth ? a.birth < b.birth : a.death < b.death;
  });
  return out;
}

// Solves with the arguments in a canonical order so that d(X, Y) and d(Y, X)
// run the exact same arithmetic.
double minimum_cost(const PersistenceDiagram& x, const PersistenceDiagram& y, const MetricOptions& opts) {
  const auto key = [&](const PersistenceDiagram& d) {
    std::vector<std::pair<double, double>> k;
    for (const auto& p : off_diagonal(d, opts)) k.emplace_back(p.birth, p.death);
    return k;
  };
  const bool swap = key(y) < key(x);
  return optimal_assignment(swap ? cost_matrix(y, x, opts) : cost_matrix(x, y, opts)).cost;
}

// Squared distance raised to q/2, i.e. Euclidean distance^q.
double power_cost(double squared, double q) {
  return q == 2.0 ? squared : std::pow(squared, q / 2.0);
}

double squared_to_diagonal(const PersistencePoint& p) {
  const double gap = p.death - p.birth;
  return gap * gap / 2.0;
}

}  // namespace

CostMatrix cost_matrix(const PersistenceDiagram& x, const PersistenceDiagram& y, const MetricOptions& opts) {
  if (x.dim != y.dim) {
    throw InputError("cannot compare diagrams of homological dimensions " + std::to_string(x.dim) + " and " +
                     std::to_string(y.dim));
  }
  if (!(opts.exponent >= 1.0) || !std::isfinite(opts.exponent)) throw InputError("metric exponent must be >= 1");
  const auto xs = off_diagonal(x, opts);
  const auto ys = off_diagonal(y, opts);
  const std::size_t n = xs.size();
  const std::size_t m = ys.size();
  CostMatrix cm;
  cm.size = n + m;
  cm.x_points = n;
  cm.y_points = m;
  cm.exponent = opts.exponent;
  cm.entries.assign(cm.size * cm.size, 0.0);
  const double q = opts.exponent;
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = 0; j < m; ++j) {
      const double db = xs[i].birth - ys[j].birth;
      const double dd = xs[i].death - ys[j].death;
      cm.entries[i * cm.size + j] = power_cost(db * db + dd * dd, q);
    }
    const double to_diag = power_cost(squared_to_diagonal(xs[i]), q);
    for (std::size_t j = m; j < cm.size; ++j) cm.entries[i * cm.size + j] = to_diag;
  }
  for (std::size_t j = 0; j < m; ++j) {
    const double to_diag = power_cost(squared_to_diagonal(ys[j]), q);
    for (std::size_t i = n; i < cm.size; ++i) cm.entries[i * cm.size + j] = to_diag;
  }
  return cm;
}

Assignment optimal_assignment(std::span<const double> entries, std::size_t size) {
  if (entries.size() != size * size) throw InputError("cost matrix is not square");
  for (double v : entries) {
    if (!std::isfinite(v)) throw InputError("cost matrix has a non-finite entry");
  }
  Assignment result;
  result.row_to_col.assign(size, 0);
  if (size == 0) return result;

  // Shortest augmenting paths with row/column potentials; index 0 is a
  // sentinel column, rows and columns are 1-based internally.
  const double inf = std::numeric_limits<double>::infinity();
  std::vector<double> u(size + 1, 0.0), v(size + 1, 0.0), min_slack(size + 1);
  std::vector<std::size_t> col_row(size + 1, 0), way(size + 1, 0);
  std::vector<bool> used(size + 1);
  for (std::size_t row = 1; row <= size; ++row) {
    col_row[0] = row;
    std::size_t col0 = 0;
    std::fill(min_slack.begin(), min_slack.end(), inf);
    std::fill(used.begin(), used.end(), false);
    do {
      used[col0] = true;
      const std::size_t i0 = col_row[col0];
      double delta = inf;
      std::size_t col1 = 0;
      for (std::size_t j = 1; j <= size; ++j) {
        if (used[j]) continue;
        const double cur = entries[(i0 - 1) * size + (j - 1)] - u[i0] - v[j];
        if (cur < min_slack[j]) {
          min_slack[j] = cur;
          way[j] = col0;
        }
        if (min_slack[j] < delta) {
          delta = min_slack[j];
          col1 = j;
        }
      }
      for (std::size_t j = 0; j <= size; ++j) {
        if (used[j]) {
          u[col_row[j]] += delta;
          v[j] -= delta;
        } else {
          min_slack[j] -= delta;
        }
      }
      col0 = col1;
    } while (col_row[col0] != 0);
    do {
      const std::size_t col1 = way[col0];
      col_row[col0] = col_row[col1];
      col0 = col1;
    } while (col0 != 0);
  }
  for (std::size_t j = 1; j <= size; ++j) result.row_to_col[col_row[j] - 1] = j - 1;
  for (std::size_t i = 0; i < size; ++i) result.cost += entries[i * size + result.row_to_col[i]];
  return result;
}

Assignment optimal_assignment(const CostMatrix& cm) { return optimal_assignment(cm.entries, cm.size); }

double diagram_distance(const PersistenceDiagram& x, const PersistenceDiagram& y, const MetricOptions& opts) {
  const double cost = minimum_cost(x, y, opts);
  return opts.exponent == 2.0 ? std::sqrt(cost) : std::pow(cost, 1.0 / opts.exponent);
}

double squared_diagram_distance(const PersistenceDiagram& x, const PersistenceDiagram& y,
                                const MetricOptions& opts) {
  const double cost = minimum_cost(x, y, opts);
  return opts.exponent == 2.0 ? cost : std::pow(cost, 2.0 / opts.exponent);
}

std::string distance_matrix_csv(std::span<const std::string> ids, std::span<const double> values) {
  const std::size_t n = ids.size();
  if (values.size() != n * n) throw InputError("distance matrix size does not match identifier count");
  std::string out = "id";
  for (const auto& id : ids) out += ',' + id;
  out += '\n';
  for (std::size_t i = 0; i < n; ++i) {
    out += ids[i];
    for (std::size_t j = 0; j < n; ++j) out += ',' + csv::format_real(values[i * n + j]);
    out += '\n';
  }
  return out;
}

}  // namespace persist
