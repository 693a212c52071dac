#include "persist/workflow.hpp"

#include <algorithm>
#include <cmath>
#include <iomanip>
#include <numeric>
#include <set>
#include <sstream>

#include "persist/csv.hpp"
#include "persist/persistence.hpp"
#include "persist/rng.hpp"
#include "persist/text.hpp"

namespace persist {

namespace {

constexpr std::uint64_t kBalanceStream = 0x62616c616e6365ULL;
constexpr std::uint64_t kRepresentStream = 0x726570726573ULL;
constexpr std::uint64_t kSelectStream = 0x73656c656374ULL;
constexpr std::uint64_t kPermutationStream = 0x7065726d75746174ULL;

}  // namespace

std::vector<std::string> Dataset::levels() const {
  std::set<std::string> s(labels.begin(), labels.end());
  return {s.begin(), s.end()};
}

std::map<std::string, std::size_t> Dataset::counts() const {
  std::map<std::string, std::size_t> out;
  for (const auto& l : labels) ++out[l];
  return out;
}

std::vector<std::size_t> Dataset::positions_of(const std::string& level) const {
  std::vector<std::size_t> out;
  for (std::size_t i = 0; i < labels.size(); ++i) {
    if (labels[i] == level) out.push_back(i);
  }
  return out;
}

std::size_t Dataset::position_of_row(std::size_t row_id) const {
  const auto it = std::lower_bound(row_ids.begin(), row_ids.end(), row_id);
  if (it == row_ids.end() || *it != row_id) throw InputError("row id " + std::to_string(row_id) + " is not in the dataset");
  return static_cast<std::size_t>(it - row_ids.begin());
}

void Dataset::standardize() {
  if (rows.empty()) return;
  const std::size_t m = rows.front().size();
  const double n = static_cast<double>(rows.size());
  for (std::size_t k = 0; k < m; ++k) {
    double mean = 0.0;
    for (const auto& r : rows) mean += r[k];
    mean /= n;
    double ss = 0.0;
    for (const auto& r : rows) ss += (r[k] - mean) * (r[k] - mean);
    const double sd = rows.size() > 1 ? std::sqrt(ss / (n - 1.0)) : 0.0;
    for (auto& r : rows) r[k] = sd > 0.0 ? (r[k] - mean) / sd : r[k] - mean;
  }
  standardized = true;
}

void Dataset::restrict_level(const std::string& level, const std::vector<std::size_t>& keep_rows) {
  const std::set<std::size_t> keep(keep_rows.begin(), keep_rows.end());
  Dataset out;
  out.feature_names = feature_names;
  out.standardized = standardized;
  std::size_t kept = 0;
  for (std::size_t i = 0; i < rows.size(); ++i) {
    if (labels[i] == level && !keep.count(row_ids[i])) continue;
    if (labels[i] == level) ++kept;
    out.rows.push_back(rows[i]);
    out.labels.push_back(labels[i]);
    out.row_ids.push_back(row_ids[i]);
  }
  if (kept != keep.size()) throw InputError("some selected rows are not in group '" + level + "'");
  *this = std::move(out);
}

Dataset ingest(const std::filesystem::path& path, const std::vector<std::string>& feature_columns,
               const std::string& group_column, bool header) {
  const auto records = csv::read_records(path);
  if (records.empty()) throw InputError("'" + path.string() + "' is empty");
  if (feature_columns.empty()) throw InputError("no feature columns selected");

  const auto locate = [&](const std::string& column) -> std::size_t {
    if (header) {
      const auto& names = records.front();
      const auto it = std::find(names.begin(), names.end(), column);
      if (it == names.end()) throw InputError("column '" + column + "' not found in header");
      return static_cast<std::size_t>(it - names.begin());
    }
    const auto index = text::parse_size(column, "column index");
    if (index >= records.front().size()) throw InputError("column index " + column + " out of range");
    return index;
  };

  Dataset ds;
  std::vector<std::size_t> feature_idx;
  for (const auto& c : feature_columns) {
    feature_idx.push_back(locate(c));
    ds.feature_names.push_back(c);
  }
  const std::size_t group_idx = locate(group_column);

  for (std::size_t r = header ? 1 : 0; r < records.size(); ++r) {
    const auto& rec = records[r];
    const std::size_t file_row = r + 1;
    std::vector<double> values;
    for (std::size_t k = 0; k < feature_idx.size(); ++k) {
      const std::size_t col = feature_idx[k];
      if (col >= rec.size()) throw InputError("row " + std::to_string(file_row) + " is missing column " + std::to_string(col + 1));
      values.push_back(csv::parse_real(rec[col], file_row, col + 1));
    }
    if (group_idx >= rec.size() || rec[group_idx].empty()) {
      throw InputError("empty group label at row " + std::to_string(file_row));
    }
    ds.rows.push_back(std::move(values));
    ds.labels.push_back(rec[group_idx]);
    ds.row_ids.push_back(r - (header ? 1 : 0));
  }
  if (ds.levels().size() < 2) throw InputError("the group column must have at least two levels");
  return ds;
}

void PartitionPlan::validate() const {
  if (clouds_per_group < 2) throw InputError("at least two clouds per group are required");
  if (points_per_cloud < 1) throw InputError("points per cloud must be positive");
  if (clouds_per_group * points_per_cloud != balance_to) {
    throw InputError("clouds_per_group x points_per_cloud (" + std::to_string(clouds_per_group) + " x " +
                     std::to_string(points_per_cloud) + ") must equal balance_to (" + std::to_string(balance_to) +
                     ")");
  }
}

namespace {

LabeledCloud make_cloud(const Dataset& ds, const std::string& group, std::size_t index,
                        std::span<const std::size_t> positions) {
  LabeledCloud lc;
  lc.group = group;
  lc.cloud_index = index;
  std::vector<std::vector<double>> pts;
  for (std::size_t p : positions) {
    lc.row_ids.push_back(ds.row_ids[p]);
    pts.push_back(ds.rows[p]);
  }
  lc.cloud = PointCloud::from_rows(pts);
  return lc;
}

}  // namespace

std::vector<LabeledCloud> balance_and_partition(const Dataset& ds, const PartitionPlan& plan) {
  plan.validate();
  const auto levels = ds.levels();
  const auto counts = ds.counts();
  std::size_t smallest = ds.size();
  for (const auto& [level, n] : counts) smallest = std::min(smallest, n);
  std::vector<LabeledCloud> out;
  for (std::size_t g = 0; g < levels.size(); ++g) {
    auto positions = ds.positions_of(levels[g]);
    if (positions.size() < plan.balance_to) {
      const std::size_t feasible = smallest / plan.clouds_per_group * plan.clouds_per_group;
      throw InputError("group '" + levels[g] + "' has only " + std::to_string(positions.size()) +
                       " rows but balance_to is " + std::to_string(plan.balance_to) +
                       "; the largest feasible balance_to with " + std::to_string(plan.clouds_per_group) +
                       " clouds per group is " + std::to_string(feasible));
    }
    Rng rng{plan.seed, kBalanceStream, g};
    rng.shuffle(positions);
    for (std::size_t c = 0; c < plan.clouds_per_group; ++c) {
      const std::span<const std::size_t> block(positions.data() + c * plan.points_per_cloud, plan.points_per_cloud);
      out.push_back(make_cloud(ds, levels[g], c, block));
    }
  }
  return out;
}

std::vector<LabeledCloud> clouds_from_partition(const Dataset& ds, const std::filesystem::path& partition) {
  const auto records = csv::read_records(partition);
  std::vector<LabeledCloud> out;
  std::vector<std::vector<std::size_t>> positions;
  for (std::size_t r = 1; r < records.size(); ++r) {
    const auto& rec = records[r];
    if (rec.size() != 3) throw InputError("partition row " + std::to_string(r + 1) + " must be group,cloud,row_id");
    const std::size_t cloud = text::parse_size(rec[1], "cloud");
    const std::size_t row = text::parse_size(rec[2], "row_id");
    std::size_t slot = out.size();
    for (std::size_t i = 0; i < out.size(); ++i) {
      if (out[i].group == rec[0] && out[i].cloud_index == cloud) slot = i;
    }
    if (slot == out.size()) {
      out.push_back(LabeledCloud{rec[0], cloud, {}, {}});
      positions.emplace_back();
    }
    const std::size_t pos = ds.position_of_row(row);
    if (ds.labels[pos] != rec[0]) throw InputError("row " + std::to_string(row) + " is not in group '" + rec[0] + "'");
    positions[slot].push_back(pos);
  }
  for (std::size_t i = 0; i < out.size(); ++i) out[i] = make_cloud(ds, out[i].group, out[i].cloud_index, positions[i]);
  return out;
}

std::string partition_csv(const std::vector<LabeledCloud>& clouds) {
  std::string out = "group,cloud,row_id\n";
  for (const auto& c : clouds) {
    for (std::size_t row : c.row_ids) {
      out += text::csv_quote(c.group) + ',' + std::to_string(c.cloud_index) + ',' + std::to_string(row) + '\n';
    }
  }
  return out;
}

double pooled_r_max(const std::vector<LabeledCloud>& clouds) {
  PointCloud pooled;
  for (const auto& c : clouds) {
    for (std::size_t i = 0; i < c.cloud.size(); ++i) pooled.append({c.cloud.point(i), c.cloud.dim()});
  }
  const double d = diameter(pooled);
  return d > 0.0 ? 1.1 * d : 1.0;
}

namespace {

PersistenceDiagram cloud_diagram(const PointCloud& cloud, int hom_dim, double r_max, std::size_t budget) {
  const auto fc = build_filtration(cloud, hom_dim + 1, r_max, budget);
  return select_dim(diagrams(fc, hom_dim), hom_dim);
}

}  // namespace

AnalysisReport analyze(const std::vector<LabeledCloud>& clouds, const AnalysisOptions& opts) {
  AnalysisReport report;
  report.clouds = clouds;
  report.r_max = opts.r_max ? *opts.r_max : pooled_r_max(clouds);
  report.diagrams.dim = opts.hom_dim;
  for (const auto& c : clouds) {
    auto it = std::find_if(report.diagrams.groups.begin(), report.diagrams.groups.end(),
                           [&](const DiagramGroup& g) { return g.name == c.group; });
    if (it == report.diagrams.groups.end()) {
      report.diagrams.groups.push_back(DiagramGroup{c.group, {}});
      it = std::prev(report.diagrams.groups.end());
    }
    it->diagrams.push_back(cloud_diagram(c.cloud, opts.hom_dim, report.r_max, opts.simplex_budget));
  }
  report.diagrams.validate();
  const DistanceCache cache = DistanceCache::build(report.diagrams, opts.metric);
  report.omnibus = omnibus_test(report.diagrams, cache, opts.test);
  if (report.diagrams.groups.size() >= 3 && (opts.force_posthoc || report.omnibus.p_value <= opts.alpha)) {
    report.pairwise = post_hoc(report.diagrams, cache, opts.test);
    report.posthoc_run = true;
  }
  return report;
}

nlohmann::ordered_json to_json(const AnalysisReport& report, const AnalysisOptions& opts) {
  auto j = to_json(report.diagrams, report.omnibus, report.pairwise, opts.alpha);
  j["posthoc_run"] = report.posthoc_run;
  j["hom_dim"] = opts.hom_dim;
  j["r_max"] = report.r_max;
  j["r_max_policy"] = opts.r_max ? "fixed" : "pooled diameter x 1.1";
  j["metric_exponent"] = opts.metric.exponent;
  j["include_essential"] = opts.metric.include_essential;
  j["max_exact"] = opts.test.max_exact;
  j["n_perms"] = opts.test.n_samples;
  nlohmann::ordered_json clouds = nlohmann::ordered_json::array();
  for (const auto& c : report.clouds) {
    clouds.push_back({{"group", c.group}, {"cloud", c.cloud_index}, {"rows", c.row_ids}});
  }
  j["clouds"] = clouds;
  return j;
}

std::string report_text(const AnalysisReport& report, const AnalysisOptions& opts) {
  std::ostringstream out;
  out << "Homological dimension: " << opts.hom_dim << '\n';
  out << "r_max: " << csv::format_real(report.r_max) << '\n';
  out << "Groups:";
  for (const auto& g : report.diagrams.groups) out << ' ' << g.name << " (" << g.diagrams.size() << " clouds)";
  out << "\n\n";
  const auto line = [&](const std::string& what, const TestResult& r) {
    out << std::left << std::setw(36) << what << " p = " << csv::format_real(r.p_value) << "  ("
        << r.at_or_below << '/' << r.replicates << ", " << to_string(r.mode) << ", statistic "
        << csv::format_real(r.observed_stat) << ")" << (r.p_value <= opts.alpha ? "  *" : "") << '\n';
  };
  line("omnibus", report.omnibus);
  if (report.posthoc_run) {
    for (const auto& p : report.pairwise) line(p.first + " vs " + p.second, p.result);
  } else if (report.diagrams.groups.size() >= 3) {
    out << "post-hoc tests not run (omnibus p > " << csv::format_real(opts.alpha) << ")\n";
  }
  out << "\n* p <= " << csv::format_real(opts.alpha) << " (raw p-values, no multiplicity correction)\n";
  return out.str();
}

std::size_t RepresentativenessResult::representative_count(double threshold) const {
  return static_cast<std::size_t>(
      std::count_if(p_values.begin(), p_values.end(), [threshold](double p) { return p >= threshold; }));
}

std::string RepresentativenessResult::trials_csv(double threshold) const {
  std::string out = "trial,p_value,representative\n";
  for (std::size_t t = 0; t < p_values.size(); ++t) {
    out += std::to_string(t) + ',' + csv::format_real(p_values[t]) + ',' + (p_values[t] >= threshold ? "1" : "0") +
           '\n';
  }
  return out;
}

RepresentativenessResult representativeness(const Dataset& ds, const RepresentativenessOptions& opts) {
  if (opts.spaces < 2) throw InputError("at least two spaces are required");
  if (opts.clouds_per_space < 2) throw InputError("at least two clouds per space are required");
  if (opts.points_per_cloud < 1 || opts.trials < 1) throw InputError("points per cloud and trials must be positive");
  const auto positions = ds.positions_of(opts.group);
  if (positions.empty()) throw InputError("group '" + opts.group + "' not found");
  const std::size_t space_size = opts.clouds_per_space * opts.points_per_cloud;
  const std::size_t used = opts.spaces * space_size;
  if (positions.size() < used) {
    throw InputError("group '" + opts.group + "' has " + std::to_string(positions.size()) + " rows; " +
                     std::to_string(opts.spaces) + " spaces of " + std::to_string(space_size) + " need " +
                     std::to_string(used));
  }
  RepresentativenessResult result;
  result.discarded = positions.size() - used;
  if (opts.analysis.r_max) {
    result.r_max = *opts.analysis.r_max;
  } else {
    std::vector<std::vector<double>> pts;
    for (std::size_t p : positions) pts.push_back(ds.rows[p]);
    const double d = diameter(PointCloud::from_rows(pts));
    result.r_max = d > 0.0 ? 1.1 * d : 1.0;
  }
  const std::size_t width = std::to_string(opts.spaces).size();
  const auto space_name = [width](std::size_t s) {
    std::string n = std::to_string(s + 1);
    return "space" + std::string(width - n.size(), '0') + n;
  };
  const auto shuffled = [&](std::size_t trial) {
    auto order = positions;
    Rng rng{opts.seed, kRepresentStream, trial};
    rng.shuffle(order);
    return order;
  };

  for (std::size_t t = 0; t < opts.trials; ++t) {
    const auto order = shuffled(t);
    GroupedDiagrams gd;
    gd.dim = opts.analysis.hom_dim;
    for (std::size_t s = 0; s < opts.spaces; ++s) {
      DiagramGroup group{space_name(s), {}};
      for (std::size_t c = 0; c < opts.clouds_per_space; ++c) {
        const std::size_t start = s * space_size + c * opts.points_per_cloud;
        std::vector<std::vector<double>> pts;
        for (std::size_t i = start; i < start + opts.points_per_cloud; ++i) pts.push_back(ds.rows[order[i]]);
        group.diagrams.push_back(cloud_diagram(PointCloud::from_rows(pts), opts.analysis.hom_dim, result.r_max,
                                               opts.analysis.simplex_budget));
      }
      gd.groups.push_back(std::move(group));
    }
    const DistanceCache cache = DistanceCache::build(gd, opts.analysis.metric);
    TestOptions test = opts.analysis.test;
    test.seed = derive_seed({opts.seed, t, kPermutationStream});
    test.keep_null = false;
    result.p_values.push_back(omnibus_test(gd, cache, test).p_value);
  }

  std::vector<std::size_t> representative;
  for (std::size_t t = 0; t < result.p_values.size(); ++t) {
    if (result.p_values[t] >= opts.threshold) representative.push_back(t);
  }
  if (representative.empty()) {
    throw NoRepresentativeTrial("none of the " + std::to_string(opts.trials) + " trials reached p >= " +
                                csv::format_real(opts.threshold) + "; run more trials or lower the threshold");
  }
  Rng pick{opts.seed, kSelectStream};
  result.selected_trial = representative[pick.below(representative.size())];
  result.selected_space = static_cast<std::size_t>(pick.below(opts.spaces));
  const auto order = shuffled(result.selected_trial);
  for (std::size_t i = 0; i < space_size; ++i) {
    result.selected_rows.push_back(ds.row_ids[order[result.selected_space * space_size + i]]);
  }
  std::sort(result.selected_rows.begin(), result.selected_rows.end());
  return result;
}

}  // namespace persist
