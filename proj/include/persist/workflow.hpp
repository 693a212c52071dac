#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "json.hpp"
#include "persist/diagram_metric.hpp"
#include "persist/errors.hpp"
#include "persist/permutation.hpp"
#include "persist/vr_filtration.hpp"

namespace persist {

// Group-labelled tabular data: m real features plus one categorical label per row.
struct Dataset {
  std::vector<std::string> feature_names;
  std::vector<std::vector<double>> rows;
  std::vector<std::string> labels;
  std::vector<std::size_t> row_ids;  // 0-based data row in the source file (header excluded)
  bool standardized = false;

  std::size_t size() const { return rows.size(); }
  // Group levels, sorted.
  std::vector<std::string> levels() const;
  std::map<std::string, std::size_t> counts() const;
  // Positions (into rows) of the given level, in file order.
  std::vector<std::size_t> positions_of(const std::string& level) const;
  // Position of a row id.
  std::size_t position_of_row(std::size_t row_id) const;

  // Z-scores every feature (sample standard deviation); constant features are
  // only centred.
  void standardize();
  // Keeps only the listed row ids for `level`; other levels are untouched.
  void restrict_level(const std::string& level, const std::vector<std::size_t>& keep_rows);
};

// Reads a CSV. Columns are header names when `header` is set, otherwise
// 0-based column indices.
Dataset ingest(const std::filesystem::path& path, const std::vector<std::string>& feature_columns,
               const std::string& group_column, bool header);

struct PartitionPlan {
  std::size_t clouds_per_group = 4;
  std::size_t points_per_cloud = 44;
  std::size_t balance_to = 176;
  std::uint64_t seed = 0;

  void validate() const;
};

struct LabeledCloud {
  std::string group;
  std::size_t cloud_index = 0;
  std::vector<std::size_t> row_ids;
  PointCloud cloud;
};

// Per group (sorted level order): seeded uniform subsample of balance_to rows,
// then a seeded split into clouds_per_group clouds of points_per_cloud.
std::vector<LabeledCloud> balance_and_partition(const Dataset& ds, const PartitionPlan& plan);

// Rebuilds clouds from recorded provenance (`group,cloud,row_id` CSV).
std::vector<LabeledCloud> clouds_from_partition(const Dataset& ds, const std::filesystem::path& partition_csv);
std::string partition_csv(const std::vector<LabeledCloud>& clouds);

struct AnalysisOptions {
  int hom_dim = 1;
  std::optional<double> r_max;  // unset: 1.1 x pooled-data diameter
  MetricOptions metric;
  TestOptions test;
  double alpha = 0.05;
  bool force_posthoc = false;
  std::size_t simplex_budget = kDefaultSimplexBudget;
};

struct AnalysisReport {
  GroupedDiagrams diagrams;
  TestResult omnibus;
  bool posthoc_run = false;
  std::vector<PairwiseResult> pairwise;
  double r_max = 0.0;
  std::vector<LabeledCloud> clouds;
};

// 1.1 x the diameter of all points pooled.
double pooled_r_max(const std::vector<LabeledCloud>& clouds);

// Diagrams for every cloud, omnibus test across groups, post-hoc tests when
// the omnibus p <= alpha (or always with force_posthoc) and s >= 3.
AnalysisReport analyze(const std::vector<LabeledCloud>& clouds, const AnalysisOptions& opts);

nlohmann::ordered_json to_json(const AnalysisReport& report, const AnalysisOptions& opts);
std::string report_text(const AnalysisReport& report, const AnalysisOptions& opts);

class NoRepresentativeTrial : public InputError {
 public:
  using InputError::InputError;
};

struct RepresentativenessOptions {
  std::string group;
  std::size_t spaces = 9;
  std::size_t clouds_per_space = 4;
  std::size_t points_per_cloud = 44;
  std::size_t trials = 150;
  double threshold = 0.1;
  std::uint64_t seed = 0;
  AnalysisOptions analysis;
};

struct RepresentativenessResult {
  std::vector<double> p_values;  // one per trial
  std::size_t discarded = 0;     // rows left over in every trial
  std::size_t selected_trial = 0;
  std::size_t selected_space = 0;
  std::vector<std::size_t> selected_rows;  // sorted row ids
  double r_max = 0.0;

  std::size_t representative_count(double threshold) const;
  std::string trials_csv(double threshold) const;
};

// Repeatedly partitions one oversized group into `spaces` equal spaces (extra
// rows discarded at random), tests them against each other, and draws one
// space uniformly from a uniformly chosen trial whose p >= threshold.
RepresentativenessResult representativeness(const Dataset& ds, const RepresentativenessOptions& opts);

}  // namespace persist
