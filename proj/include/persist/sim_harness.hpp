#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include "persist/diagram_metric.hpp"
#include "persist/permutation.hpp"
#include "persist/samplers.hpp"

namespace persist {

enum class PostHocPolicy { off, gated, always };

struct ScenarioConfig {
  std::string name = "scenario";
  TrialPlan plan;
  std::size_t trials = 100;
  double alpha = 0.05;
  int hom_dim = 1;
  std::uint64_t n_perms = 100'000;
  std::uint64_t max_exact = 200'000;
  PostHocPolicy posthoc = PostHocPolicy::off;
  std::optional<double> r_max;  // unset: 1.1 x the largest noiseless space diameter
  MetricOptions metric;
  std::size_t simplex_budget = kDefaultSimplexBudget;
  // Optional grid. When sizes are given every space uses that many points per
  // cloud; when sigmas are given every space uses that noise level.
  std::vector<std::size_t> sweep_sizes;
  std::vector<double> sweep_sigmas;
  std::string source_text;  // verbatim config file, echoed in reports

  void validate() const;
};

// Parses the INI-style scenario file (see README for keys).
ScenarioConfig parse_scenario(const std::string& text);
ScenarioConfig load_scenario(const std::filesystem::path& path);

double scenario_r_max(const ScenarioConfig& cfg);

struct TrialOutcome {
  TestResult omnibus;
  bool posthoc_run = false;
  std::vector<PairwiseResult> pairwise;
};

// One trial: sample every cloud from the (plan.seed, trial_index) substreams,
// compute the hom_dim diagrams with a shared r_max, fill the distance cache,
// run the omnibus test and, per policy, the post-hoc tests.
TrialOutcome run_trial(const TrialPlan& plan, const ScenarioConfig& cfg, std::size_t trial_index);

struct CellResult {
  std::size_t sample_size = 0;  // 0 when the cell keeps per-space sizes
  double sigma = -1.0;          // < 0 when the cell keeps per-space noise
  std::vector<std::size_t> points_per_cloud;
  std::vector<TrialOutcome> trials;
  std::vector<std::string> pair_names;  // "A vs B", in post-hoc order
  std::string error;                    // non-empty when the cell failed

  double percent_significant(double alpha) const;
  // Percent of trials whose post-hoc test `pair` ran and had p <= alpha.
  double percent_pair_significant(std::size_t pair, double alpha) const;
};

struct ScenarioReport {
  ScenarioConfig config;
  double r_max = 0.0;
  std::vector<CellResult> cells;

  // One row per (cell, test): sample_size,sigma,test,trials,significant,percent.
  std::string summary_csv() const;
  // One row per (cell, trial, test) with the raw p-value.
  std::string pvalues_csv() const;
  // Human-readable tables, one per test: rows = sample size, columns = noise.
  std::string text_tables() const;
  void write(const std::filesystem::path& dir) const;
};

ScenarioReport run_scenario(const ScenarioConfig& cfg);

}  // namespace persist
