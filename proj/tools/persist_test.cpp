#include <CLI11.hpp>

#include <filesystem>
#include <iostream>
#include <map>
#include <new>
#include <optional>
#include <string>
#include <vector>

#include "json.hpp"
#include "persist/csv.hpp"
#include "persist/diagram_metric.hpp"
#include "persist/errors.hpp"
#include "persist/permutation.hpp"
#include "persist/persistence.hpp"
#include "persist/rng.hpp"
#include "persist/samplers.hpp"
#include "persist/sim_harness.hpp"
#include "persist/text.hpp"
#include "persist/vr_filtration.hpp"
#include "persist/workflow.hpp"

namespace fs = std::filesystem;
using namespace persist;

namespace {

constexpr int kExitInput = 2;
constexpr int kExitResource = 3;
constexpr int kExitConsistency = 4;

struct Common {
  std::uint64_t seed = 0;
  int hom_dim = 1;
  std::optional<double> r_max;
  double metric_exponent = 2.0;
  bool no_essential = false;
  std::uint64_t n_perms = 100'000;
  std::uint64_t max_exact = 200'000;
  double alpha = 0.05;
  std::string out;
  std::size_t simplex_budget = kDefaultSimplexBudget;

  MetricOptions metric() const { return {metric_exponent, !no_essential}; }
  TestOptions test() const {
    TestOptions t;
    t.max_exact = max_exact;
    t.n_samples = n_perms;
    t.seed = seed;
    return t;
  }
};

void add_common(CLI::App* app, Common& c) {
  app->add_option("--seed", c.seed, "Master seed")->capture_default_str();
  app->add_option("--hom-dim", c.hom_dim, "Homological dimension")->capture_default_str()->check(CLI::Range(0, 8));
  app->add_option("--r-max", c.r_max, "Maximum filtration scale (default: 1.1 x pooled diameter)")
      ->check(CLI::PositiveNumber);
  app->add_option("--metric-exponent", c.metric_exponent, "Exponent q of the diagram metric")->capture_default_str();
  app->add_flag("--no-essential", c.no_essential, "Drop essential classes before matching");
  app->add_option("--n-perms", c.n_perms, "Sampled permutations when exact enumeration is too large")
      ->capture_default_str();
  app->add_option("--max-exact", c.max_exact, "Largest assignment count enumerated exactly")->capture_default_str();
  app->add_option("--alpha", c.alpha, "Significance level")->capture_default_str();
  app->add_option("--simplex-budget", c.simplex_budget, "Maximum simplices per filtration")->capture_default_str();
}

void emit(const std::string& out, const std::string& content) {
  if (out.empty() || out == "-") {
    std::cout << content;
  } else {
    csv::write_text(out, content);
  }
}

std::string json_text(const nlohmann::ordered_json& j) { return j.dump(2) + "\n"; }

// ---- sample ----

struct SampleArgs {
  std::string space = "circle";
  std::vector<double> radii{1.0};
  int chords = 0;
  std::vector<double> chord_heights;
  double sigma = 0.0;
  std::size_t points = 24;
  std::size_t clouds = 1;
  std::string prefix = "cloud";
};

int run_sample(const SampleArgs& a, const Common& c) {
  SpaceSpec spec;
  spec.kind = parse_space_kind(a.space);
  spec.radii = a.radii;
  spec.chords = a.chords;
  spec.chord_heights = a.chord_heights;
  spec.noise_sigma = a.sigma;
  spec.validate();
  if (a.points < 1 || a.clouds < 1) throw InputError("--points and --clouds must be positive");
  if (a.clouds == 1) {
    Rng rng{c.seed, 0};
    emit(c.out, point_cloud_csv(sample_space(spec, a.points, rng)));
    return 0;
  }
  if (c.out.empty()) throw InputError("--out DIR is required for more than one cloud");
  const std::size_t width = std::max<std::size_t>(3, std::to_string(a.clouds - 1).size());
  for (std::size_t i = 0; i < a.clouds; ++i) {
    Rng rng{c.seed, i};
    std::string n = std::to_string(i);
    n.insert(0, width - n.size(), '0');
    csv::write_text(fs::path(c.out) / (a.prefix + "_" + n + ".csv"), point_cloud_csv(sample_space(spec, a.points, rng)));
  }
  return 0;
}

// ---- diagram ----

struct DiagramArgs {
  std::string input;
  bool header = false;
  bool distance_matrix = false;
  std::string complex_out;
};

int run_diagram(const DiagramArgs& a, const Common& c) {
  FilteredComplex fc;
  if (a.distance_matrix) {
    const auto dm = DistanceMatrix::from_rows(csv::read_numeric(a.input, a.header));
    const double r = c.r_max ? *c.r_max : (dm.max() > 0.0 ? 1.1 * dm.max() : 1.0);
    fc = build_filtration(dm, c.hom_dim + 1, r, c.simplex_budget);
  } else {
    const auto cloud = read_point_cloud(a.input, a.header);
    const double d = diameter(cloud);
    const double r = c.r_max ? *c.r_max : (d > 0.0 ? 1.1 * d : 1.0);
    fc = build_filtration(cloud, c.hom_dim + 1, r, c.simplex_budget);
  }
  if (!a.complex_out.empty()) csv::write_text(a.complex_out, complex_text(fc));
  emit(c.out, diagrams_csv(diagrams(fc, c.hom_dim)));
  return 0;
}

// ---- distance ----

struct DistanceArgs {
  std::vector<std::string> inputs;
};

int run_distance(const DistanceArgs& a, const Common& c) {
  if (a.inputs.size() < 2) throw InputError("distance needs at least two diagram files");
  std::vector<PersistenceDiagram> ds;
  for (const auto& p : a.inputs) ds.push_back(select_dim(parse_diagrams_csv(p), c.hom_dim));
  const std::size_t n = ds.size();
  std::vector<double> values(n * n, 0.0);
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = i + 1; j < n; ++j) {
      values[i * n + j] = values[j * n + i] = diagram_distance(ds[i], ds[j], c.metric());
    }
  }
  if (n == 2 && c.out.empty()) {
    std::cout << csv::format_real(values[1]) << '\n';
    return 0;
  }
  std::vector<std::string> ids;
  for (const auto& p : a.inputs) ids.push_back(fs::path(p).stem().string());
  emit(c.out, distance_matrix_csv(ids, values));
  return 0;
}

// ---- test ----

struct TestArgs {
  std::vector<std::string> groups;
  bool clouds = false;
  bool header = false;
  std::string posthoc = "gated";
  std::string dump_null;
};

GroupedDiagrams load_groups(const TestArgs& a, const Common& c, double& r_max_used) {
  struct Entry {
    std::string name;
    std::vector<std::string> files;
  };
  std::vector<Entry> entries;
  for (const auto& g : a.groups) {
    const auto eq = g.find('=');
    if (eq == std::string::npos || eq == 0) throw InputError("--group expects NAME=file1,file2,... (got '" + g + "')");
    Entry e{g.substr(0, eq), {}};
    for (const auto& f : text::split(g.substr(eq + 1), ',')) {
      if (!f.empty()) e.files.push_back(f);
    }
    entries.push_back(std::move(e));
  }
  GroupedDiagrams gd;
  gd.dim = c.hom_dim;
  r_max_used = 0.0;
  if (a.clouds) {
    std::vector<std::vector<PointCloud>> clouds;
    PointCloud pooled;
    for (const auto& e : entries) {
      clouds.emplace_back();
      for (const auto& f : e.files) {
        clouds.back().push_back(read_point_cloud(f, a.header));
        const auto& pc = clouds.back().back();
        for (std::size_t i = 0; i < pc.size(); ++i) pooled.append({pc.point(i), pc.dim()});
      }
    }
    const double d = diameter(pooled);
    r_max_used = c.r_max ? *c.r_max : (d > 0.0 ? 1.1 * d : 1.0);
    for (std::size_t g = 0; g < entries.size(); ++g) {
      DiagramGroup group{entries[g].name, {}};
      for (const auto& pc : clouds[g]) {
        const auto fc = build_filtration(pc, c.hom_dim + 1, r_max_used, c.simplex_budget);
        group.diagrams.push_back(select_dim(diagrams(fc, c.hom_dim), c.hom_dim));
      }
      gd.groups.push_back(std::move(group));
    }
  } else {
    for (const auto& e : entries) {
      DiagramGroup group{e.name, {}};
      for (const auto& f : e.files) group.diagrams.push_back(select_dim(parse_diagrams_csv(f), c.hom_dim));
      gd.groups.push_back(std::move(group));
    }
  }
  gd.validate();
  return gd;
}

int run_test(const TestArgs& a, const Common& c) {
  double r_max_used = 0.0;
  const auto gd = load_groups(a, c, r_max_used);
  const auto cache = DistanceCache::build(gd, c.metric());
  auto opts = c.test();
  opts.keep_null = !a.dump_null.empty();
  const auto omnibus = omnibus_test(gd, cache, opts);
  std::vector<PairwiseResult> pairwise;
  const bool want = a.posthoc == "always" || (a.posthoc == "gated" && omnibus.p_value <= c.alpha);
  if (gd.groups.size() >= 3 && want) {
    auto ph = c.test();
    pairwise = post_hoc(gd, cache, ph);
  }
  if (!a.dump_null.empty()) csv::write_text(a.dump_null, null_distribution_csv(omnibus));
  auto j = to_json(gd, omnibus, pairwise, c.alpha);
  j["posthoc_policy"] = a.posthoc;
  j["hom_dim"] = c.hom_dim;
  j["metric_exponent"] = c.metric_exponent;
  j["include_essential"] = !c.no_essential;
  if (a.clouds) j["r_max"] = r_max_used;
  emit(c.out, json_text(j));
  return 0;
}

// ---- simulate ----

struct SimulateArgs {
  std::string config;
  std::optional<std::size_t> trials;
  bool seed_given = false;
  bool n_perms_given = false;
  bool max_exact_given = false;
  bool alpha_given = false;
  bool hom_dim_given = false;
  bool r_max_given = false;
  bool metric_given = false;
  std::string posthoc;
};

int run_simulate(const SimulateArgs& a, const Common& c) {
  auto cfg = load_scenario(a.config);
  std::string overrides;
  const auto note = [&overrides](const std::string& key, const std::string& value) {
    overrides += "; " + key + " = " + value + "\n";
  };
  if (a.trials) {
    cfg.trials = *a.trials;
    note("trials", std::to_string(*a.trials));
  }
  if (a.seed_given) {
    cfg.plan.seed = c.seed;
    note("seed", std::to_string(c.seed));
  }
  if (a.n_perms_given) {
    cfg.n_perms = c.n_perms;
    note("n_perms", std::to_string(c.n_perms));
  }
  if (a.max_exact_given) {
    cfg.max_exact = c.max_exact;
    note("max_exact", std::to_string(c.max_exact));
  }
  if (a.alpha_given) {
    cfg.alpha = c.alpha;
    note("alpha", csv::format_real(c.alpha));
  }
  if (a.hom_dim_given) {
    cfg.hom_dim = c.hom_dim;
    note("hom_dim", std::to_string(c.hom_dim));
  }
  if (a.r_max_given) {
    cfg.r_max = c.r_max;
    note("r_max", csv::format_real(*c.r_max));
  }
  if (a.metric_given) {
    cfg.metric = c.metric();
    note("metric_exponent", csv::format_real(c.metric_exponent));
    note("include_essential", c.no_essential ? "false" : "true");
  }
  if (!a.posthoc.empty()) {
    cfg.posthoc = a.posthoc == "always" ? PostHocPolicy::always
                  : a.posthoc == "off"  ? PostHocPolicy::off
                                        : PostHocPolicy::gated;
    note("posthoc", a.posthoc);
  }
  if (!overrides.empty()) cfg.source_text += "\n; command-line overrides\n" + overrides;
  cfg.validate();
  const auto report = run_scenario(cfg);
  if (c.out.empty()) {
    std::cout << report.text_tables();
  } else {
    report.write(c.out);
    std::cout << report.text_tables();
  }
  for (const auto& cell : report.cells) {
    if (!cell.error.empty()) return kExitInput;
  }
  return 0;
}

// ---- analyze / representativeness ----

struct DataArgs {
  std::string input;
  std::vector<std::string> features;
  std::string group_column;
  bool no_header = false;
  bool standardize = false;
};

Dataset load_dataset(const DataArgs& d) {
  auto ds = ingest(d.input, d.features, d.group_column, !d.no_header);
  if (d.standardize) ds.standardize();
  return ds;
}

nlohmann::ordered_json counts_json(const Dataset& ds) {
  nlohmann::ordered_json j = nlohmann::ordered_json::object();
  for (const auto& [level, n] : ds.counts()) j[level] = n;
  return j;
}

std::vector<std::size_t> read_row_ids(const std::string& path) {
  const auto records = csv::read_records(path);
  std::vector<std::size_t> rows;
  for (std::size_t r = 0; r < records.size(); ++r) {
    if (records[r].empty()) continue;
    if (r == 0 && records[r][0] == "row_id") continue;
    rows.push_back(text::parse_size(records[r][0], "row id"));
  }
  return rows;
}

AnalysisOptions analysis_options(const Common& c) {
  AnalysisOptions o;
  o.hom_dim = c.hom_dim;
  o.r_max = c.r_max;
  o.metric = c.metric();
  o.test = c.test();
  o.alpha = c.alpha;
  o.simplex_budget = c.simplex_budget;
  return o;
}

struct AnalyzeArgs {
  DataArgs data;
  std::size_t clouds_per_group = 4;
  std::size_t points_per_cloud = 44;
  std::optional<std::size_t> balance_to;
  std::string partition;
  std::vector<std::string> subsets;
  bool posthoc_always = false;
};

int run_analyze(const AnalyzeArgs& a, const Common& c) {
  auto ds = load_dataset(a.data);
  for (const auto& s : a.subsets) {
    const auto colon = s.find(':');
    if (colon == std::string::npos || colon == 0) throw InputError("--subset expects GROUP:FILE (got '" + s + "')");
    ds.restrict_level(s.substr(0, colon), read_row_ids(s.substr(colon + 1)));
  }
  std::vector<LabeledCloud> clouds;
  PartitionPlan plan;
  plan.clouds_per_group = a.clouds_per_group;
  plan.points_per_cloud = a.points_per_cloud;
  plan.balance_to = a.balance_to ? *a.balance_to : a.clouds_per_group * a.points_per_cloud;
  plan.seed = c.seed;
  if (a.partition.empty()) {
    clouds = balance_and_partition(ds, plan);
  } else {
    clouds = clouds_from_partition(ds, a.partition);
  }
  auto opts = analysis_options(c);
  opts.force_posthoc = a.posthoc_always;
  const auto report = analyze(clouds, opts);
  auto j = to_json(report, opts);
  j["input"] = fs::path(a.data.input).filename().string();
  j["features"] = a.data.features;
  j["group_column"] = a.data.group_column;
  j["standardized"] = ds.standardized;
  j["group_counts"] = counts_json(ds);
  if (a.partition.empty()) {
    j["partition"] = {{"clouds_per_group", plan.clouds_per_group},
                      {"points_per_cloud", plan.points_per_cloud},
                      {"balance_to", plan.balance_to},
                      {"seed", plan.seed}};
  } else {
    j["partition"] = {{"source", fs::path(a.partition).filename().string()}};
  }
  if (c.out.empty()) {
    std::cout << report_text(report, opts);
    return 0;
  }
  const fs::path out(c.out);
  csv::write_text(out / "report.json", json_text(j));
  csv::write_text(out / "report.txt", report_text(report, opts));
  csv::write_text(out / "partition.csv", partition_csv(report.clouds));
  std::cout << report_text(report, opts);
  return 0;
}

struct ReprArgs {
  DataArgs data;
  std::string group;
  std::size_t spaces = 9;
  std::size_t clouds_per_space = 4;
  std::size_t points_per_cloud = 44;
  std::size_t trials = 150;
  double threshold = 0.1;
};

int run_representativeness(const ReprArgs& a, const Common& c) {
  const auto ds = load_dataset(a.data);
  RepresentativenessOptions o;
  o.group = a.group;
  o.spaces = a.spaces;
  o.clouds_per_space = a.clouds_per_space;
  o.points_per_cloud = a.points_per_cloud;
  o.trials = a.trials;
  o.threshold = a.threshold;
  o.seed = c.seed;
  o.analysis = analysis_options(c);
  const auto r = representativeness(ds, o);
  nlohmann::ordered_json j;
  j["group"] = a.group;
  j["spaces"] = a.spaces;
  j["clouds_per_space"] = a.clouds_per_space;
  j["points_per_cloud"] = a.points_per_cloud;
  j["trials"] = a.trials;
  j["threshold"] = a.threshold;
  j["seed"] = c.seed;
  j["hom_dim"] = c.hom_dim;
  j["r_max"] = r.r_max;
  j["standardized"] = ds.standardized;
  j["discarded_per_trial"] = r.discarded;
  j["representative_trials"] = r.representative_count(a.threshold);
  j["selected_trial"] = r.selected_trial;
  j["selected_space"] = r.selected_space + 1;
  j["selected_rows"] = r.selected_rows;
  std::string rows = "row_id\n";
  for (std::size_t id : r.selected_rows) rows += std::to_string(id) + '\n';
  const std::string summary = std::to_string(r.representative_count(a.threshold)) + " of " +
                              std::to_string(a.trials) + " trials representative (p >= " +
                              csv::format_real(a.threshold) + "); selected space " +
                              std::to_string(r.selected_space + 1) + " of trial " +
                              std::to_string(r.selected_trial) + "; " + std::to_string(r.discarded) +
                              " rows discarded per trial\n";
  if (c.out.empty()) {
    std::cout << json_text(j);
    return 0;
  }
  const fs::path out(c.out);
  csv::write_text(out / "trials.csv", r.trials_csv(a.threshold));
  csv::write_text(out / "selected_rows.csv", rows);
  csv::write_text(out / "summary.json", json_text(j));
  std::cout << summary;
  return 0;
}

void add_data_options(CLI::App* app, DataArgs& d) {
  app->add_option("input", d.input, "CSV dataset")->required()->check(CLI::ExistingFile);
  app->add_option("--features", d.features, "Feature columns (names, or 0-based indices with --no-header)")
      ->required()
      ->delimiter(',');
  app->add_option("--group-column", d.group_column, "Categorical group column")->required();
  app->add_flag("--no-header", d.no_header, "The file has no header row");
  app->add_flag("--standardize", d.standardize, "Z-score every feature before analysis");
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Permutation tests on persistence diagrams of grouped point clouds", "persist-test"};
  app.require_subcommand(1);
  app.set_version_flag("--version", "persist-test 1.0.0");

  Common common;

  SampleArgs sample;
  auto* s = app.add_subcommand("sample", "Sample point clouds from a circle, wedge or chorded circle");
  add_common(s, common);
  s->add_option("--kind,--space", sample.space, "circle | wedge | chorded_circle")->capture_default_str();
  s->add_option("--radii", sample.radii, "Radius (circle) or component radii (wedge)")->delimiter(',');
  s->add_option("--chords", sample.chords, "Number of chords (chorded_circle)");
  s->add_option("--chord-heights", sample.chord_heights, "Chord heights")->delimiter(',');
  s->add_option("--sigma", sample.sigma, "Gaussian noise standard deviation")->capture_default_str();
  s->add_option("--n,--points", sample.points, "Points per cloud")->capture_default_str();
  s->add_option("--clouds", sample.clouds, "Number of clouds")->capture_default_str();
  s->add_option("--prefix", sample.prefix, "File name prefix")->capture_default_str();
  s->add_option("--out", common.out, "Output CSV for one cloud, directory for several (stdout when omitted)");

  DiagramArgs diagram;
  auto* d = app.add_subcommand("diagram", "Persistence diagrams of a point cloud or distance matrix");
  add_common(d, common);
  d->add_option("input", diagram.input, "Point cloud CSV (or distance matrix)")->required()->check(CLI::ExistingFile);
  d->add_flag("--header", diagram.header, "Skip the first row");
  d->add_flag("--distance-matrix", diagram.distance_matrix, "Input is a square distance matrix");
  d->add_option("--complex-out", diagram.complex_out, "Also write the filtered complex");
  d->add_option("--out", common.out, "Output diagram CSV (stdout when omitted)");

  DistanceArgs distance;
  auto* di = app.add_subcommand("distance", "Diagram distances between diagram CSVs");
  add_common(di, common);
  di->add_option("inputs", distance.inputs, "Diagram CSV files")->required()->check(CLI::ExistingFile);
  di->add_option("--out", common.out, "Distance-matrix CSV (stdout when omitted)");

  TestArgs test;
  auto* t = app.add_subcommand("test", "Omnibus permutation test with optional post-hoc pairs");
  add_common(t, common);
  t->add_option("--group", test.groups, "NAME=file1,file2,... (repeat per group)")->required();
  t->add_flag("--clouds", test.clouds, "Inputs are point clouds rather than diagram CSVs");
  t->add_flag("--header", test.header, "Point cloud files have a header row");
  t->add_option("--posthoc", test.posthoc, "off | gated | always")
      ->capture_default_str()
      ->check(CLI::IsMember({"off", "gated", "always"}));
  t->add_option("--dump-null", test.dump_null, "Write the omnibus null distribution CSV");
  t->add_option("--out", common.out, "JSON report (stdout when omitted)");

  SimulateArgs simulate;
  auto* sim = app.add_subcommand("simulate", "Run a simulation scenario");
  add_common(sim, common);
  sim->add_option("--config", simulate.config, "Scenario file")->required()->check(CLI::ExistingFile);
  sim->add_option("--trials", simulate.trials, "Override the trial count");
  sim->add_option("--posthoc", simulate.posthoc, "Override the post-hoc policy")
      ->check(CLI::IsMember({"off", "gated", "always"}));
  sim->add_option("--out", common.out, "Report directory");

  AnalyzeArgs analyze_args;
  auto* an = app.add_subcommand("analyze", "Balance, partition and test a group-labelled dataset");
  add_common(an, common);
  add_data_options(an, analyze_args.data);
  an->add_option("--clouds-per-group", analyze_args.clouds_per_group)->capture_default_str();
  an->add_option("--points-per-cloud", analyze_args.points_per_cloud)->capture_default_str();
  an->add_option("--balance-to", analyze_args.balance_to, "Rows per group (default clouds x points)");
  an->add_option("--partition", analyze_args.partition, "Reuse a recorded partition CSV")
      ->check(CLI::ExistingFile);
  an->add_option("--subset", analyze_args.subsets, "GROUP:FILE restricting a group to listed row ids");
  an->add_flag("--posthoc-always", analyze_args.posthoc_always, "Run post-hoc tests regardless of the omnibus");
  an->add_option("--out", common.out, "Report directory (text to stdout when omitted)");

  ReprArgs repr;
  auto* rp = app.add_subcommand("representativeness", "Pick a representative subsample of an oversized group");
  add_common(rp, common);
  add_data_options(rp, repr.data);
  rp->add_option("--group", repr.group, "Group to subsample")->required();
  rp->add_option("--spaces", repr.spaces)->capture_default_str();
  rp->add_option("--clouds-per-space", repr.clouds_per_space)->capture_default_str();
  rp->add_option("--points-per-cloud", repr.points_per_cloud)->capture_default_str();
  rp->add_option("--trials", repr.trials)->capture_default_str();
  rp->add_option("--threshold", repr.threshold, "p-value at or above which a trial is representative")
      ->capture_default_str();
  rp->add_option("--out", common.out, "Output directory (JSON to stdout when omitted)");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : kExitInput;
  }

  try {
    if (*s) return run_sample(sample, common);
    if (*d) return run_diagram(diagram, common);
    if (*di) return run_distance(distance, common);
    if (*t) return run_test(test, common);
    if (*sim) {
      simulate.seed_given = sim->count("--seed") > 0;
      simulate.n_perms_given = sim->count("--n-perms") > 0;
      simulate.max_exact_given = sim->count("--max-exact") > 0;
      simulate.alpha_given = sim->count("--alpha") > 0;
      simulate.hom_dim_given = sim->count("--hom-dim") > 0;
      simulate.r_max_given = sim->count("--r-max") > 0;
      simulate.metric_given = sim->count("--metric-exponent") > 0 || sim->count("--no-essential") > 0;
      return run_simulate(simulate, common);
    }
    if (*an) return run_analyze(analyze_args, common);
    if (*rp) return run_representativeness(repr, common);
  } catch (const InputError& e) {
    std::cerr << "input error: " << e.what() << '\n';
    return kExitInput;
  } catch (const ResourceError& e) {
    std::cerr << "resource error: " << e.what() << '\n';
    return kExitResource;
  } catch (const std::bad_alloc&) {
    std::cerr << "resource error: out of memory\n";
    return kExitResource;
  } catch (const ConsistencyError& e) {
    std::cerr << "internal consistency error: " << e.what() << '\n';
    return kExitConsistency;
  } catch (const std::exception& e) {
    std::cerr << "internal error: " << e.what() << '\n';
    return kExitConsistency;
  }
  return 0;
}
