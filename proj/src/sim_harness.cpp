#include "persist/sim_harness.hpp"

#include <algorithm>
#include <boost/property_tree/ini_parser.hpp>
#include <boost/property_tree/ptree.hpp>
#include <cmath>
#include <fstream>
#include <iomanip>
#include <set>
#include <sstream>

#include "persist/csv.hpp"
#include "persist/errors.hpp"
#include "persist/persistence.hpp"
#include "persist/rng.hpp"
#include "persist/text.hpp"

namespace persist {

void ScenarioConfig::validate() const {
  plan.validate();
  if (trials < 1) throw InputError("trials must be at least 1");
  if (!(alpha > 0.0 && alpha < 1.0)) throw InputError("alpha must lie in (0, 1)");
  if (hom_dim < 0) throw InputError("hom_dim must be nonnegative");
  if (n_perms < 1) throw InputError("n_perms must be at least 1");
  if (r_max && !(*r_max > 0.0)) throw InputError("r_max must be positive");
  if (plan.specs.size() < 2) throw InputError("a scenario needs at least two spaces");
  for (std::size_t n : sweep_sizes) {
    if (n == 0) throw InputError("sweep sample sizes must be positive");
  }
  for (double s : sweep_sigmas) {
    if (!(s >= 0.0)) throw InputError("sweep sigmas must be nonnegative");
  }
}

namespace {

using boost::property_tree::ptree;

std::string get_text(const ptree& section, const std::string& key, const std::string& fallback) {
  const auto child = section.get_child_optional(ptree::path_type(key, '\0'));
  return child ? text::trim(child->data()) : fallback;
}

}  // namespace

ScenarioConfig parse_scenario(const std::string& source) {
  ptree tree;
  std::istringstream in(source);
  try {
    boost::property_tree::read_ini(in, tree);
  } catch (const boost::property_tree::ini_parser_error& e) {
    throw InputError(std::string("scenario file: ") + e.what());
  }
  ScenarioConfig cfg;
  cfg.source_text = source;
  const ptree empty;
  const auto scenario_it = tree.find("scenario");
  const ptree& sc = scenario_it == tree.not_found() ? empty : scenario_it->second;
  cfg.name = get_text(sc, "name", cfg.name);
  cfg.trials = text::parse_size(get_text(sc, "trials", "100"), "trials");
  cfg.alpha = text::parse_number(get_text(sc, "alpha", "0.05"), "alpha");
  cfg.hom_dim = static_cast<int>(text::parse_size(get_text(sc, "hom_dim", "1"), "hom_dim"));
  cfg.n_perms = text::parse_size(get_text(sc, "n_perms", "100000"), "n_perms");
  cfg.max_exact = text::parse_size(get_text(sc, "max_exact", "200000"), "max_exact");
  cfg.plan.seed = text::parse_size(get_text(sc, "seed", "0"), "seed");
  cfg.plan.clouds_per_group = text::parse_size(get_text(sc, "clouds_per_group", "20"), "clouds_per_group");
  cfg.metric.exponent = text::parse_number(get_text(sc, "metric_exponent", "2"), "metric_exponent");
  cfg.metric.include_essential = text::parse_bool(get_text(sc, "include_essential", "true"), "include_essential");
  cfg.simplex_budget = text::parse_size(get_text(sc, "simplex_budget", std::to_string(kDefaultSimplexBudget)),
                                        "simplex_budget");
  const std::string posthoc = get_text(sc, "posthoc", "off");
  if (posthoc == "off") {
    cfg.posthoc = PostHocPolicy::off;
  } else if (posthoc == "gated") {
    cfg.posthoc = PostHocPolicy::gated;
  } else if (posthoc == "always") {
    cfg.posthoc = PostHocPolicy::always;
  } else {
    throw InputError("posthoc must be off, gated or always");
  }
  const std::string r_max = get_text(sc, "r_max", "auto");
  if (r_max != "auto") cfg.r_max = text::parse_number(r_max, "r_max");
  const std::size_t default_points = text::parse_size(get_text(sc, "points", "24"), "points");
  const double default_sigma = text::parse_number(get_text(sc, "sigma", "0"), "sigma");

  for (const auto& [section, body] : tree) {
    if (section.rfind("space.", 0) != 0) continue;
    SpaceSpec spec;
    spec.label = section.substr(6);
    spec.kind = parse_space_kind(get_text(body, "kind", "circle"));
    if (spec.kind == SpaceKind::wedge) {
      spec.radii = text::parse_numbers(get_text(body, "radii", "1,1"), "radii");
    } else if (spec.kind == SpaceKind::circle) {
      spec.radii = {text::parse_number(get_text(body, "radius", "1"), "radius")};
    } else {
      spec.radii = {1.0};
      spec.chords = static_cast<int>(text::parse_size(get_text(body, "chords", "1"), "chords"));
      const std::string heights = get_text(body, "chord_heights", "");
      if (!heights.empty()) spec.chord_heights = text::parse_numbers(heights, "chord_heights");
    }
    spec.noise_sigma = text::parse_number(get_text(body, "sigma", text::format_number(default_sigma)), "sigma");
    cfg.plan.specs.push_back(spec);
    cfg.plan.points_per_cloud.push_back(
        text::parse_size(get_text(body, "points", std::to_string(default_points)), "points"));
  }
  const auto sweep_it = tree.find("sweep");
  if (sweep_it != tree.not_found()) {
    const std::string sizes = get_text(sweep_it->second, "sample_sizes", "");
    if (!sizes.empty()) {
      for (double v : text::parse_numbers(sizes, "sample_sizes")) {
        if (v < 1 || v != std::floor(v)) throw InputError("sample_sizes must be positive integers");
        cfg.sweep_sizes.push_back(static_cast<std::size_t>(v));
      }
    }
    const std::string sigmas = get_text(sweep_it->second, "sigmas", "");
    if (!sigmas.empty()) cfg.sweep_sigmas = text::parse_numbers(sigmas, "sigmas");
  }
  cfg.validate();
  return cfg;
}

ScenarioConfig load_scenario(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw InputError("cannot open scenario file '" + path.string() + "'");
  std::ostringstream ss;
  ss << in.rdbuf();
  return parse_scenario(ss.str());
}

double scenario_r_max(const ScenarioConfig& cfg) {
  if (cfg.r_max) return *cfg.r_max;
  double widest = 0.0;
  for (const auto& spec : cfg.plan.specs) widest = std::max(widest, spec.diameter());
  return 1.1 * widest;
}

namespace {

template <typename Error>
[[noreturn]] void rethrow_annotated(const Error& e, std::size_t trial_index) {
  throw Error("trial " + std::to_string(trial_index) + ": " + e.what());
}

constexpr std::uint64_t kPermutationStream = 0x7065726d75746174ULL;

TrialOutcome run_trial_unchecked(const TrialPlan& plan, const ScenarioConfig& cfg, std::size_t trial_index) {
  const double r_max = scenario_r_max(cfg);
  const auto clouds = sample_trial(plan, trial_index);
  GroupedDiagrams gd;
  gd.dim = cfg.hom_dim;
  for (std::size_t g = 0; g < clouds.size(); ++g) {
    DiagramGroup group;
    group.name = plan.specs[g].label.empty() ? "space" + std::to_string(g + 1) : plan.specs[g].label;
    for (const auto& cloud : clouds[g]) {
      const auto fc = build_filtration(cloud, cfg.hom_dim + 1, r_max, cfg.simplex_budget);
      group.diagrams.push_back(select_dim(diagrams(fc, cfg.hom_dim), cfg.hom_dim));
    }
    gd.groups.push_back(std::move(group));
  }
  const DistanceCache cache = DistanceCache::build(gd, cfg.metric);
  TestOptions opts;
  opts.max_exact = cfg.max_exact;
  opts.n_samples = cfg.n_perms;
  opts.seed = derive_seed({plan.seed, trial_index, kPermutationStream});

  TrialOutcome out;
  out.omnibus = omnibus_test(gd, cache, opts);
  const bool wanted = cfg.posthoc == PostHocPolicy::always ||
                      (cfg.posthoc == PostHocPolicy::gated && out.omnibus.p_value <= cfg.alpha);
  if (wanted && gd.groups.size() >= 3) {
    out.pairwise = post_hoc(gd, cache, opts);
    out.posthoc_run = true;
  }
  return out;
}

}  // namespace

TrialOutcome run_trial(const TrialPlan& plan, const ScenarioConfig& cfg, std::size_t trial_index) {
  try {
    return run_trial_unchecked(plan, cfg, trial_index);
  } catch (const InputError& e) {
    rethrow_annotated(e, trial_index);
  } catch (const ResourceError& e) {
    rethrow_annotated(e, trial_index);
  } catch (const ConsistencyError& e) {
    rethrow_annotated(e, trial_index);
  }
}

double CellResult::percent_significant(double alpha) const {
  if (trials.empty()) return 0.0;
  std::size_t hits = 0;
  for (const auto& t : trials) hits += t.omnibus.p_value <= alpha ? 1 : 0;
  return 100.0 * static_cast<double>(hits) / static_cast<double>(trials.size());
}

double CellResult::percent_pair_significant(std::size_t pair, double alpha) const {
  if (trials.empty()) return 0.0;
  std::size_t hits = 0;
  for (const auto& t : trials) {
    if (t.posthoc_run && pair < t.pairwise.size() && t.pairwise[pair].result.p_value <= alpha) ++hits;
  }
  return 100.0 * static_cast<double>(hits) / static_cast<double>(trials.size());
}

namespace {

std::vector<std::string> sorted_pair_names(const ScenarioConfig& cfg) {
  std::vector<std::string> names;
  for (std::size_t g = 0; g < cfg.plan.specs.size(); ++g) {
    names.push_back(cfg.plan.specs[g].label.empty() ? "space" + std::to_string(g + 1) : cfg.plan.specs[g].label);
  }
  std::sort(names.begin(), names.end());
  std::vector<std::string> pairs;
  for (std::size_t a = 0; a < names.size(); ++a) {
    for (std::size_t b = a + 1; b < names.size(); ++b) pairs.push_back(names[a] + " vs " + names[b]);
  }
  return pairs;
}

}  // namespace

ScenarioReport run_scenario(const ScenarioConfig& cfg) {
  cfg.validate();
  ScenarioReport report;
  report.config = cfg;
  report.r_max = scenario_r_max(cfg);

  std::vector<std::size_t> sizes = cfg.sweep_sizes;
  std::vector<double> sigmas = cfg.sweep_sigmas;
  if (sizes.empty()) sizes.push_back(0);
  if (sigmas.empty()) sigmas.push_back(-1.0);

  std::size_t cell_index = 0;
  for (std::size_t n : sizes) {
    for (double sigma : sigmas) {
      CellResult cell;
      cell.sample_size = n;
      cell.sigma = sigma;
      if (cfg.posthoc != PostHocPolicy::off && cfg.plan.specs.size() >= 3) cell.pair_names = sorted_pair_names(cfg);
      TrialPlan plan = cfg.plan;
      if (n > 0) std::fill(plan.points_per_cloud.begin(), plan.points_per_cloud.end(), n);
      if (sigma >= 0.0) {
        for (auto& spec : plan.specs) spec.noise_sigma = sigma;
      }
      plan.seed = derive_seed({cfg.plan.seed, cell_index});
      cell.points_per_cloud = plan.points_per_cloud;
      try {
        for (std::size_t t = 0; t < cfg.trials; ++t) cell.trials.push_back(run_trial(plan, cfg, t));
      } catch (const std::exception& e) {
        cell.error = e.what();
      }
      report.cells.push_back(std::move(cell));
      ++cell_index;
    }
  }
  return report;
}

namespace {

std::string cell_size(const CellResult& c) {
  if (c.sample_size > 0) return std::to_string(c.sample_size);
  std::string out;
  for (std::size_t i = 0; i < c.points_per_cloud.size(); ++i) {
    if (i) out += '/';
    out += std::to_string(c.points_per_cloud[i]);
  }
  return out;
}

std::string cell_sigma(const CellResult& c) { return c.sigma < 0.0 ? "spec" : csv::format_real(c.sigma); }

std::string sigma_label(const CellResult& c) {
  if (c.sigma < 0.0) return "noise: spec";
  std::ostringstream ss;
  ss << "noise " << std::setprecision(4) << c.sigma;
  return ss.str();
}

std::string percent_text(double v) {
  std::ostringstream ss;
  ss << std::fixed << std::setprecision(1) << v;
  return ss.str();
}

}  // namespace

std::string ScenarioReport::summary_csv() const {
  std::string out = "sample_size,sigma,test,trials,significant,percent,error\n";
  const double alpha = config.alpha;
  for (const auto& c : cells) {
    const std::string prefix = cell_size(c) + ',' + cell_sigma(c) + ',';
    const auto row = [&](const std::string& test, double pct) {
      const auto sig = static_cast<std::size_t>(std::llround(pct * static_cast<double>(c.trials.size()) / 100.0));
      out += prefix + test + ',' + std::to_string(c.trials.size()) + ',' + std::to_string(sig) + ',' +
             percent_text(pct) + ',' + text::csv_quote(c.error) + '\n';
    };
    row("omnibus", c.percent_significant(alpha));
    for (std::size_t p = 0; p < c.pair_names.size(); ++p) row(c.pair_names[p], c.percent_pair_significant(p, alpha));
  }
  return out;
}

std::string ScenarioReport::pvalues_csv() const {
  std::string out = "sample_size,sigma,trial,test,p_value,statistic,replicates,mode\n";
  for (const auto& c : cells) {
    const std::string prefix = cell_size(c) + ',' + cell_sigma(c) + ',';
    for (std::size_t t = 0; t < c.trials.size(); ++t) {
      const auto& tr = c.trials[t];
      const auto row = [&](const std::string& test, const TestResult& r) {
        out += prefix + std::to_string(t) + ',' + test + ',' + csv::format_real(r.p_value) + ',' +
               csv::format_real(r.observed_stat) + ',' + std::to_string(r.replicates) + ',' + to_string(r.mode) +
               '\n';
      };
      row("omnibus", tr.omnibus);
      for (std::size_t p = 0; p < tr.pairwise.size(); ++p) {
        row(tr.pairwise[p].first + " vs " + tr.pairwise[p].second, tr.pairwise[p].result);
      }
    }
  }
  return out;
}

std::string ScenarioReport::text_tables() const {
  std::ostringstream out;
  out << "Scenario: " << config.name << '\n';
  out << "Master seed: " << config.plan.seed << '\n';
  out << "r_max: " << csv::format_real(r_max) << '\n';
  out << "Trials per cell: " << config.trials << ", alpha: " << csv::format_real(config.alpha) << '\n';
  for (const auto& c : cells) {
    if (!c.error.empty()) out << "Cell " << cell_size(c) << " / " << cell_sigma(c) << " failed: " << c.error << '\n';
  }

  std::vector<std::string> size_keys;
  std::vector<std::string> sigma_keys;
  std::vector<std::string> sigma_labels;
  for (const auto& c : cells) {
    if (std::find(size_keys.begin(), size_keys.end(), cell_size(c)) == size_keys.end())
      size_keys.push_back(cell_size(c));
    if (std::find(sigma_keys.begin(), sigma_keys.end(), cell_sigma(c)) == sigma_keys.end()) {
      sigma_keys.push_back(cell_sigma(c));
      sigma_labels.push_back(sigma_label(c));
    }
  }
  std::vector<std::string> tests{"omnibus"};
  if (!cells.empty()) tests.insert(tests.end(), cells.front().pair_names.begin(), cells.front().pair_names.end());

  for (std::size_t t = 0; t < tests.size(); ++t) {
    out << '\n' << "Percent of trials with p <= " << csv::format_real(config.alpha) << ": " << tests[t] << '\n';
    out << std::left << std::setw(12) << "Sample Size";
    for (const auto& s : sigma_labels) out << " | " << std::setw(12) << s;
    out << '\n';
    for (const auto& size : size_keys) {
      out << std::left << std::setw(12) << size;
      for (const auto& s : sigma_keys) {
        std::string value = "-";
        for (const auto& c : cells) {
          if (cell_size(c) != size || cell_sigma(c) != s) continue;
          const double pct = t == 0 ? c.percent_significant(config.alpha)
                                    : c.percent_pair_significant(t - 1, config.alpha);
          value = c.error.empty() ? percent_text(pct) : "error";
        }
        out << " | " << std::setw(12) << value;
      }
      out << '\n';
    }
  }
  return out.str();
}

void ScenarioReport::write(const std::filesystem::path& dir) const {
  std::filesystem::create_directories(dir);
  csv::write_text(dir / "summary.csv", summary_csv());
  csv::write_text(dir / "pvalues.csv", pvalues_csv());
  csv::write_text(dir / "tables.txt", text_tables());
  std::string echo = "# r_max used: " + csv::format_real(r_max) + "\n" + config.source_text;
  csv::write_text(dir / "config.ini", echo);
}

}  // namespace persist
