#include "persist/permutation.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <numeric>

#include "persist/csv.hpp"
#include "persist/errors.hpp"
#include "persist/rng.hpp"

namespace persist {

std::vector<std::size_t> GroupedDiagrams::sizes() const {
  std::vector<std::size_t> out;
  out.reserve(groups.size());
  for (const auto& g : groups) out.push_back(g.diagrams.size());
  return out;
}

std::size_t GroupedDiagrams::total() const {
  std::size_t n = 0;
  for (const auto& g : groups) n += g.diagrams.size();
  return n;
}

std::vector<std::string> GroupedDiagrams::ids() const {
  std::vector<std::string> out;
  for (const auto& g : groups) {
    for (std::size_t i = 0; i < g.diagrams.size(); ++i) out.push_back(g.name + "/" + std::to_string(i));
  }
  return out;
}

void GroupedDiagrams::validate() const {
  if (groups.size() < 2) throw InputError("at least two groups are required");
  std::vector<std::string> names;
  for (const auto& g : groups) {
    if (g.diagrams.size() < 2) {
      throw InputError("group '" + g.name + "' has " + std::to_string(g.diagrams.size()) +
                       " diagrams; at least 2 are required");
    }
    for (const auto& d : g.diagrams) {
      if (d.dim != dim) throw InputError("group '" + g.name + "' contains a diagram of a different dimension");
    }
    names.push_back(g.name);
  }
  std::sort(names.begin(), names.end());
  if (std::adjacent_find(names.begin(), names.end()) != names.end()) throw InputError("group names must be unique");
}

DistanceCache::DistanceCache(std::vector<std::string> ids, std::vector<double> squared)
    : ids_(std::move(ids)), d2_(std::move(squared)) {
  const std::size_t n = ids_.size();
  if (d2_.size() != n * n) throw InputError("distance cache is not square");
  for (std::size_t i = 0; i < n; ++i) {
    if (d2_[i * n + i] != 0.0) throw InputError("distance cache has a nonzero diagonal");
    for (std::size_t j = 0; j < n; ++j) {
      const double v = d2_[i * n + j];
      if (!std::isfinite(v) || v < 0.0) throw InputError("distance cache entries must be finite and nonnegative");
      if (v != d2_[j * n + i]) throw InputError("distance cache is not symmetric");
    }
  }
}

DistanceCache DistanceCache::build(const GroupedDiagrams& gd, const MetricOptions& opts) {
  std::vector<const PersistenceDiagram*> all;
  for (const auto& g : gd.groups) {
    for (const auto& d : g.diagrams) all.push_back(&d);
  }
  const std::size_t n = all.size();
  std::vector<double> d2(n * n, 0.0);
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = i + 1; j < n; ++j) {
      d2[i * n + j] = d2[j * n + i] = squared_diagram_distance(*all[i], *all[j], opts);
    }
  }
  return DistanceCache(gd.ids(), std::move(d2));
}

DistanceCache DistanceCache::restrict_to(std::span<const std::size_t> positions) const {
  const std::size_t n = ids_.size();
  const std::size_t k = positions.size();
  std::vector<std::string> ids;
  std::vector<double> d2(k * k);
  for (std::size_t a = 0; a < k; ++a) {
    if (positions[a] >= n) throw InputError("distance cache position out of range");
    ids.push_back(ids_[positions[a]]);
    for (std::size_t b = 0; b < k; ++b) d2[a * k + b] = d2_[positions[a] * n + positions[b]];
  }
  return DistanceCache(std::move(ids), std::move(d2));
}

namespace {

constexpr double kTieTolerance = 1e-12;

void check_cache(const GroupedDiagrams& gd, const DistanceCache& cache) {
  gd.validate();
  if (cache.ids() != gd.ids()) throw InputError("distance cache does not match the grouped diagrams");
}

// Joint loss of the assignment that gives group m the pooled indices
// members[offset_m, offset_m + n_m).
double loss_of(const DistanceCache& cache, std::span<const std::size_t> members, std::span<const std::size_t> sizes) {
  double total = 0.0;
  std::size_t offset = 0;
  for (std::size_t n : sizes) {
    double pairs = 0.0;
    for (std::size_t a = offset; a < offset + n; ++a) {
      for (std::size_t b = a + 1; b < offset + n; ++b) pairs += cache(members[a], members[b]);
    }
    const double nd = static_cast<double>(n);
    total += (2.0 * pairs) / (2.0 * nd * (nd - 1.0));
    offset += n;
  }
  return total;
}

bool at_or_below(double stat, double observed) {
  return stat <= observed + kTieTolerance * std::abs(observed);
}

}  // namespace

double joint_loss(const GroupedDiagrams& gd, const DistanceCache& cache) {
  check_cache(gd, cache);
  std::vector<std::size_t> members(gd.total());
  std::iota(members.begin(), members.end(), std::size_t{0});
  const auto sizes = gd.sizes();
  return loss_of(cache, members, sizes);
}

boost::multiprecision::cpp_int assignment_count(std::span<const std::size_t> sizes) {
  if (sizes.empty()) throw InputError("assignment count needs at least one group");
  using boost::multiprecision::cpp_int;
  // Product of binomials C(n_1 + ... + n_k, n_k), each built exactly.
  cpp_int count = 1;
  std::size_t pooled = 0;
  for (std::size_t n : sizes) {
    if (n == 0) throw InputError("group sizes must be positive");
    for (std::size_t i = 1; i <= n; ++i) {
      count *= pooled + i;
      count /= i;
    }
    pooled += n;
  }
  return count;
}

TestResult omnibus_test(const GroupedDiagrams& gd, const DistanceCache& cache, const TestOptions& opts) {
  check_cache(gd, cache);
  const auto sizes = gd.sizes();
  const std::size_t pooled = gd.total();
  std::vector<std::size_t> members(pooled);
  std::iota(members.begin(), members.end(), std::size_t{0});

  TestResult result;
  result.observed_stat = loss_of(cache, members, sizes);
  result.seed = opts.seed;

  const auto count = assignment_count(sizes);
  if (count <= opts.max_exact) {
    result.mode = TestMode::exact;
    // Every distinct label sequence is one ordered assignment; the sorted
    // sequence is the observed one.
    std::vector<std::size_t> labels;
    for (std::size_t m = 0; m < sizes.size(); ++m) labels.insert(labels.end(), sizes[m], m);
    std::vector<std::size_t> offsets(sizes.size());
    do {
      std::exclusive_scan(sizes.begin(), sizes.end(), offsets.begin(), std::size_t{0});
      for (std::size_t i = 0; i < pooled; ++i) members[offsets[labels[i]]++] = i;
      const double stat = loss_of(cache, members, sizes);
      ++result.replicates;
      if (at_or_below(stat, result.observed_stat)) ++result.at_or_below;
      if (opts.keep_null) result.null_stats.push_back(stat);
    } while (std::next_permutation(labels.begin(), labels.end()));
  } else {
    if (opts.n_samples < 1) throw InputError("sampled permutation test needs at least one sample");
    result.mode = TestMode::sampled;
    result.replicates = 1;
    result.at_or_below = 1;
    if (opts.keep_null) result.null_stats.push_back(result.observed_stat);
    for (std::uint64_t r = 1; r <= opts.n_samples; ++r) {
      Rng rng{opts.seed, r};
      std::iota(members.begin(), members.end(), std::size_t{0});
      rng.shuffle(members);
      const double stat = loss_of(cache, members, sizes);
      ++result.replicates;
      if (at_or_below(stat, result.observed_stat)) ++result.at_or_below;
      if (opts.keep_null) result.null_stats.push_back(stat);
    }
  }
  result.p_value = static_cast<double>(result.at_or_below) / static_cast<double>(result.replicates);
  return result;
}

TestResult two_group_test(const GroupedDiagrams& gd, const DistanceCache& cache, const TestOptions& opts) {
  if (gd.groups.size() != 2) throw InputError("the two-group test needs exactly two groups");
  return omnibus_test(gd, cache, opts);
}

std::pair<GroupedDiagrams, DistanceCache> select_groups(const GroupedDiagrams& gd, const DistanceCache& cache,
                                                        std::span<const std::string> names) {
  check_cache(gd, cache);
  GroupedDiagrams sub;
  sub.dim = gd.dim;
  std::vector<std::size_t> positions;
  for (const auto& name : names) {
    std::size_t offset = 0;
    bool found = false;
    for (const auto& g : gd.groups) {
      if (g.name == name) {
        sub.groups.push_back(g);
        for (std::size_t i = 0; i < g.diagrams.size(); ++i) positions.push_back(offset + i);
        found = true;
        break;
      }
      offset += g.diagrams.size();
    }
    if (!found) throw InputError("unknown group '" + name + "'");
  }
  return {std::move(sub), cache.restrict_to(positions)};
}

std::vector<PairwiseResult> post_hoc(const GroupedDiagrams& gd, const DistanceCache& cache, const TestOptions& opts) {
  if (gd.groups.size() < 3) throw InputError("post-hoc tests need at least three groups; use the two-group test");
  check_cache(gd, cache);
  std::vector<std::string> names;
  for (const auto& g : gd.groups) names.push_back(g.name);
  std::sort(names.begin(), names.end());
  std::vector<PairwiseResult> out;
  for (std::size_t a = 0; a < names.size(); ++a) {
    for (std::size_t b = a + 1; b < names.size(); ++b) {
      const std::string pair[] = {names[a], names[b]};
      const auto [sub, sub_cache] = select_groups(gd, cache, pair);
      out.push_back({names[a], names[b], two_group_test(sub, sub_cache, opts)});
    }
  }
  return out;
}

const char* to_string(TestMode mode) { return mode == TestMode::exact ? "exact" : "sampled"; }

nlohmann::ordered_json to_json(const TestResult& r) {
  nlohmann::ordered_json j;
  j["statistic"] = r.observed_stat;
  j["p_value"] = r.p_value;
  j["replicates"] = r.replicates;
  j["at_or_below"] = r.at_or_below;
  j["mode"] = to_string(r.mode);
  j["seed"] = r.seed;
  return j;
}

nlohmann::ordered_json to_json(const GroupedDiagrams& gd, const TestResult& omnibus,
                               std::span<const PairwiseResult> pairwise, double alpha) {
  nlohmann::ordered_json j = to_json(omnibus);
  j["alpha"] = alpha;
  j["significant"] = omnibus.p_value <= alpha;
  nlohmann::ordered_json groups = nlohmann::ordered_json::array();
  for (const auto& g : gd.groups) groups.push_back({{"name", g.name}, {"size", g.diagrams.size()}});
  j["groups"] = groups;
  nlohmann::ordered_json pw = nlohmann::ordered_json::array();
  for (const auto& p : pairwise) {
    nlohmann::ordered_json entry;
    entry["groups"] = {p.first, p.second};
    const auto result = to_json(p.result);
    for (const auto& [k, v] : result.items()) entry[k] = v;
    entry["significant"] = p.result.p_value <= alpha;
    pw.push_back(entry);
  }
  j["pairwise"] = pw;
  return j;
}

std::string null_distribution_csv(const TestResult& r) {
  std::string out = "replicate,statistic\n";
  for (std::size_t i = 0; i < r.null_stats.size(); ++i) {
    out += std::to_string(i) + ',' + csv::format_real(r.null_stats[i]) + '\n';
  }
  return out;
}

}  // namespace persist
