#pragma once

#include <boost/multiprecision/cpp_int.hpp>
#include <cstddef>
#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "json.hpp"
#include "persist/diagram_metric.hpp"
#include "persist/persistence.hpp"

namespace persist {

struct DiagramGroup {
  std::string name;
  std::vector<PersistenceDiagram> diagrams;
};

// s >= 2 named groups of diagrams sharing one homological dimension.
struct GroupedDiagrams {
  std::vector<DiagramGroup> groups;
  int dim = 1;

  std::vector<std::size_t> sizes() const;
  std::size_t total() const;
  // "<group>/<index>" for every diagram, in group order.
  std::vector<std::string> ids() const;
  // Throws InputError unless s >= 2, every group has >= 2 diagrams and all
  // diagrams have homological dimension `dim`.
  void validate() const;
};

// Squared diagram distances between every pair of diagrams, computed once.
class DistanceCache {
 public:
  DistanceCache() = default;
  // Validates shape, symmetry, zero diagonal and nonnegativity.
  DistanceCache(std::vector<std::string> ids, std::vector<double> squared);

  static DistanceCache build(const GroupedDiagrams& gd, const MetricOptions& opts = {});

  std::size_t size() const { return ids_.size(); }
  const std::vector<std::string>& ids() const { return ids_; }
  const std::vector<double>& squared() const { return d2_; }
  double operator()(std::size_t i, std::size_t j) const { return d2_[i * ids_.size() + j]; }

  // Sub-cache over the given positions, in that order.
  DistanceCache restrict_to(std::span<const std::size_t> positions) const;

 private:
  std::vector<std::string> ids_;
  std::vector<double> d2_;
};

// Sum over groups of 1/(2 n_m (n_m - 1)) times the ordered within-group sum of
// squared distances.
double joint_loss(const GroupedDiagrams& gd, const DistanceCache& cache);

// (sum n_m)! / prod n_m!
boost::multiprecision::cpp_int assignment_count(std::span<const std::size_t> sizes);

enum class TestMode { exact, sampled };

struct TestOptions {
  std::uint64_t max_exact = 200'000;
  std::uint64_t n_samples = 100'000;
  std::uint64_t seed = 0;
  bool keep_null = false;
};

struct TestResult {
  double observed_stat = 0.0;
  double p_value = 1.0;
  std::uint64_t replicates = 0;   // assignments evaluated, the observed one included
  std::uint64_t at_or_below = 0;  // numerator of p_value
  TestMode mode = TestMode::exact;
  std::uint64_t seed = 0;
  std::vector<double> null_stats;  // replicate order; filled when keep_null is set

  bool operator==(const TestResult&) const = default;
};

// Permutation test on the joint loss. Enumerates every ordered assignment when
// there are at most max_exact of them, otherwise evaluates the observed
// assignment plus n_samples seeded uniform draws. p counts assignments whose
// joint loss is <= the observed value.
TestResult omnibus_test(const GroupedDiagrams& gd, const DistanceCache& cache, const TestOptions& opts = {});

// omnibus_test restricted to exactly two groups.
TestResult two_group_test(const GroupedDiagrams& gd, const DistanceCache& cache, const TestOptions& opts = {});

struct PairwiseResult {
  std::string first;
  std::string second;
  TestResult result;
};

// Two-group test for every unordered pair of groups (s >= 3), pairs ordered by
// group name. Raw p-values, no multiplicity correction.
std::vector<PairwiseResult> post_hoc(const GroupedDiagrams& gd, const DistanceCache& cache,
                                     const TestOptions& opts = {});

// Two-group slice of gd (groups in the given order) with the matching cache.
std::pair<GroupedDiagrams, DistanceCache> select_groups(const GroupedDiagrams& gd, const DistanceCache& cache,
                                                        std::span<const std::string> names);

const char* to_string(TestMode mode);
nlohmann::ordered_json to_json(const TestResult& r);
nlohmann::ordered_json to_json(const GroupedDiagrams& gd, const TestResult& omnibus,
                               std::span<const PairwiseResult> pairwise, double alpha);
// `replicate,statistic` rows of the retained permutation distribution.
std::string null_distribution_csv(const TestResult& r);

}  // namespace persist
