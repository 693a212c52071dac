#include <algorithm>
#include <cmath>
#include <filesystem>
#include <set>

#include "doctest.h"
#include "oracles.hpp"
#include "persist/csv.hpp"
#include "persist/errors.hpp"
#include "persist/persistence.hpp"

using namespace persist;

namespace {

PointCloud unit_square() { return PointCloud(2, {0, 0, 1, 0, 1, 1, 0, 1}); }

std::vector<Index> symmetric_difference(const std::vector<Index>& a, const std::vector<Index>& b) {
  std::vector<Index> out;
  std::set_symmetric_difference(a.begin(), a.end(), b.begin(), b.end(), std::back_inserter(out));
  return out;
}

}  // namespace

TEST_CASE("five-point boundary matrices and Betti numbers") {
  const auto fc = complex_at(build_filtration(oracle::five_point_cloud(), 2, 6.0), 4.0);
  const auto bm = boundary_matrix(fc);
  std::vector<std::vector<Index>> d1;
  std::vector<std::vector<Index>> d2;
  for (std::size_t j = 0; j < bm.size(); ++j) {
    if (bm.dims[j] == 1) d1.push_back(bm.columns[j]);
    if (bm.dims[j] == 2) d2.push_back(bm.columns[j]);
  }
  REQUIRE(d1.size() == 6);
  REQUIRE(d2.size() == 1);
  CHECK(z2_rank(d1, bm.size()) == 4);
  CHECK(d1.size() - z2_rank(d1, bm.size()) == 2);
  CHECK(z2_rank(d2, bm.size()) == 1);
  CHECK(betti_at(fc, 4.0, 0) == 1);
  CHECK(betti_at(fc, 4.0, 1) == 1);
}

TEST_CASE("five-point diagrams") {
  const auto fc = build_filtration(oracle::five_point_cloud(), 2, 6.0);
  const auto ds = diagrams(fc, 1);
  REQUIRE(ds.size() == 2);
  REQUIRE(ds[1].points.size() == 1);
  CHECK(ds[1].points[0].birth == 4.0);
  CHECK(ds[1].points[0].death == doctest::Approx(4.9).epsilon(0.001));
  const auto& h0 = ds[0].points;
  REQUIRE(h0.size() == 5);
  CHECK(std::count_if(h0.begin(), h0.end(), [](const auto& p) { return std::abs(p.death - 2.236) < 1e-3; }) == 2);
  CHECK(std::count_if(h0.begin(), h0.end(), [](const auto& p) { return std::abs(p.death - 3.54) < 5e-3; }) == 1);
  CHECK(std::count_if(h0.begin(), h0.end(), [](const auto& p) { return p.essential && p.death == 6.0; }) == 1);
  CHECK(betti_at(fc, 4.9, 1) == 0);
}

TEST_CASE("boundary of a boundary is empty") {
  Rng rng{17};
  for (int t = 0; t < 20; ++t) {
    const auto fc = build_filtration(oracle::random_cloud(rng, 7), 3, 2.5);
    const auto bm = boundary_matrix(fc);
    for (std::size_t j = 0; j < bm.size(); ++j) {
      CHECK(bm.columns[j].size() == (bm.dims[j] == 0 ? 0U : static_cast<std::size_t>(bm.dims[j] + 1)));
      std::vector<Index> acc;
      for (Index f : bm.columns[j]) {
        CHECK(f < j);
        acc = symmetric_difference(acc, bm.columns[f]);
      }
      CHECK(acc.empty());
    }
  }
}

TEST_CASE("corrupt complexes are detected") {
  auto fc = build_filtration(unit_square(), 2, 2.0);
  fc.simplices.erase(fc.simplices.begin() + 4);
  CHECK_THROWS_AS(boundary_matrix(fc), ConsistencyError);
}

TEST_CASE("unit square pairing and diagrams") {
  const auto fc = build_filtration(unit_square(), 2, 2.0);
  const auto red = reduce(boundary_matrix(fc));
  int h1_pairs = 0;
  for (const auto& [b, d] : red.pairs) {
    if (fc.simplices[b].dim() != 1) continue;
    if (fc.simplices[b].filtration == fc.simplices[d].filtration) continue;
    ++h1_pairs;
    CHECK(fc.simplices[b].filtration == 1.0);
    CHECK(fc.simplices[d].filtration == std::sqrt(2.0));
  }
  CHECK(h1_pairs == 1);
  const auto ds = diagrams(fc, 1);
  REQUIRE(ds[1].points.size() == 1);
  CHECK(ds[1].points[0].birth == 1.0);
  CHECK(ds[1].points[0].death == std::sqrt(2.0));
  REQUIRE(ds[0].points.size() == 4);
  CHECK(ds[0].points[3].essential);
  CHECK(ds[0].points[3].death == 2.0);
  for (int i = 0; i < 3; ++i) CHECK(ds[0].points[i].death == 1.0);
}

TEST_CASE("an already reduced matrix is a fixed point") {
  BoundaryMatrix bm;
  bm.columns = {{}, {}, {}, {0, 1}, {1, 2}};
  bm.dims = {0, 0, 0, 1, 1};
  const auto red = reduce(bm);
  CHECK(red.reduced == bm.columns);
  CHECK(red.pairs.size() == 2);
  CHECK(red.unpaired == std::vector<Index>{0});
}

TEST_CASE("single point and too-large homology dimension") {
  const auto fc = build_filtration(PointCloud(2, {1, 1}), 1, 3.0);
  const auto ds = diagrams(fc, 0);
  REQUIRE(ds[0].points.size() == 1);
  CHECK(ds[0].points[0].death == 3.0);
  CHECK(ds[0].points[0].essential);
  CHECK(diagrams(build_filtration(PointCloud(2, {1, 1}), 2, 3.0), 1)[1].points.empty());
  CHECK_THROWS_AS(diagrams(fc, 1), InputError);
  CHECK_THROWS_AS(betti_at(fc, 1.0, -1), InputError);
}

TEST_CASE("H0 agrees with union-find and pairing is total") {
  Rng rng{99};
  for (int t = 0; t < 50; ++t) {
    const auto cloud = oracle::random_cloud(rng, 3 + rng.below(10));
    const double r = 0.5 + 2.5 * rng.uniform();
    const auto fc = build_filtration(cloud, 2, r);
    const auto red = reduce(boundary_matrix(fc));
    std::vector<int> seen(fc.simplices.size(), 0);
    for (const auto& [b, d] : red.pairs) {
      ++seen[b];
      ++seen[d];
    }
    for (Index u : red.unpaired) ++seen[u];
    CHECK(std::all_of(seen.begin(), seen.end(), [](int s) { return s == 1; }));

    const auto uf = oracle::union_find_h0(cloud, r);
    const auto h0 = diagrams(fc, 0)[0];
    std::vector<double> finite;
    std::size_t essential = 0;
    for (const auto& p : h0.points) {
      if (p.essential) {
        ++essential;
      } else {
        finite.push_back(p.death);
      }
    }
    CHECK(essential == uf.components);
    std::sort(finite.begin(), finite.end());
    CHECK(finite == uf.deaths);
    CHECK(betti_at(fc, 0.0, 0) == static_cast<int>(cloud.size()));
  }
}

TEST_CASE("diagrams agree with persistent Betti numbers on a grid") {
  Rng rng{4242};
  for (int t = 0; t < 60; ++t) {
    const auto cloud = oracle::random_cloud(rng, 4 + rng.below(5));
    const double r_max = 3.5;
    const auto fc = build_filtration(cloud, 3, r_max);
    const auto ds = diagrams(fc, 2);
    std::set<double> grid;
    for (const auto& s : fc.simplices) grid.insert(s.filtration);
    grid.insert(r_max);
    for (int p = 0; p <= 2; ++p) {
      for (double b : grid) {
        for (double d : grid) {
          if (d < b) continue;
          int count = 0;
          for (const auto& pt : ds[p].points) {
            if (pt.birth <= b && (pt.essential || pt.death > d)) ++count;
          }
          REQUIRE(count == persistent_betti(fc, b, d, p));
        }
      }
    }
  }
}

TEST_CASE("diagram csv round trip is bit exact") {
  Rng rng{3};
  const auto fc = build_filtration(oracle::random_cloud(rng, 9), 2, 2.0);
  const auto ds = diagrams(fc, 1);
  const auto path = std::filesystem::temp_directory_path() / "persist_diag_rt.csv";
  csv::write_text(path, diagrams_csv(ds));
  const auto back = parse_diagrams_csv(path);
  REQUIRE(back.size() == 2);
  CHECK(back[0].points == ds[0].points);
  CHECK(back[1].points == ds[1].points);
  CHECK(select_dim(ds, 1).dim == 1);
  CHECK(diagrams_csv(ds).rfind("dim,birth,death,essential\n", 0) == 0);
}

TEST_CASE("diagrams are deterministic") {
  Rng a{77};
  Rng b{77};
  const auto fa = build_filtration(oracle::random_cloud(a, 12), 2, 2.0);
  const auto fb = build_filtration(oracle::random_cloud(b, 12), 2, 2.0);
  CHECK(diagrams_csv(diagrams(fa, 1)) == diagrams_csv(diagrams(fb, 1)));
}
