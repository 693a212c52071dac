#pragma once

#include <cstddef>
#include <cstdint>
#include <string>
#include <vector>

#include "persist/rng.hpp"
#include "persist/vr_filtration.hpp"

namespace persist {

enum class SpaceKind { circle, wedge, chorded_circle };

// One of the synthetic test spaces: a circle, a wedge of externally tangent
// circles laid out along the x axis, or the unit circle with horizontal chords.
struct SpaceSpec {
  SpaceKind kind = SpaceKind::circle;
  std::vector<double> radii{1.0};  // circle: one radius; wedge: >= 2 component radii
  int chords = 0;                  // chorded_circle: 1 or 2
  std::vector<double> chord_heights;  // empty: y = 0 for one chord, y = +-1/2 for two
  double noise_sigma = 0.0;
  std::string label;

  void validate() const;
  // Chord heights actually used.
  std::vector<double> heights() const;
  // Diameter of the noiseless space.
  double diameter() const;
};

struct TrialPlan {
  std::vector<SpaceSpec> specs;
  std::size_t clouds_per_group = 20;
  std::vector<std::size_t> points_per_cloud;  // one entry per spec
  std::uint64_t seed = 0;

  void validate() const;
};

// Angle ~ U(0, 2pi), point (r cos, r sin), then N(0, sigma) on each coordinate.
PointCloud sample_circle(double radius, std::size_t n, double sigma, Rng& rng);

// Component k is centred at x = 2 (r_0 + ... + r_{k-1}) + r_k - r_0 on the x
// axis, so neighbours touch at one point. n is split evenly, remainder going
// to the first components.
PointCloud sample_wedge(const std::vector<double>& radii, std::size_t n, double sigma, Rng& rng);

// Unit circle plus horizontal chords; each point picks a component with
// probability proportional to its length and is uniform along it.
PointCloud sample_chorded_circle(const std::vector<double>& heights, std::size_t n, double sigma, Rng& rng);
PointCloud sample_chorded_circle(int chords, std::size_t n, double sigma, Rng& rng);

PointCloud sample_space(const SpaceSpec& spec, std::size_t n, Rng& rng);

// Clouds of one trial: clouds[group][cloud], each from the substream
// (plan.seed, stream, group, cloud).
std::vector<std::vector<PointCloud>> sample_trial(const TrialPlan& plan, std::uint64_t stream);

SpaceKind parse_space_kind(const std::string& text);
const char* to_string(SpaceKind kind);

}  // namespace persist
