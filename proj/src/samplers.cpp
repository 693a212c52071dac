#include "persist/samplers.hpp"

#include <cmath>
#include <numbers>
#include <numeric>

#include "persist/errors.hpp"

namespace persist {

namespace {

constexpr double kTwoPi = 2.0 * std::numbers::pi;

void check_sigma(double sigma) {
  if (!(sigma >= 0.0) || !std::isfinite(sigma)) throw InputError("noise sigma must be a nonnegative number");
}

void add_point(PointCloud& cloud, double x, double y, double sigma, Rng& rng) {
  if (sigma > 0.0) {
    x += sigma * rng.normal();
    y += sigma * rng.normal();
  }
  const double p[2] = {x, y};
  cloud.append(p);
}

}  // namespace

void SpaceSpec::validate() const {
  check_sigma(noise_sigma);
  switch (kind) {
    case SpaceKind::circle:
      if (radii.size() != 1 || !(radii[0] > 0.0)) throw InputError("a circle needs exactly one positive radius");
      break;
    case SpaceKind::wedge:
      if (radii.size() < 2) throw InputError("a wedge needs at least two component radii");
      for (double r : radii) {
        if (!(r > 0.0)) throw InputError("wedge radii must be positive");
      }
      break;
    case SpaceKind::chorded_circle:
      if (chords != 1 && chords != 2) throw InputError("a chorded circle has 1 or 2 chords");
      if (!chord_heights.empty() && chord_heights.size() != static_cast<std::size_t>(chords)) {
        throw InputError("chord height count must match the number of chords");
      }
      for (double h : chord_heights) {
        if (!(std::abs(h) < 1.0)) throw InputError("chord heights must lie strictly inside the unit circle");
      }
      break;
  }
}

std::vector<double> SpaceSpec::heights() const {
  if (!chord_heights.empty()) return chord_heights;
  if (chords == 1) return {0.0};
  return {-0.5, 0.5};
}

double SpaceSpec::diameter() const {
  switch (kind) {
    case SpaceKind::circle:
      return 2.0 * radii.at(0);
    case SpaceKind::wedge:
      return 2.0 * std::accumulate(radii.begin(), radii.end(), 0.0);
    case SpaceKind::chorded_circle:
      return 2.0;
  }
  return 0.0;
}

void TrialPlan::validate() const {
  if (specs.empty()) throw InputError("trial plan has no spaces");
  for (const auto& s : specs) s.validate();
  if (clouds_per_group < 2) throw InputError("each group needs at least two clouds");
  if (points_per_cloud.size() != specs.size()) throw InputError("one points-per-cloud entry is needed per space");
  for (std::size_t n : points_per_cloud) {
    if (n == 0) throw InputError("points per cloud must be positive");
  }
}

PointCloud sample_circle(double radius, std::size_t n, double sigma, Rng& rng) {
  if (!(radius > 0.0)) throw InputError("circle radius must be positive");
  if (n == 0) throw InputError("sample size must be positive");
  check_sigma(sigma);
  PointCloud cloud;
  for (std::size_t i = 0; i < n; ++i) {
    const double theta = kTwoPi * rng.uniform();
    add_point(cloud, radius * std::cos(theta), radius * std::sin(theta), sigma, rng);
  }
  return cloud;
}

PointCloud sample_wedge(const std::vector<double>& radii, std::size_t n, double sigma, Rng& rng) {
  if (radii.size() < 2) throw InputError("a wedge needs at least two components");
  if (n < radii.size()) {
    throw InputError("sample size " + std::to_string(n) + " is smaller than the " + std::to_string(radii.size()) +
                     " wedge components");
  }
  check_sigma(sigma);
  PointCloud cloud;
  const std::size_t k = radii.size();
  double centre = 0.0;
  for (std::size_t c = 0; c < k; ++c) {
    if (!(radii[c] > 0.0)) throw InputError("wedge radii must be positive");
    if (c > 0) centre += radii[c - 1] + radii[c];
    const std::size_t count = n / k + (c < n % k ? 1 : 0);
    for (std::size_t i = 0; i < count; ++i) {
      const double theta = kTwoPi * rng.uniform();
      add_point(cloud, centre + radii[c] * std::cos(theta), radii[c] * std::sin(theta), sigma, rng);
    }
  }
  return cloud;
}

PointCloud sample_chorded_circle(const std::vector<double>& heights, std::size_t n, double sigma, Rng& rng) {
  if (n == 0) throw InputError("sample size must be positive");
  check_sigma(sigma);
  std::vector<double> half_widths;
  double total = kTwoPi;
  for (double h : heights) {
    if (!(std::abs(h) < 1.0)) throw InputError("chord heights must lie strictly inside the unit circle");
    half_widths.push_back(std::sqrt(1.0 - h * h));
    total += 2.0 * half_widths.back();
  }
  PointCloud cloud;
  for (std::size_t i = 0; i < n; ++i) {
    double pick = rng.uniform() * total;
    if (pick < kTwoPi) {
      const double theta = kTwoPi * rng.uniform();
      add_point(cloud, std::cos(theta), std::sin(theta), sigma, rng);
      continue;
    }
    pick -= kTwoPi;
    std::size_t c = 0;
    while (c + 1 < heights.size() && pick >= 2.0 * half_widths[c]) {
      pick -= 2.0 * half_widths[c];
      ++c;
    }
    const double x = half_widths[c] * (2.0 * rng.uniform() - 1.0);
    add_point(cloud, x, heights[c], sigma, rng);
  }
  return cloud;
}

PointCloud sample_chorded_circle(int chords, std::size_t n, double sigma, Rng& rng) {
  if (chords != 1 && chords != 2) throw InputError("a chorded circle has 1 or 2 chords");
  SpaceSpec spec;
  spec.kind = SpaceKind::chorded_circle;
  spec.chords = chords;
  return sample_chorded_circle(spec.heights(), n, sigma, rng);
}

PointCloud sample_space(const SpaceSpec& spec, std::size_t n, Rng& rng) {
  spec.validate();
  switch (spec.kind) {
    case SpaceKind::circle:
      return sample_circle(spec.radii[0], n, spec.noise_sigma, rng);
    case SpaceKind::wedge:
      return sample_wedge(spec.radii, n, spec.noise_sigma, rng);
    case SpaceKind::chorded_circle:
      return sample_chorded_circle(spec.heights(), n, spec.noise_sigma, rng);
  }
  throw InputError("unknown space kind");
}

std::vector<std::vector<PointCloud>> sample_trial(const TrialPlan& plan, std::uint64_t stream) {
  plan.validate();
  std::vector<std::vector<PointCloud>> clouds(plan.specs.size());
  for (std::size_t g = 0; g < plan.specs.size(); ++g) {
    for (std::size_t c = 0; c < plan.clouds_per_group; ++c) {
      Rng rng{plan.seed, stream, g, c};
      clouds[g].push_back(sample_space(plan.specs[g], plan.points_per_cloud[g], rng));
    }
  }
  return clouds;
}

SpaceKind parse_space_kind(const std::string& text) {
  if (text == "circle") return SpaceKind::circle;
  if (text == "wedge") return SpaceKind::wedge;
  if (text == "chorded_circle" || text == "chorded" || text == "chords") return SpaceKind::chorded_circle;
  throw InputError("unknown space kind '" + text + "' (expected circle, wedge or chorded_circle)");
}

const char* to_string(SpaceKind kind) {
  switch (kind) {
    case SpaceKind::circle:
      return "circle";
    case SpaceKind::wedge:
      return "wedge";
    case SpaceKind::chorded_circle:
      return "chorded_circle";
  }
  return "?";
}

}  // namespace persist
