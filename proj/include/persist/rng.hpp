#pragma once

#include <cstdint>
#include <initializer_list>
#include <random>
#include <span>
#include <vector>

namespace persist {

// Seeded random stream. A stream is identified by a list of 64-bit keys
// (master seed, trial index, group, ...); two streams with different keys
// are independent and the same keys always reproduce the same stream.
//
// Only the raw engine output is used; bounded integers, uniforms and normals
// are derived here so results do not depend on the standard library's
// distribution implementations.
class Rng {
 public:
  explicit Rng(std::initializer_list<std::uint64_t> keys);
  explicit Rng(std::span<const std::uint64_t> keys);

  std::uint64_t next() { return engine_(); }

  // Uniform on [0, 1) with 53 random bits.
  double uniform();

  // Uniform on {0, ..., bound - 1}; bound must be positive.
  std::uint64_t below(std::uint64_t bound);

  // Standard normal via Box-Muller; the second value of each pair is cached.
  double normal();

  template <typename T>
  void shuffle(std::vector<T>& items) {
    for (std::size_t i = items.size(); i > 1; --i) {
      const std::size_t j = static_cast<std::size_t>(below(i));
      std::swap(items[i - 1], items[j]);
    }
  }

 private:
  std::mt19937_64 engine_;
  double spare_normal_ = 0.0;
  bool has_spare_ = false;
};

// Derives a single 64-bit seed from a key list (first output of that stream).
std::uint64_t derive_seed(std::initializer_list<std::uint64_t> keys);

}  // namespace persist
