#pragma once

#include <cstdint>
#include <random>
#include <span>
#include <utility>

namespace ravenx {

/// Mixes a base seed with a stream index (splitmix64 finalizer). Used to give
/// every puzzle its own independent, order-free random stream.
std::uint64_t derive_seed(std::uint64_t base, std::uint64_t stream);

/// Seeded random source with platform-stable distributions.
///
/// std::uniform_int_distribution and friends are implementation-defined, so
/// datasets generated with them would differ between standard libraries. All
/// draws here are built directly on the mt19937_64 bit stream.
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : engine_(seed) {}

  std::uint64_t next_u64() { return engine_(); }

  /// Uniform integer in [lo, hi] (inclusive), unbiased.
  std::int64_t uniform_int(std::int64_t lo, std::int64_t hi);

  /// Uniform real in [0, 1) with 53 random bits.
  double uniform01();

  /// Uniform real in [a, b]; returns a when a == b.
  double uniform(double a, double b) { return a + (b - a) * uniform01(); }

  /// Index drawn proportionally to non-negative weights (at least one > 0).
  std::size_t categorical(std::span<const double> weights);

  template <typename T>
  void shuffle(std::span<T> items) {
    for (std::size_t i = items.size(); i > 1; --i) {
      const auto j = static_cast<std::size_t>(uniform_int(0, static_cast<std::int64_t>(i) - 1));
      std::swap(items[i - 1], items[j]);
    }
  }

 private:
  std::mt19937_64 engine_;
};

}  // namespace ravenx
