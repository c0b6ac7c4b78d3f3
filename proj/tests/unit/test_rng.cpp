#include <doctest.h>

#include <array>
#include <cmath>
#include <set>
#include <vector>

#include "oracle.hpp"
#include "ravenx/rng.hpp"

using ravenx::Rng;

TEST_CASE("same seed, same stream") {
  Rng a(42), b(42), c(43);
  bool differs = false;
  for (int i = 0; i < 100; ++i) {
    const auto x = a.next_u64();
    CHECK(x == b.next_u64());
    differs |= x != c.next_u64();
  }
  CHECK(differs);
}

TEST_CASE("derive_seed separates streams") {
  std::set<std::uint64_t> seen;
  for (std::uint64_t base : {0ULL, 1ULL, 123456789ULL})
    for (std::uint64_t s = 0; s < 1000; ++s) seen.insert(ravenx::derive_seed(base, s));
  CHECK(seen.size() == 3000);
  CHECK(ravenx::derive_seed(5, 9) == ravenx::derive_seed(5, 9));
}

TEST_CASE("uniform_int stays in range and is flat") {
  Rng rng(7);
  constexpr int kBins = 7;
  constexpr int kDraws = 70000;
  std::array<int, kBins> counts{};
  for (int i = 0; i < kDraws; ++i) {
    const auto v = rng.uniform_int(-3, 3);
    REQUIRE(v >= -3);
    REQUIRE(v <= 3);
    ++counts[static_cast<std::size_t>(v + 3)];
  }
  double chi2 = 0.0;
  const double expected = static_cast<double>(kDraws) / kBins;
  for (int c : counts) chi2 += (c - expected) * (c - expected) / expected;
  // 6 dof, p = 0.001 critical value
  CHECK(chi2 < 22.46);
  CHECK(rng.uniform_int(5, 5) == 5);
}

TEST_CASE("uniform01 moments") {
  Rng rng(11);
  constexpr int n = 100000;
  double sum = 0.0, sq = 0.0;
  for (int i = 0; i < n; ++i) {
    const double u = rng.uniform01();
    REQUIRE(u >= 0.0);
    REQUIRE(u < 1.0);
    sum += u;
    sq += u * u;
  }
  const double mean = sum / n;
  CHECK(std::abs(mean - 0.5) < 3 * std::sqrt(1.0 / 12.0 / n));
  CHECK(std::abs(sq / n - 1.0 / 3.0) < 0.005);
}

TEST_CASE("categorical follows weights") {
  Rng rng(3);
  const std::vector<double> w = {1.0, 0.0, 3.0};
  std::array<int, 3> counts{};
  constexpr int n = 40000;
  for (int i = 0; i < n; ++i) ++counts[rng.categorical(w)];
  CHECK(counts[1] == 0);
  const double p = counts[2] / static_cast<double>(n);
  CHECK(std::abs(p - 0.75) < 3 * oracle::binomial_sigma(0.75, n));
}

TEST_CASE("shuffle is a uniform permutation") {
  Rng rng(19);
  std::map<std::array<int, 3>, int> counts;
  constexpr int n = 60000;
  for (int i = 0; i < n; ++i) {
    std::array<int, 3> a = {0, 1, 2};
    rng.shuffle(std::span<int>(a));
    ++counts[a];
  }
  CHECK(counts.size() == 6);
  double chi2 = 0.0;
  for (auto& [perm, c] : counts) chi2 += (c - n / 6.0) * (c - n / 6.0) / (n / 6.0);
  CHECK(chi2 < 20.52);  // 5 dof, p = 0.001
}
