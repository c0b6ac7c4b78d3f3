#include "ravenx/rules.hpp"

#include <algorithm>
#include <limits>
#include <numeric>
#include <set>
#include <string>

#include "ravenx/errors.hpp"

namespace ravenx {

namespace {

constexpr std::array<std::string_view, kRuleCount> kNames = {
    "constant",    "arith_plus",  "arith_minus", "prog_plus1",  "prog_minus1",
    "prog_plus2",  "prog_minus2", "dist_left",   "dist_right",
};

constexpr std::uint64_t kSaturated = std::numeric_limits<std::uint64_t>::max();

std::uint64_t sat_mul(std::uint64_t a, std::uint64_t b) {
  if (a != 0 && b > kSaturated / a) return kSaturated;
  return a * b;
}

// C(n, k) with saturation.
std::uint64_t binomial(std::int64_t n, std::int64_t k) {
  if (k < 0 || n < 0 || k > n) return 0;
  k = std::min(k, n - k);
  // Multiplicative formula stays exact while it fits: each prefix is itself a
  // binomial coefficient.
  unsigned __int128 acc = 1;
  for (std::int64_t i = 1; i <= k; ++i) {
    acc = acc * static_cast<unsigned __int128>(n - k + i) / static_cast<unsigned __int128>(i);
    if (acc > kSaturated) return kSaturated;
  }
  return static_cast<std::uint64_t>(acc);
}

bool within_row_rule(RuleKind k) { return !is_distribute(k); }

}  // namespace

std::string_view rule_name(RuleKind kind) { return kNames[rule_index(kind)]; }

RuleKind rule_from_name(std::string_view name) {
  for (std::size_t i = 0; i < kRuleCount; ++i) {
    if (kNames[i] == name) return kAllRules[i];
  }
  throw SchemaError("rules: unknown rule kind '" + std::string(name) + "'");
}

bool row_satisfies(RuleKind kind, std::span<const int> row) {
  const auto g = row.size();
  if (g < 3) return false;
  switch (kind) {
    case RuleKind::Constant:
      return std::all_of(row.begin(), row.end(), [&](int v) { return v == row[0]; });
    case RuleKind::ArithPlus: {
      long sum = 0;
      for (std::size_t i = 0; i + 1 < g; ++i) {
        if (row[i] < 1) return false;
        sum += row[i];
      }
      return sum == row[g - 1];
    }
    case RuleKind::ArithMinus: {
      long sub = 0;
      for (std::size_t i = 1; i + 1 < g; ++i) {
        if (row[i] < 1) return false;
        sub += row[i];
      }
      return row[0] - sub == row[g - 1];
    }
    case RuleKind::ProgPlus1:
    case RuleKind::ProgMinus1:
    case RuleKind::ProgPlus2:
    case RuleKind::ProgMinus2: {
      const int step = progression_step(kind);
      for (std::size_t i = 1; i < g; ++i) {
        if (row[i] - row[i - 1] != step) return false;
      }
      return true;
    }
    case RuleKind::DistShiftLeft:
    case RuleKind::DistShiftRight:
      return false;
  }
  return false;
}

bool grid_satisfies(RuleKind kind, const IntGrid& grid) {
  if (within_row_rule(kind)) {
    return std::all_of(grid.begin(), grid.end(),
                       [&](const IntRow& row) { return row_satisfies(kind, row); });
  }
  const auto g = grid[0].size();
  if (g < 2 || grid[1].size() != g || grid[2].size() != g) return false;
  std::set<int> distinct(grid[0].begin(), grid[0].end());
  if (distinct.size() != g) return false;
  const int cols = static_cast<int>(g);
  for (std::size_t r = 0; r + 1 < 3; ++r) {
    for (int c = 0; c < cols; ++c) {
      const auto target = static_cast<std::size_t>(distribute_target(kind, c, cols));
      if (grid[r + 1][target] != grid[r][static_cast<std::size_t>(c)]) return false;
    }
  }
  return true;
}

std::vector<RuleKind> holding_rules(const IntGrid& grid) {
  std::vector<RuleKind> out;
  for (RuleKind k : kAllRules) {
    if (grid_satisfies(k, grid)) out.push_back(k);
  }
  return out;
}

std::uint64_t count_valid_rows(RuleKind kind, int cols, int range) {
  if (cols < 3 || range < 1) return 0;
  const std::int64_t g = cols;
  const std::int64_t m = range;
  switch (kind) {
    case RuleKind::Constant:
      return static_cast<std::uint64_t>(m);
    case RuleKind::ArithPlus:
      // Compositions of a total T in [g-1, m-1] into g-1 positive parts;
      // summing C(T-1, g-2) over T telescopes to C(m-1, g-1).
      return binomial(m - 1, g - 1);
    case RuleKind::ArithMinus:
      // First operand a in [0, m-1] and g-2 positive parts summing to at
      // most a: sum_a C(a, g-2) = C(m, g-1).
      return binomial(m, g - 1);
    case RuleKind::ProgPlus1:
    case RuleKind::ProgMinus1:
    case RuleKind::ProgPlus2:
    case RuleKind::ProgMinus2: {
      const std::int64_t span = std::abs(progression_step(kind)) * (g - 1);
      return m > span ? static_cast<std::uint64_t>(m - span) : 0;
    }
    case RuleKind::DistShiftLeft:
    case RuleKind::DistShiftRight: {
      if (m < g) return 0;
      std::uint64_t acc = 1;
      for (std::int64_t i = 0; i < g; ++i) acc = sat_mul(acc, static_cast<std::uint64_t>(m - i));
      return acc;
    }
  }
  return 0;
}

bool is_feasible(RuleKind kind, int cols, int range) {
  return count_valid_rows(kind, cols, range) >= 2;
}

}  // namespace ravenx
