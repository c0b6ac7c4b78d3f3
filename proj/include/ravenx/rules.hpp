#pragma once

#include <array>
#include <cstdint>
#include <span>
#include <string_view>
#include <vector>

namespace ravenx {

/// The nine rule executors. Families: constant, arithmetic (+/-),
/// progression (+1/-1/+2/-2) and distribute (row shifted left/right).
enum class RuleKind : std::uint8_t {
  Constant,
  ArithPlus,
  ArithMinus,
  ProgPlus1,
  ProgMinus1,
  ProgPlus2,
  ProgMinus2,
  DistShiftLeft,
  DistShiftRight,
};

inline constexpr std::size_t kRuleCount = 9;

inline constexpr std::array<RuleKind, kRuleCount> kAllRules = {
    RuleKind::Constant,   RuleKind::ArithPlus,  RuleKind::ArithMinus,
    RuleKind::ProgPlus1,  RuleKind::ProgMinus1, RuleKind::ProgPlus2,
    RuleKind::ProgMinus2, RuleKind::DistShiftLeft, RuleKind::DistShiftRight,
};

constexpr std::size_t rule_index(RuleKind kind) { return static_cast<std::size_t>(kind); }

std::string_view rule_name(RuleKind kind);

/// Inverse of rule_name; throws SchemaError on unknown names.
RuleKind rule_from_name(std::string_view name);

constexpr bool is_arithmetic(RuleKind k) {
  return k == RuleKind::ArithPlus || k == RuleKind::ArithMinus;
}
constexpr bool is_progression(RuleKind k) {
  return k == RuleKind::ProgPlus1 || k == RuleKind::ProgMinus1 || k == RuleKind::ProgPlus2 ||
         k == RuleKind::ProgMinus2;
}
constexpr bool is_distribute(RuleKind k) {
  return k == RuleKind::DistShiftLeft || k == RuleKind::DistShiftRight;
}

/// Per-column step of a progression rule (0 for other kinds).
constexpr int progression_step(RuleKind k) {
  switch (k) {
    case RuleKind::ProgPlus1: return 1;
    case RuleKind::ProgMinus1: return -1;
    case RuleKind::ProgPlus2: return 2;
    case RuleKind::ProgMinus2: return -2;
    default: return 0;
  }
}

/// Column of row r+1 that receives the value at column `col` of row r under a
/// distribute rule. Left shift moves every value one column to the left.
constexpr int distribute_target(RuleKind k, int col, int cols) {
  return k == RuleKind::DistShiftLeft ? (col - 1 + cols) % cols : (col + 1) % cols;
}

/// Row-1 column whose value lands in the last cell of row 3.
constexpr int distribute_source_of_last(RuleKind k, int cols) {
  return k == RuleKind::DistShiftLeft ? 1 % cols : ((cols - 3) % cols + cols) % cols;
}

using IntRow = std::vector<int>;
/// Integer values of one attribute over the three rows of a complete grid.
using IntGrid = std::array<IntRow, 3>;

/// Integer semantics of a within-row rule on one row (values assumed in
/// range). Arithmetic operands must be >= 1: a zero operand would make a row
/// satisfy both arithmetic rules (or collapse onto a constant row).
///   ArithPlus:  v[g-1] = v[0] + ... + v[g-2]
///   ArithMinus: v[g-1] = v[0] - (v[1] + ... + v[g-2])
bool row_satisfies(RuleKind kind, std::span<const int> row);

/// True when the rule holds on the whole 3-row grid. Distribute rules need
/// pairwise-distinct row-1 values and each row to be the previous one shifted.
bool grid_satisfies(RuleKind kind, const IntGrid& grid);

/// All rules that hold on the grid, in RuleKind order.
std::vector<RuleKind> holding_rules(const IntGrid& grid);

/// Number of distinct valid rows (first rows, for distribute rules) a rule
/// admits for `cols` columns over range m; saturates at UINT64_MAX.
std::uint64_t count_valid_rows(RuleKind kind, int cols, int range);

/// A rule is feasible when it admits at least two distinct valid rows, so
/// that rows carry information about the rule.
bool is_feasible(RuleKind kind, int cols, int range);

}  // namespace ravenx
