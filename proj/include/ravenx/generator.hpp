#pragma once

#include <array>
#include <cstdint>
#include <functional>
#include <vector>

#include "ravenx/puzzle.hpp"
#include "ravenx/rng.hpp"
#include "ravenx/rules.hpp"

namespace ravenx {

/// Dataset generation parameters. `rule_weights` are relative sampling
/// weights indexed by RuleKind; rules infeasible for (grid_cols, range_m)
/// are masked out.
struct GenConfig {
  int grid_cols = 3;
  int range_m = 10;
  int n_puzzles = 1;
  std::uint64_t seed = 0;
  std::array<double, kRuleCount> rule_weights = {1, 1, 1, 1, 1, 1, 1, 1, 1};

  /// Throws ConfigError when the configuration is unusable.
  void validate() const;
};

/// Maximum resampling attempts for rows, grids and alternatives.
inline constexpr int kMaxGenerationAttempts = 1000;

/// One rule per true attribute, drawn independently from the feasible,
/// positively weighted rules.
std::array<RuleKind, kTrueAttributes> sample_rules(const GenConfig& cfg, Rng& rng);

/// One row obeying a within-row rule, or the first row (g distinct values)
/// of a distribute rule.
IntRow generate_row(RuleKind rule, int cols, int range, Rng& rng);

/// Full 3-row integer grid for one attribute. Resampled until the rule is the
/// only one of the nine that holds on it.
IntGrid generate_grid(RuleKind rule, int cols, int range, Rng& rng);

/// Values that fail every rule when placed in the last cell, excluding the
/// correct value itself.
std::vector<int> rule_breaking_alternatives(const IntGrid& grid, int range);

struct CandidateSet {
  /// Eight tuples of true-attribute values.
  std::array<std::array<int, kTrueAttributes>, kCandidates> values{};
  int answer_index = 0;
};

/// Candidate set {correct, alternative}^3 in random order. Each alternative
/// is drawn uniformly from rule_breaking_alternatives.
CandidateSet build_candidates(const std::array<IntGrid, kTrueAttributes>& grids, int range,
                              Rng& rng);

/// Puzzle `index` of the dataset described by cfg. Every puzzle has its own
/// derived seed, so puzzles can be produced in any order or in parallel.
Puzzle generate_puzzle(const GenConfig& cfg, int index);

std::vector<Puzzle> generate_dataset(const GenConfig& cfg);

/// Streams puzzles to `sink` in index order.
void generate_dataset(const GenConfig& cfg, const std::function<void(Puzzle&&)>& sink);

}  // namespace ravenx
