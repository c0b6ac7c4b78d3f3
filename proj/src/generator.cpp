#include "ravenx/generator.hpp"

#include <algorithm>
#include <set>
#include <string>

#include "ravenx/errors.hpp"

namespace ravenx {

namespace {

// n positive parts summing to total, uniform over compositions: n-1 distinct
// cut points in [1, total-1] chosen with Floyd's algorithm.
std::vector<int> random_composition(int total, int parts, Rng& rng) {
  std::vector<int> out;
  if (parts == 1) {
    out.push_back(total);
    return out;
  }
  std::set<int> cuts;
  const int slots = total - 1;
  for (int j = slots - (parts - 1) + 1; j <= slots; ++j) {
    const int t = static_cast<int>(rng.uniform_int(1, j));
    if (!cuts.insert(t).second) cuts.insert(j);
  }
  int prev = 0;
  for (int c : cuts) {
    out.push_back(c - prev);
    prev = c;
  }
  out.push_back(total - prev);
  return out;
}

std::vector<int> distinct_values(int count, int range, Rng& rng) {
  // Partial Fisher-Yates keeps the draw order random.
  std::vector<int> pool(static_cast<std::size_t>(range));
  for (int v = 0; v < range; ++v) pool[static_cast<std::size_t>(v)] = v;
  for (int i = 0; i < count; ++i) {
    const auto j = static_cast<std::size_t>(rng.uniform_int(i, range - 1));
    std::swap(pool[static_cast<std::size_t>(i)], pool[j]);
  }
  pool.resize(static_cast<std::size_t>(count));
  return pool;
}

}  // namespace

void GenConfig::validate() const {
  if (grid_cols != 3 && grid_cols != 10) throw ConfigError("grid must be 3x3 or 3x10");
  if (range_m != 10 && range_m != 100 && range_m != 1000) {
    throw ConfigError("range must be 10, 100 or 1000");
  }
  if (n_puzzles < 1) throw ConfigError("n_puzzles must be >= 1");
  bool any_positive = false;
  for (double w : rule_weights) {
    if (!(w >= 0.0)) throw ConfigError("rule weights must be non-negative");
    any_positive = any_positive || w > 0.0;
  }
  if (!any_positive) throw ConfigError("at least one rule weight must be positive");
}

std::array<RuleKind, kTrueAttributes> sample_rules(const GenConfig& cfg, Rng& rng) {
  std::array<double, kRuleCount> weights{};
  bool any = false;
  for (RuleKind k : kAllRules) {
    const auto i = rule_index(k);
    weights[i] = is_feasible(k, cfg.grid_cols, cfg.range_m) ? cfg.rule_weights[i] : 0.0;
    any = any || weights[i] > 0.0;
  }
  if (!any) {
    throw ConfigError("no feasible rule has positive weight for a 3x" +
                      std::to_string(cfg.grid_cols) + " grid with range " +
                      std::to_string(cfg.range_m));
  }
  std::array<RuleKind, kTrueAttributes> out{};
  for (auto& r : out) r = kAllRules[rng.categorical(weights)];
  return out;
}

IntRow generate_row(RuleKind rule, int cols, int range, Rng& rng) {
  if (!is_feasible(rule, cols, range)) {
    throw FeasibilityError("rule " + std::string(rule_name(rule)) + " is infeasible for 3x" +
                           std::to_string(cols) + " with range " + std::to_string(range));
  }
  const int g = cols;
  IntRow row;
  switch (rule) {
    case RuleKind::Constant:
      row.assign(static_cast<std::size_t>(g), static_cast<int>(rng.uniform_int(0, range - 1)));
      break;
    case RuleKind::ArithPlus: {
      const int total = static_cast<int>(rng.uniform_int(g - 1, range - 1));
      row = random_composition(total, g - 1, rng);
      row.push_back(total);
      break;
    }
    case RuleKind::ArithMinus: {
      const int parts = g - 2;
      const int first = static_cast<int>(rng.uniform_int(parts, range - 1));
      const int subtracted = static_cast<int>(rng.uniform_int(parts, first));
      row.push_back(first);
      for (int v : random_composition(subtracted, parts, rng)) row.push_back(v);
      row.push_back(first - subtracted);
      break;
    }
    case RuleKind::ProgPlus1:
    case RuleKind::ProgMinus1:
    case RuleKind::ProgPlus2:
    case RuleKind::ProgMinus2: {
      const int step = progression_step(rule);
      const int span = std::abs(step) * (g - 1);
      const int start = step > 0 ? static_cast<int>(rng.uniform_int(0, range - 1 - span))
                                 : static_cast<int>(rng.uniform_int(span, range - 1));
      for (int i = 0; i < g; ++i) row.push_back(start + step * i);
      break;
    }
    case RuleKind::DistShiftLeft:
    case RuleKind::DistShiftRight:
      row = distinct_values(g, range, rng);
      break;
  }
  return row;
}

IntGrid generate_grid(RuleKind rule, int cols, int range, Rng& rng) {
  for (int attempt = 0; attempt < kMaxGenerationAttempts; ++attempt) {
    IntGrid grid;
    if (is_distribute(rule)) {
      grid[0] = generate_row(rule, cols, range, rng);
      for (std::size_t r = 1; r < kRows; ++r) {
        grid[r].assign(static_cast<std::size_t>(cols), 0);
        for (int c = 0; c < cols; ++c) {
          grid[r][static_cast<std::size_t>(distribute_target(rule, c, cols))] =
              grid[r - 1][static_cast<std::size_t>(c)];
        }
      }
    } else {
      for (auto& row : grid) row = generate_row(rule, cols, range, rng);
    }
    const auto holding = holding_rules(grid);
    if (holding.size() == 1 && holding.front() == rule) return grid;
  }
  throw FeasibilityError("could not sample an unambiguous grid for rule " +
                         std::string(rule_name(rule)));
}

std::vector<int> rule_breaking_alternatives(const IntGrid& grid, int range) {
  IntGrid probe = grid;
  auto& last = probe[kRows - 1].back();
  const int correct = last;
  std::vector<int> out;
  for (int v = 0; v < range; ++v) {
    if (v == correct) continue;
    last = v;
    if (holding_rules(probe).empty()) out.push_back(v);
  }
  return out;
}

CandidateSet build_candidates(const std::array<IntGrid, kTrueAttributes>& grids, int range,
                              Rng& rng) {
  std::array<int, kTrueAttributes> correct{};
  std::array<int, kTrueAttributes> alternative{};
  for (std::size_t a = 0; a < kTrueAttributes; ++a) {
    correct[a] = grids[a][kRows - 1].back();
    const auto pool = rule_breaking_alternatives(grids[a], range);
    if (pool.empty()) {
      throw FeasibilityError("no rule-breaking alternative value for attribute " +
                             std::to_string(a));
    }
    alternative[a] = pool[static_cast<std::size_t>(
        rng.uniform_int(0, static_cast<std::int64_t>(pool.size()) - 1))];
  }
  // Bit a of the mask selects the alternative value for attribute a; a random
  // permutation of all eight masks places the answer (mask 0) uniformly.
  std::array<int, kCandidates> masks{};
  for (int i = 0; i < kCandidates; ++i) masks[static_cast<std::size_t>(i)] = i;
  rng.shuffle(std::span<int>(masks));
  CandidateSet out;
  for (std::size_t i = 0; i < kCandidates; ++i) {
    for (std::size_t a = 0; a < kTrueAttributes; ++a) {
      out.values[i][a] = (masks[i] >> a) & 1 ? alternative[a] : correct[a];
    }
    if (masks[i] == 0) out.answer_index = static_cast<int>(i);
  }
  return out;
}

Puzzle generate_puzzle(const GenConfig& cfg, int index) {
  cfg.validate();
  const std::uint64_t seed = derive_seed(cfg.seed, static_cast<std::uint64_t>(index));
  Rng rng(seed);
  const int g = cfg.grid_cols;
  const int m = cfg.range_m;

  Puzzle p;
  p.puzzle_id = "g" + std::to_string(g) + "-m" + std::to_string(m) + "-s" +
                std::to_string(cfg.seed) + "-" + std::to_string(index);
  p.seed = seed;
  p.grid_cols = g;
  p.range_m = m;
  p.rules = sample_rules(cfg, rng);

  std::array<IntGrid, kTrueAttributes> grids;
  for (std::size_t a = 0; a < kTrueAttributes; ++a) grids[a] = generate_grid(p.rules[a], g, m, rng);
  const auto cands = build_candidates(grids, m, rng);
  p.answer_index = cands.answer_index;

  p.context.reserve(static_cast<std::size_t>(kRows * g - 1));
  for (int r = 0; r < kRows; ++r) {
    for (int c = 0; c < g; ++c) {
      if (r == kRows - 1 && c == g - 1) break;
      Panel panel;
      for (std::size_t a = 0; a < kTrueAttributes; ++a) {
        panel.true_attrs.push_back(SparsePmf::degenerate(
            grids[a][static_cast<std::size_t>(r)][static_cast<std::size_t>(c)], m));
      }
      p.context.push_back(std::move(panel));
    }
  }
  for (const auto& tuple : cands.values) {
    Panel panel;
    for (int v : tuple) panel.true_attrs.push_back(SparsePmf::degenerate(v, m));
    p.candidates.push_back(std::move(panel));
  }
  return p;
}

std::vector<Puzzle> generate_dataset(const GenConfig& cfg) {
  std::vector<Puzzle> out;
  out.reserve(static_cast<std::size_t>(std::max(cfg.n_puzzles, 0)));
  generate_dataset(cfg, [&](Puzzle&& p) { out.push_back(std::move(p)); });
  return out;
}

void generate_dataset(const GenConfig& cfg, const std::function<void(Puzzle&&)>& sink) {
  cfg.validate();
  for (int i = 0; i < cfg.n_puzzles; ++i) sink(generate_puzzle(cfg, i));
}

}  // namespace ravenx
