#pragma once

#include <array>
#include <cstdint>
#include <string>
#include <string_view>
#include <vector>

#include "ravenx/pmf.hpp"
#include "ravenx/rules.hpp"

namespace ravenx {

inline constexpr int kTrueAttributes = 3;
inline constexpr int kRows = 3;
inline constexpr int kCandidates = 8;

/// One panel: the three reasoning attributes followed by k confounders.
struct Panel {
  std::vector<SparsePmf> true_attrs;
  std::vector<SparsePmf> confounders;

  std::size_t attribute_count() const { return true_attrs.size() + confounders.size(); }

  /// Attribute by position: true attributes first, then confounders.
  const SparsePmf& attribute(std::size_t index) const {
    return index < true_attrs.size() ? true_attrs[index]
                                     : confounders[index - true_attrs.size()];
  }

  friend bool operator==(const Panel&, const Panel&) = default;
};

enum class SmoothingKind : std::uint8_t { None, Bins, Gaussian };

std::string_view smoothing_name(SmoothingKind kind);

/// Smoothing applied to a puzzle. `param` is p_L for Bins, sigma for Gaussian.
struct Smoothing {
  SmoothingKind kind = SmoothingKind::None;
  double param = 0.0;

  friend bool operator==(const Smoothing&, const Smoothing&) = default;
};

/// A 3 x g matrix puzzle with the last context cell missing and eight
/// candidate answers.
struct Puzzle {
  std::string puzzle_id;
  std::uint64_t seed = 0;
  int grid_cols = 3;
  int range_m = 10;
  int n_confounders = 0;
  Smoothing smoothing;
  std::array<RuleKind, kTrueAttributes> rules{};
  int answer_index = 0;
  /// Row-major context cells; 3 * grid_cols - 1 entries.
  std::vector<Panel> context;
  std::vector<Panel> candidates;

  int attribute_count() const { return kTrueAttributes + n_confounders; }

  const Panel& cell(int row, int col) const {
    return context[static_cast<std::size_t>(row * grid_cols + col)];
  }

  /// Modal integer values of one attribute over the context, with the given
  /// candidate placed in the missing cell.
  IntGrid modal_grid(std::size_t attribute, int candidate) const;

  /// True when every PMF of every panel is a single point.
  bool is_clean() const;

  friend bool operator==(const Puzzle&, const Puzzle&) = default;
};

/// One model interaction and its scoring.
struct EvalRecord {
  std::string puzzle_id;
  std::string prompt_text;
  std::string raw_response;
  int parsed_answer = 0;
  bool parse_failed = false;
  long output_tokens = 0;
  std::array<bool, kTrueAttributes> per_attribute_correct{};
  bool task_correct = false;
  /// Wall-clock of the request or solve in milliseconds.
  double elapsed_ms = 0.0;
  /// Transport failure description when the request never succeeded.
  std::string error;

  friend bool operator==(const EvalRecord&, const EvalRecord&) = default;
};

/// Scores a chosen candidate against the puzzle's ground truth.
EvalRecord score_choice(const Puzzle& puzzle, int chosen);

/// Single-line JSON with a fixed key order.
std::string serialize_puzzle(const Puzzle& puzzle);

/// Parses and re-validates a puzzle line. SchemaError names the offending
/// field; InvariantError reports domain violations.
Puzzle deserialize_puzzle(std::string_view line);

/// Returns every violated invariant, including brute-force uniqueness of the
/// correct candidate. Empty means valid.
std::vector<std::string> validate_puzzle(const Puzzle& puzzle);

std::string serialize_record(const EvalRecord& record);
EvalRecord deserialize_record(std::string_view line);

}  // namespace ravenx
