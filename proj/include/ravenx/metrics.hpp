#pragma once

#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "ravenx/puzzle.hpp"

namespace ravenx {

/// Fraction of records whose chosen candidate is the answer.
double task_accuracy(std::span<const EvalRecord> records);

/// Over every (puzzle, attribute) governed by an arithmetic rule: fraction
/// where the chosen candidate's value equals the answer's value. nullopt when
/// no arithmetic attribute exists.
std::optional<double> arithmetic_accuracy(std::span<const EvalRecord> records,
                                          std::span<const Puzzle> puzzles);

struct RunReport {
  int grid_cols = 0;
  int range_m = 0;
  int n_confounders = 0;
  Smoothing smoothing;
  double snr_db = 0.0;
  int n_puzzles = 0;
  double task_accuracy = 0.0;
  std::optional<double> arithmetic_accuracy;
  double mean_output_tokens = 0.0;
  double mean_solve_time_ms = 0.0;
  int parse_failures = 0;
};

/// One report per distinct (grid, range, confounders, smoothing) setting,
/// ordered by that key. Throws IdMismatchError for records whose puzzle_id
/// is absent from `puzzles`.
std::vector<RunReport> build_reports(std::span<const EvalRecord> records,
                                     std::span<const Puzzle> puzzles);

enum class ReportFormat { Json, Markdown };

ReportFormat report_format_from_name(std::string_view name);

std::string emit_report(std::span<const EvalRecord> records, std::span<const Puzzle> puzzles,
                        ReportFormat format);

}  // namespace ravenx
