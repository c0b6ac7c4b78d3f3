#include "ravenx/metrics.hpp"

#include <cmath>
#include <cstdio>
#include <map>
#include <tuple>
#include <unordered_map>

#include <nlohmann/json.hpp>

#include "ravenx/errors.hpp"
#include "ravenx/uncertainty.hpp"

namespace ravenx {

namespace {

using PuzzleIndex = std::unordered_map<std::string, const Puzzle*>;

PuzzleIndex index_puzzles(std::span<const Puzzle> puzzles) {
  PuzzleIndex out;
  for (const auto& p : puzzles) out.emplace(p.puzzle_id, &p);
  return out;
}

const Puzzle& lookup(const PuzzleIndex& index, const EvalRecord& record) {
  auto it = index.find(record.puzzle_id);
  if (it == index.end()) {
    throw IdMismatchError("record refers to unknown puzzle '" + record.puzzle_id + "'");
  }
  return *it->second;
}

struct ArithTally {
  long hits = 0;
  long total = 0;
};

void tally_arithmetic(const Puzzle& p, int chosen, ArithTally& tally) {
  const auto& picked = p.candidates[static_cast<std::size_t>(chosen)];
  const auto& truth = p.candidates[static_cast<std::size_t>(p.answer_index)];
  for (std::size_t a = 0; a < kTrueAttributes; ++a) {
    if (!is_arithmetic(p.rules[a])) continue;
    ++tally.total;
    if (picked.true_attrs[a].mode() == truth.true_attrs[a].mode()) ++tally.hits;
  }
}

std::string fixed(double v, int digits) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.*f", digits, v);
  return buf;
}

std::string smoothing_label(const Smoothing& s) {
  switch (s.kind) {
    case SmoothingKind::None: return "none";
    case SmoothingKind::Bins: return "bins p_L=" + fixed(s.param, 2);
    case SmoothingKind::Gaussian: return "gaussian sigma=" + fixed(s.param, 2);
  }
  return "none";
}

}  // namespace

double task_accuracy(std::span<const EvalRecord> records) {
  if (records.empty()) throw EmptyInputError("task_accuracy: no records");
  long hits = 0;
  for (const auto& r : records) hits += r.task_correct ? 1 : 0;
  return static_cast<double>(hits) / static_cast<double>(records.size());
}

std::optional<double> arithmetic_accuracy(std::span<const EvalRecord> records,
                                          std::span<const Puzzle> puzzles) {
  const auto index = index_puzzles(puzzles);
  ArithTally tally;
  for (const auto& r : records) tally_arithmetic(lookup(index, r), r.parsed_answer, tally);
  if (tally.total == 0) return std::nullopt;
  return static_cast<double>(tally.hits) / static_cast<double>(tally.total);
}

ReportFormat report_format_from_name(std::string_view name) {
  if (name == "json") return ReportFormat::Json;
  if (name == "markdown" || name == "md") return ReportFormat::Markdown;
  throw ConfigError("unknown report format '" + std::string(name) + "'");
}

std::vector<RunReport> build_reports(std::span<const EvalRecord> records,
                                     std::span<const Puzzle> puzzles) {
  if (records.empty()) throw EmptyInputError("report: no records");
  const auto index = index_puzzles(puzzles);
  using Key = std::tuple<int, int, int, int, double>;
  std::map<Key, std::vector<const EvalRecord*>> groups;
  std::map<Key, const Puzzle*> exemplar;
  for (const auto& r : records) {
    const auto& p = lookup(index, r);
    Key key{p.grid_cols, p.range_m, p.n_confounders, static_cast<int>(p.smoothing.kind),
            p.smoothing.param};
    groups[key].push_back(&r);
    exemplar.emplace(key, &p);
  }

  std::vector<RunReport> out;
  for (const auto& [key, members] : groups) {
    const Puzzle& ex = *exemplar.at(key);
    RunReport rep;
    rep.grid_cols = ex.grid_cols;
    rep.range_m = ex.range_m;
    rep.n_confounders = ex.n_confounders;
    rep.smoothing = ex.smoothing;
    rep.snr_db = snr_db(ex.n_confounders);
    rep.n_puzzles = static_cast<int>(members.size());
    std::vector<EvalRecord> subset;
    subset.reserve(members.size());
    ArithTally tally;
    double tokens = 0.0;
    double elapsed = 0.0;
    for (const auto* r : members) {
      subset.push_back(*r);
      tally_arithmetic(lookup(index, *r), r->parsed_answer, tally);
      tokens += static_cast<double>(r->output_tokens);
      elapsed += r->elapsed_ms;
      rep.parse_failures += r->parse_failed ? 1 : 0;
    }
    rep.task_accuracy = task_accuracy(subset);
    if (tally.total > 0) {
      rep.arithmetic_accuracy = static_cast<double>(tally.hits) / static_cast<double>(tally.total);
    }
    rep.mean_output_tokens = tokens / static_cast<double>(members.size());
    rep.mean_solve_time_ms = elapsed / static_cast<double>(members.size());
    out.push_back(rep);
  }
  return out;
}

std::string emit_report(std::span<const EvalRecord> records, std::span<const Puzzle> puzzles,
                        ReportFormat format) {
  const auto reports = build_reports(records, puzzles);
  if (format == ReportFormat::Json) {
    nlohmann::ordered_json doc;
    doc["reports"] = nlohmann::ordered_json::array();
    for (const auto& r : reports) {
      nlohmann::ordered_json j;
      j["grid_cols"] = r.grid_cols;
      j["range_m"] = r.range_m;
      j["n_confounders"] = r.n_confounders;
      j["snr_db"] = std::isinf(r.snr_db) ? nlohmann::ordered_json(nullptr)
                                         : nlohmann::ordered_json(r.snr_db);
      j["smoothing"] = {{"kind", smoothing_name(r.smoothing.kind)}, {"param", r.smoothing.param}};
      j["n_puzzles"] = r.n_puzzles;
      j["task_accuracy"] = r.task_accuracy;
      j["arithmetic_accuracy"] = r.arithmetic_accuracy
                                     ? nlohmann::ordered_json(*r.arithmetic_accuracy)
                                     : nlohmann::ordered_json(nullptr);
      j["mean_output_tokens"] = r.mean_output_tokens;
      j["mean_solve_time_ms"] = r.mean_solve_time_ms;
      j["parse_failures"] = r.parse_failures;
      doc["reports"].push_back(std::move(j));
    }
    return doc.dump(2) + "\n";
  }

  std::string out =
      "| Grid | Range | Confounders (SNR) | Smoothing | N | Task | Arith. | Tok. |\n"
      "|------|-------|-------------------|-----------|---|------|--------|------|\n";
  for (const auto& r : reports) {
    const std::string snr = std::isinf(r.snr_db) ? "∞" : fixed(r.snr_db, 2);
    out += "| 3x" + std::to_string(r.grid_cols) + " | " + std::to_string(r.range_m) + " | " +
           std::to_string(r.n_confounders) + " (" + snr + ") | " + smoothing_label(r.smoothing) +
           " | " + std::to_string(r.n_puzzles) + " | " + fixed(100.0 * r.task_accuracy, 1) +
           " | " +
           (r.arithmetic_accuracy ? fixed(100.0 * *r.arithmetic_accuracy, 1) : std::string("-")) +
           " | " + fixed(r.mean_output_tokens, 0) + " |\n";
  }
  return out;
}

}  // namespace ravenx
