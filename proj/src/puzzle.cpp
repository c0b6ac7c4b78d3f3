#include "ravenx/puzzle.hpp"

#include <algorithm>
#include <set>
#include <sstream>

#include <nlohmann/json.hpp>

#include "ravenx/errors.hpp"

namespace ravenx {

using ordered_json = nlohmann::ordered_json;
using json = nlohmann::json;

namespace {

constexpr std::array<int, 2> kGridCols = {3, 10};
constexpr std::array<int, 3> kRanges = {10, 100, 1000};

ordered_json pmf_to_json(const SparsePmf& pmf) {
  ordered_json out = ordered_json::array();
  for (const auto& e : pmf.entries()) out.push_back(ordered_json::array({e.value, e.prob}));
  return out;
}

ordered_json panel_to_json(const Panel& panel) {
  ordered_json attrs = ordered_json::array();
  for (const auto& p : panel.true_attrs) attrs.push_back(pmf_to_json(p));
  ordered_json confounders = ordered_json::array();
  for (const auto& p : panel.confounders) confounders.push_back(pmf_to_json(p));
  ordered_json out;
  out["attrs"] = std::move(attrs);
  out["confounders"] = std::move(confounders);
  return out;
}

// Field access that turns missing keys and type errors into SchemaError
// naming the full path of the field.
const json& require(const json& obj, const char* key, const std::string& path) {
  if (!obj.is_object()) throw SchemaError("puzzle: '" + path + "' must be an object");
  auto it = obj.find(key);
  if (it == obj.end()) {
    throw SchemaError("puzzle: missing field '" + (path.empty() ? "" : path + ".") + key + "'");
  }
  return *it;
}

template <typename T>
T get_as(const json& value, const std::string& path) {
  try {
    return value.get<T>();
  } catch (const json::exception&) {
    throw SchemaError("puzzle: field '" + path + "' has the wrong type");
  }
}

SparsePmf pmf_from_json(const json& value, int range, const std::string& path) {
  if (!value.is_array()) throw SchemaError("puzzle: field '" + path + "' must be an array");
  std::vector<PmfEntry> entries;
  for (std::size_t i = 0; i < value.size(); ++i) {
    const auto& pair = value[i];
    const std::string at = path + "[" + std::to_string(i) + "]";
    if (!pair.is_array() || pair.size() != 2 || !pair[0].is_number_integer() ||
        !pair[1].is_number()) {
      throw SchemaError("puzzle: field '" + at + "' must be a [value, prob] pair");
    }
    entries.push_back({pair[0].get<int>(), pair[1].get<double>()});
  }
  try {
    return SparsePmf(std::move(entries), range);
  } catch (const InvariantError& e) {
    throw InvariantError(std::string("puzzle: ") + path + ": " + e.what());
  }
}

Panel panel_from_json(const json& value, int range, const std::string& path) {
  Panel panel;
  const auto& attrs = require(value, "attrs", path);
  const auto& confounders = require(value, "confounders", path);
  if (!attrs.is_array()) throw SchemaError("puzzle: field '" + path + ".attrs' must be an array");
  if (!confounders.is_array()) {
    throw SchemaError("puzzle: field '" + path + ".confounders' must be an array");
  }
  for (std::size_t i = 0; i < attrs.size(); ++i) {
    panel.true_attrs.push_back(
        pmf_from_json(attrs[i], range, path + ".attrs[" + std::to_string(i) + "]"));
  }
  for (std::size_t i = 0; i < confounders.size(); ++i) {
    panel.confounders.push_back(
        pmf_from_json(confounders[i], range, path + ".confounders[" + std::to_string(i) + "]"));
  }
  return panel;
}

std::vector<Panel> panels_from_json(const json& value, int range, const std::string& path) {
  if (!value.is_array()) throw SchemaError("puzzle: field '" + path + "' must be an array");
  std::vector<Panel> out;
  out.reserve(value.size());
  for (std::size_t i = 0; i < value.size(); ++i) {
    out.push_back(panel_from_json(value[i], range, path + "[" + std::to_string(i) + "]"));
  }
  return out;
}

SmoothingKind smoothing_from_name(const std::string& name) {
  if (name == "none") return SmoothingKind::None;
  if (name == "bins") return SmoothingKind::Bins;
  if (name == "gaussian") return SmoothingKind::Gaussian;
  throw SchemaError("puzzle: field 'smoothing.kind' has unknown value '" + name + "'");
}

bool structure_ok(const Puzzle& p, std::vector<std::string>& out) {
  const auto before = out.size();
  if (std::find(kGridCols.begin(), kGridCols.end(), p.grid_cols) == kGridCols.end()) {
    out.push_back("grid_cols must be 3 or 10, got " + std::to_string(p.grid_cols));
  }
  if (std::find(kRanges.begin(), kRanges.end(), p.range_m) == kRanges.end()) {
    out.push_back("range_m must be 10, 100 or 1000, got " + std::to_string(p.range_m));
  }
  if (p.n_confounders < 0) out.push_back("n_confounders must be >= 0");
  const auto expected_context = static_cast<std::size_t>(kRows * p.grid_cols - 1);
  if (p.context.size() != expected_context) {
    out.push_back("context must have " + std::to_string(expected_context) + " panels, got " +
                  std::to_string(p.context.size()));
  }
  if (p.candidates.size() != kCandidates) {
    out.push_back("candidate set must have 8 panels, got " + std::to_string(p.candidates.size()));
  }
  if (p.answer_index < 0 || p.answer_index >= kCandidates) {
    out.push_back("answer_index must lie in [0, 7], got " + std::to_string(p.answer_index));
  }
  auto check_panel = [&](const Panel& panel, const std::string& where) {
    if (panel.true_attrs.size() != kTrueAttributes) {
      out.push_back(where + ": expected 3 true attributes, got " +
                    std::to_string(panel.true_attrs.size()));
    }
    if (static_cast<int>(panel.confounders.size()) != p.n_confounders) {
      out.push_back(where + ": expected " + std::to_string(p.n_confounders) +
                    " confounders, got " + std::to_string(panel.confounders.size()));
    }
    for (std::size_t a = 0; a < panel.attribute_count(); ++a) {
      if (panel.attribute(a).range() != p.range_m) {
        out.push_back(where + ": attribute " + std::to_string(a) + " has range " +
                      std::to_string(panel.attribute(a).range()) + ", puzzle range is " +
                      std::to_string(p.range_m));
      }
    }
  };
  for (std::size_t i = 0; i < p.context.size(); ++i) {
    check_panel(p.context[i], "context[" + std::to_string(i) + "]");
  }
  for (std::size_t i = 0; i < p.candidates.size(); ++i) {
    check_panel(p.candidates[i], "candidates[" + std::to_string(i) + "]");
  }
  return out.size() == before;
}

}  // namespace

std::string_view smoothing_name(SmoothingKind kind) {
  switch (kind) {
    case SmoothingKind::None: return "none";
    case SmoothingKind::Bins: return "bins";
    case SmoothingKind::Gaussian: return "gaussian";
  }
  return "none";
}

IntGrid Puzzle::modal_grid(std::size_t attribute, int candidate) const {
  IntGrid grid;
  for (int r = 0; r < kRows; ++r) {
    auto& row = grid[static_cast<std::size_t>(r)];
    row.reserve(static_cast<std::size_t>(grid_cols));
    for (int c = 0; c < grid_cols; ++c) {
      const bool missing = r == kRows - 1 && c == grid_cols - 1;
      const Panel& panel = missing ? candidates[static_cast<std::size_t>(candidate)] : cell(r, c);
      row.push_back(panel.attribute(attribute).mode());
    }
  }
  return grid;
}

bool Puzzle::is_clean() const {
  auto clean = [](const Panel& panel) {
    for (std::size_t a = 0; a < panel.attribute_count(); ++a) {
      if (!panel.attribute(a).is_degenerate()) return false;
    }
    return true;
  };
  return std::all_of(context.begin(), context.end(), clean) &&
         std::all_of(candidates.begin(), candidates.end(), clean);
}

EvalRecord score_choice(const Puzzle& puzzle, int chosen) {
  if (chosen < 0 || chosen >= static_cast<int>(puzzle.candidates.size())) {
    throw PreconditionError("score_choice: candidate " + std::to_string(chosen) + " out of range");
  }
  EvalRecord record;
  record.puzzle_id = puzzle.puzzle_id;
  record.parsed_answer = chosen;
  const auto& picked = puzzle.candidates[static_cast<std::size_t>(chosen)];
  const auto& truth = puzzle.candidates[static_cast<std::size_t>(puzzle.answer_index)];
  for (std::size_t a = 0; a < kTrueAttributes; ++a) {
    record.per_attribute_correct[a] = picked.true_attrs[a].mode() == truth.true_attrs[a].mode();
  }
  record.task_correct = chosen == puzzle.answer_index;
  return record;
}

std::string serialize_puzzle(const Puzzle& p) {
  ordered_json out;
  out["puzzle_id"] = p.puzzle_id;
  out["seed"] = p.seed;
  out["grid_cols"] = p.grid_cols;
  out["range_m"] = p.range_m;
  out["n_confounders"] = p.n_confounders;
  out["smoothing"] = {{"kind", smoothing_name(p.smoothing.kind)}, {"param", p.smoothing.param}};
  ordered_json rules = ordered_json::array();
  for (RuleKind r : p.rules) rules.push_back(rule_name(r));
  out["rules"] = std::move(rules);
  out["answer_index"] = p.answer_index;
  ordered_json context = ordered_json::array();
  for (const auto& panel : p.context) context.push_back(panel_to_json(panel));
  out["context"] = std::move(context);
  ordered_json candidates = ordered_json::array();
  for (const auto& panel : p.candidates) candidates.push_back(panel_to_json(panel));
  out["candidates"] = std::move(candidates);
  return out.dump();
}

Puzzle deserialize_puzzle(std::string_view line) {
  json doc;
  try {
    doc = json::parse(line);
  } catch (const json::parse_error& e) {
    throw SchemaError(std::string("puzzle: malformed JSON: ") + e.what());
  }
  if (!doc.is_object()) throw SchemaError("puzzle: line is not a JSON object");

  Puzzle p;
  p.puzzle_id = get_as<std::string>(require(doc, "puzzle_id", ""), "puzzle_id");
  p.seed = get_as<std::uint64_t>(require(doc, "seed", ""), "seed");
  p.grid_cols = get_as<int>(require(doc, "grid_cols", ""), "grid_cols");
  p.range_m = get_as<int>(require(doc, "range_m", ""), "range_m");
  p.n_confounders = get_as<int>(require(doc, "n_confounders", ""), "n_confounders");
  const auto& smoothing = require(doc, "smoothing", "");
  p.smoothing.kind = smoothing_from_name(
      get_as<std::string>(require(smoothing, "kind", "smoothing"), "smoothing.kind"));
  p.smoothing.param = get_as<double>(require(smoothing, "param", "smoothing"), "smoothing.param");
  const auto& rules = require(doc, "rules", "");
  if (!rules.is_array() || rules.size() != kTrueAttributes) {
    throw SchemaError("puzzle: field 'rules' must be an array of 3 rule names");
  }
  for (std::size_t i = 0; i < kTrueAttributes; ++i) {
    p.rules[i] = rule_from_name(get_as<std::string>(rules[i], "rules[" + std::to_string(i) + "]"));
  }
  p.answer_index = get_as<int>(require(doc, "answer_index", ""), "answer_index");
  if (p.range_m < 1) throw InvariantError("puzzle: range_m must be positive");
  p.context = panels_from_json(require(doc, "context", ""), p.range_m, "context");
  p.candidates = panels_from_json(require(doc, "candidates", ""), p.range_m, "candidates");

  const auto violations = validate_puzzle(p);
  if (!violations.empty()) {
    std::ostringstream msg;
    msg << "puzzle '" << p.puzzle_id << "' violates invariants: " << violations.front();
    for (std::size_t i = 1; i < violations.size(); ++i) msg << "; " << violations[i];
    throw InvariantError(msg.str());
  }
  return p;
}

std::vector<std::string> validate_puzzle(const Puzzle& p) {
  std::vector<std::string> out;
  if (!structure_ok(p, out)) return out;

  // Candidate set must be {correct, alternative}^3.
  std::set<std::array<int, kTrueAttributes>> tuples;
  for (const auto& cand : p.candidates) {
    std::array<int, kTrueAttributes> t{};
    for (std::size_t a = 0; a < kTrueAttributes; ++a) t[a] = cand.true_attrs[a].mode();
    tuples.insert(t);
  }
  if (tuples.size() != kCandidates) {
    out.push_back("candidates are not 8 distinct attribute combinations");
  }
  for (std::size_t a = 0; a < kTrueAttributes; ++a) {
    std::set<int> values;
    for (const auto& cand : p.candidates) values.insert(cand.true_attrs[a].mode());
    if (values.size() != 2) {
      out.push_back("attribute " + std::to_string(a) + " takes " + std::to_string(values.size()) +
                    " values across candidates, expected 2");
    }
  }

  // Brute-force uniqueness on modal values.
  int rule_consistent = 0;
  int any_rule_consistent = 0;
  for (int c = 0; c < kCandidates; ++c) {
    bool follows_annotation = true;
    bool follows_some_rule = true;
    for (std::size_t a = 0; a < kTrueAttributes; ++a) {
      const auto grid = p.modal_grid(a, c);
      if (!grid_satisfies(p.rules[a], grid)) follows_annotation = false;
      if (holding_rules(grid).empty()) follows_some_rule = false;
    }
    if (follows_annotation) {
      ++rule_consistent;
      if (c != p.answer_index) {
        out.push_back("candidate " + std::to_string(c) +
                      " satisfies the annotated rules but is not the answer");
      }
    } else if (c == p.answer_index) {
      out.push_back("answer candidate " + std::to_string(c) + " violates the annotated rules");
    }
    if (follows_some_rule) ++any_rule_consistent;
  }
  if (rule_consistent != 1) {
    out.push_back(std::to_string(rule_consistent) +
                  " candidates satisfy the annotated rules, expected exactly 1");
  }
  if (any_rule_consistent != 1) {
    out.push_back(std::to_string(any_rule_consistent) +
                  " candidates are explained by some rule on every attribute, expected exactly 1");
  }
  return out;
}

std::string serialize_record(const EvalRecord& r) {
  ordered_json out;
  out["puzzle_id"] = r.puzzle_id;
  out["prompt_text"] = r.prompt_text;
  out["raw_response"] = r.raw_response;
  out["parsed_answer"] = r.parsed_answer;
  out["parse_failed"] = r.parse_failed;
  out["output_tokens"] = r.output_tokens;
  out["per_attribute_correct"] = r.per_attribute_correct;
  out["task_correct"] = r.task_correct;
  out["elapsed_ms"] = r.elapsed_ms;
  out["error"] = r.error;
  return out.dump();
}

EvalRecord deserialize_record(std::string_view line) {
  json doc;
  try {
    doc = json::parse(line);
  } catch (const json::parse_error& e) {
    throw SchemaError(std::string("record: malformed JSON: ") + e.what());
  }
  auto field = [&](const char* key) -> const json& {
    auto it = doc.find(key);
    if (it == doc.end()) throw SchemaError(std::string("record: missing field '") + key + "'");
    return *it;
  };
  auto as = [](const json& v, const char* key, auto&& out) {
    try {
      v.get_to(out);
    } catch (const json::exception&) {
      throw SchemaError(std::string("record: field '") + key + "' has the wrong type");
    }
  };
  if (!doc.is_object()) throw SchemaError("record: line is not a JSON object");
  EvalRecord r;
  as(field("puzzle_id"), "puzzle_id", r.puzzle_id);
  as(field("parsed_answer"), "parsed_answer", r.parsed_answer);
  as(field("parse_failed"), "parse_failed", r.parse_failed);
  as(field("task_correct"), "task_correct", r.task_correct);
  as(field("per_attribute_correct"), "per_attribute_correct", r.per_attribute_correct);
  if (doc.contains("prompt_text")) as(doc["prompt_text"], "prompt_text", r.prompt_text);
  if (doc.contains("raw_response")) as(doc["raw_response"], "raw_response", r.raw_response);
  if (doc.contains("output_tokens")) as(doc["output_tokens"], "output_tokens", r.output_tokens);
  if (doc.contains("elapsed_ms")) as(doc["elapsed_ms"], "elapsed_ms", r.elapsed_ms);
  if (doc.contains("error")) as(doc["error"], "error", r.error);
  if (r.parsed_answer < 0 || r.parsed_answer >= kCandidates) {
    throw InvariantError("record: parsed_answer must lie in [0, 7]");
  }
  if (r.parse_failed && r.parsed_answer != 0) {
    throw InvariantError("record: parse_failed requires parsed_answer == 0");
  }
  if (r.output_tokens < 0) throw InvariantError("record: output_tokens must be >= 0");
  return r;
}

}  // namespace ravenx
