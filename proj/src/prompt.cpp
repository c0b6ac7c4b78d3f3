#include <cstdio>
#include <regex>
#include <string>

#include "ravenx/errors.hpp"
#include "ravenx/harness.hpp"

namespace ravenx {

namespace {

constexpr std::string_view kLead = "Complete the Raven's progressive matrix.";
constexpr std::string_view kTail =
    "Please decide carefully. Take a deep breath and think step-by-step. Finally, give your "
    "answer in the following format: My Answer: Answer #<your answer>";

std::string plain_preamble(bool uncertain) {
  std::string out(kLead);
  out += uncertain ? " Your task is to select the best matching Answer from the Answer set. "
                   : " Your task is to select the correct Answer from the Answer set. ";
  out += kTail;
  return out;
}

std::string probabilistic_preamble(int cols) {
  // Wording (including its spelling) is kept identical to the reference prompt.
  std::string out(kLead);
  out += " You are given a context matrix of 3 rows and " + std::to_string(cols) +
         " colums. Each element in the matrix has multiply attributes, embedded in round "
         "brackets (). Each attribute is described with a probability distribution, e.g., "
         "<p_a::v_a, p_b::v_b> describes that the attribute has value v_a with probability p_a "
         "and value v_b with probability p_b. Your task is to select the best matching Answer "
         "from the Answer set. ";
  out += kTail;
  return out;
}

std::string format_prob(double p) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.2f", p);
  std::string out(buf);
  if (out == "-0.00") out = "0.00";
  return out;
}

std::string render_pmf(const SparsePmf& pmf) {
  std::string out = "<";
  bool first = true;
  for (const auto& e : pmf.entries()) {
    if (!first) out += ',';
    first = false;
    out += format_prob(e.prob);
    out += "::";
    out += std::to_string(e.value);
  }
  out += '>';
  return out;
}

std::string render_panel(const Panel& panel, PromptStyle style) {
  std::string out = "(";
  for (std::size_t a = 0; a < panel.attribute_count(); ++a) {
    if (a > 0) out += style == PromptStyle::Plain ? "," : ", ";
    const auto& pmf = panel.attribute(a);
    out += style == PromptStyle::Plain ? std::to_string(pmf.mode()) : render_pmf(pmf);
  }
  out += ')';
  return out;
}

}  // namespace

std::string_view style_name(PromptStyle style) {
  return style == PromptStyle::Plain ? "plain" : "probabilistic";
}

PromptStyle style_from_name(std::string_view name) {
  if (name == "plain") return PromptStyle::Plain;
  if (name == "probabilistic") return PromptStyle::Probabilistic;
  throw ConfigError("unknown prompt style '" + std::string(name) + "'");
}

PromptStyle style_for(const Puzzle& puzzle) {
  return puzzle.is_clean() ? PromptStyle::Plain : PromptStyle::Probabilistic;
}

std::string render_prompt(const Puzzle& puzzle, PromptStyle style) {
  if (style != style_for(puzzle)) {
    throw StyleMismatchError("puzzle " + puzzle.puzzle_id + " requires the " +
                             std::string(style_name(style_for(puzzle))) + " prompt style");
  }
  std::string out = style == PromptStyle::Plain
                        ? plain_preamble(puzzle.n_confounders > 0)
                        : probabilistic_preamble(puzzle.grid_cols);
  out += '\n';
  for (int r = 0; r < kRows; ++r) {
    out += "row " + std::to_string(r + 1) + ": ";
    const bool last_row = r == kRows - 1;
    const int cols = last_row ? puzzle.grid_cols - 1 : puzzle.grid_cols;
    for (int c = 0; c < cols; ++c) {
      out += render_panel(puzzle.cell(r, c), style);
      if (c + 1 < cols) out += ", ";
    }
    out += last_row ? ",\n" : ";\n";
  }
  out += "Answer set:";
  for (int j = 0; j < kCandidates; ++j) {
    out += "\nAnswer #" + std::to_string(j) + ": ";
    out += render_panel(puzzle.candidates[static_cast<std::size_t>(j)], style);
  }
  return out;
}

ParsedAnswer parse_answer(std::string_view response) {
  static const std::regex pattern(R"(My\s+Answer\s*:\s*\**\s*Answer\s*#\s*(\d+))",
                                  std::regex::icase);
  ParsedAnswer out;
  const std::string text(response);
  std::string last;
  for (auto it = std::sregex_iterator(text.begin(), text.end(), pattern);
       it != std::sregex_iterator(); ++it) {
    last = (*it)[1].str();
  }
  if (last.empty() || last.size() > 2) return out;
  const int index = std::stoi(last);
  if (index < 0 || index >= kCandidates) return out;
  return {index, false};
}

}  // namespace ravenx
