#include <doctest.h>

#include <nlohmann/json.hpp>

#include "ravenx/errors.hpp"
#include "ravenx/generator.hpp"
#include "ravenx/metrics.hpp"
#include "ravenx/uncertainty.hpp"

using namespace ravenx;

namespace {

std::vector<Puzzle> dataset(int g, int m, int n, std::uint64_t seed) {
  GenConfig cfg;
  cfg.grid_cols = g;
  cfg.range_m = m;
  cfg.n_puzzles = n;
  cfg.seed = seed;
  return generate_dataset(cfg);
}

}  // namespace

TEST_CASE("task accuracy") {
  const auto data = dataset(3, 10, 8, 1);
  std::vector<EvalRecord> records;
  for (std::size_t i = 0; i < data.size(); ++i) {
    records.push_back(score_choice(data[i], i < 6 ? data[i].answer_index : (data[i].answer_index + 1) % 8));
  }
  CHECK(task_accuracy(records) == doctest::Approx(0.75));
  CHECK_THROWS_AS(task_accuracy({}), EmptyInputError);
}

TEST_CASE("arithmetic accuracy counts arithmetic attributes only") {
  GenConfig cfg;
  cfg.n_puzzles = 20;
  cfg.rule_weights = {1, 1, 0, 0, 0, 0, 0, 0, 0};
  const auto data = generate_dataset(cfg);
  std::vector<EvalRecord> records;
  long total = 0, hits = 0;
  for (std::size_t i = 0; i < data.size(); ++i) {
    const int chosen = static_cast<int>(i % 8);
    records.push_back(score_choice(data[i], chosen));
    for (std::size_t a = 0; a < 3; ++a) {
      if (data[i].rules[a] != RuleKind::ArithPlus) continue;
      ++total;
      hits += data[i].candidates[chosen].true_attrs[a].mode() ==
              data[i].candidates[data[i].answer_index].true_attrs[a].mode();
    }
  }
  REQUIRE(total > 0);
  const auto acc = arithmetic_accuracy(records, data);
  REQUIRE(acc);
  CHECK(*acc == doctest::Approx(static_cast<double>(hits) / total));

  cfg.rule_weights = {1, 0, 0, 0, 0, 0, 0, 0, 0};
  const auto constant = generate_dataset(cfg);
  std::vector<EvalRecord> r2;
  for (const auto& p : constant) r2.push_back(score_choice(p, 0));
  CHECK(!arithmetic_accuracy(r2, constant));

  auto stray = records;
  stray[0].puzzle_id = "unknown";
  CHECK_THROWS_AS(arithmetic_accuracy(stray, data), IdMismatchError);
}

TEST_CASE("reports group by configuration") {
  auto clean = dataset(10, 1000, 6, 2);
  std::vector<Puzzle> all = clean;
  UncertaintyConfig u;
  u.n_confounders = 10;
  u.smoothing = {SmoothingKind::Bins, 0.51};
  for (auto p : clean) {
    p = apply_uncertainty(p, u);
    p.puzzle_id += "-noisy";
    all.push_back(p);
  }
  std::vector<EvalRecord> records;
  for (const auto& p : all) {
    auto r = score_choice(p, p.answer_index);
    r.output_tokens = 1000;
    records.push_back(r);
  }
  const auto reports = build_reports(records, all);
  REQUIRE(reports.size() == 2);
  CHECK(reports[0].n_confounders == 0);
  CHECK(std::isinf(reports[0].snr_db));
  CHECK(reports[1].snr_db == doctest::Approx(snr_db(10)));
  CHECK(reports[1].n_puzzles == 6);
  CHECK(reports[1].task_accuracy == 1.0);
  CHECK(reports[1].mean_output_tokens == 1000.0);

  const auto json = nlohmann::json::parse(emit_report(records, all, ReportFormat::Json));
  CHECK(json["reports"][0]["snr_db"].is_null());
  CHECK(json["reports"][1]["snr_db"].get<double>() == snr_db(10));

  const auto md = emit_report(records, all, ReportFormat::Markdown);
  CHECK(md.find("| Grid | Range | Confounders (SNR) | Smoothing | N | Task | Arith. | Tok. |") == 0);
  CHECK(md.find("| 3x10 | 1000 | 10 (-5.23) | bins p_L=0.51 | 6 | 100.0 |") != std::string::npos);
  CHECK(md == emit_report(records, all, ReportFormat::Markdown));
  CHECK_THROWS_AS(report_format_from_name("csv"), ConfigError);
  CHECK_THROWS_AS(build_reports({}, all), EmptyInputError);
}
