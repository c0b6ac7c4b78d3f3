#include <cstdio>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>

#include <CLI11.hpp>
#include <nlohmann/json.hpp>

#include "ravenx/errors.hpp"
#include "ravenx/generator.hpp"
#include "ravenx/harness.hpp"
#include "ravenx/jsonl.hpp"
#include "ravenx/metrics.hpp"
#include "ravenx/solver.hpp"
#include "ravenx/uncertainty.hpp"

namespace {

using namespace ravenx;

// "3x10" -> 10
int parse_grid(const std::string& text) {
  if (text.rfind("3x", 0) != 0) throw ConfigError("grid must look like 3xG, got '" + text + "'");
  return std::stoi(text.substr(2));
}

bool parse_switch(const std::string& text) {
  if (text == "on") return true;
  if (text == "off") return false;
  throw ConfigError("expected on|off, got '" + text + "'");
}

void write_text(const std::string& path, const std::string& text) {
  if (path.empty() || path == "-") {
    std::cout << text;
    return;
  }
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error("cannot open '" + path + "' for writing");
  out << text;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"I-RAVEN / I-RAVEN-X puzzle generation, solving and evaluation"};
  app.require_subcommand(1);

  // generate
  auto* gen = app.add_subcommand("generate", "generate clean puzzles");
  std::string grid = "3x3";
  GenConfig gcfg;
  std::string gen_out;
  gen->add_option("--grid", grid, "3x3 or 3x10");
  gen->add_option("--range", gcfg.range_m, "attribute range m (10, 100, 1000)");
  gen->add_option("--n", gcfg.n_puzzles, "number of puzzles");
  gen->add_option("--seed", gcfg.seed);
  gen->add_option("--out", gen_out)->required();

  // corrupt
  auto* cor = app.add_subcommand("corrupt", "add confounders and smoothing");
  std::string cor_in, cor_out, smoothing = "none";
  UncertaintyConfig ucfg;
  double p_low = 0.51, sigma = 0.5;
  std::string smooth_conf = "on";
  cor->add_option("--in", cor_in)->required();
  cor->add_option("--out", cor_out)->required();
  cor->add_option("--confounders", ucfg.n_confounders);
  cor->add_option("--smoothing", smoothing, "none|bins|gaussian");
  cor->add_option("--p-l", p_low, "lower bound of p(T) for bins");
  cor->add_option("--sigma", sigma, "gaussian width");
  cor->add_option("--smooth-confounders", smooth_conf, "on|off");
  cor->add_option("--seed", ucfg.seed);

  // solve
  auto* sol = app.add_subcommand("solve", "run the abductive solver");
  std::string sol_in, sol_records, sol_report, entropy = "on", sol_fmt = "markdown", priors_path;
  std::string sol_conf = "on";
  int threads = 1;
  sol->add_option("--in", sol_in)->required();
  sol->add_option("--entropy", entropy, "on|off");
  sol->add_option("--confounders-in-score", sol_conf, "on|off");
  sol->add_option("--priors", priors_path, "JSON file written by train");
  sol->add_option("--records", sol_records, "write EvalRecords JSONL");
  sol->add_option("--report", sol_report, "write report ('-' for stdout)");
  sol->add_option("--fmt", sol_fmt, "json|markdown");
  sol->add_option("--threads", threads);

  // train
  auto* trn = app.add_subcommand("train", "fit rule prior logits");
  std::string trn_in, trn_out, trn_entropy = "on";
  TrainConfig tcfg;
  trn->add_option("--in", trn_in)->required();
  trn->add_option("--epochs", tcfg.epochs);
  trn->add_option("--lr", tcfg.learning_rate);
  trn->add_option("--batch-size", tcfg.batch_size, "0 = full batch");
  trn->add_option("--tau", tcfg.temperature);
  trn->add_option("--seed", tcfg.seed);
  trn->add_option("--entropy", trn_entropy, "on|off");
  trn->add_option("--out", trn_out, "write priors JSON");

  // eval
  auto* ev = app.add_subcommand("eval", "query a chat-completion endpoint");
  std::string ev_in, ev_journal, ev_dry, ev_style, ev_out, ev_effort, ev_field;
  ProviderConfig provider;
  ev->add_option("--in", ev_in)->required();
  ev->add_option("--endpoint", provider.endpoint);
  ev->add_option("--model", provider.model);
  ev->add_option("--api-key-env", provider.api_key_env);
  ev->add_option("--max-tokens", provider.max_output_tokens);
  ev->add_option("--max-tokens-field", ev_field);
  ev->add_option("--reasoning-effort", ev_effort);
  ev->add_option("--concurrency", provider.max_concurrency);
  ev->add_option("--timeout", provider.timeout_s);
  ev->add_option("--retries", provider.retry.max_attempts);
  ev->add_option("--style", ev_style, "plain|probabilistic (default: per puzzle)");
  ev->add_option("--journal", ev_journal);
  ev->add_option("--dry-run", ev_dry, "write prompts to this directory");
  ev->add_option("--out", ev_out, "write records JSONL");

  // report
  auto* rep = app.add_subcommand("report", "summarize EvalRecords");
  std::string rep_records, rep_puzzles, rep_fmt = "markdown", rep_out = "-";
  rep->add_option("--records", rep_records)->required();
  rep->add_option("--puzzles", rep_puzzles)->required();
  rep->add_option("--fmt", rep_fmt, "json|markdown");
  rep->add_option("--out", rep_out);

  CLI11_PARSE(app, argc, argv);

  try {
    if (gen->parsed()) {
      gcfg.grid_cols = parse_grid(grid);
      gcfg.validate();
      std::ofstream out(gen_out, std::ios::binary);
      if (!out) throw Error("cannot open '" + gen_out + "' for writing");
      generate_dataset(gcfg, [&](Puzzle&& p) { out << serialize_puzzle(p) << '\n'; });
    } else if (cor->parsed()) {
      if (smoothing == "bins") {
        ucfg.smoothing = {SmoothingKind::Bins, p_low};
      } else if (smoothing == "gaussian") {
        ucfg.smoothing = {SmoothingKind::Gaussian, sigma};
      } else if (smoothing != "none") {
        throw ConfigError("unknown smoothing '" + smoothing + "'");
      }
      ucfg.smooth_confounders = parse_switch(smooth_conf);
      ucfg.validate();
      auto puzzles = read_puzzles(cor_in);
      for (auto& p : puzzles) p = apply_uncertainty(p, ucfg);
      write_puzzles(cor_out, puzzles);
    } else if (sol->parsed()) {
      SolverConfig scfg;
      scfg.entropy_weighting = parse_switch(entropy);
      scfg.include_confounders = parse_switch(sol_conf);
      if (!priors_path.empty()) {
        std::ifstream in(priors_path);
        auto j = nlohmann::json::parse(in);
        for (RuleKind r : kAllRules) scfg.rule_priors[rule_index(r)] = j.at("rule_priors").at(std::string(rule_name(r))).get<double>();
      }
      scfg.validate();
      const auto puzzles = read_puzzles(sol_in);
      const auto records = solve_dataset(puzzles, scfg, threads);
      if (!sol_records.empty()) write_records(sol_records, records);
      if (!sol_report.empty()) {
        write_text(sol_report, emit_report(records, puzzles, report_format_from_name(sol_fmt)));
      }
      if (sol_records.empty() && sol_report.empty()) {
        std::printf("task accuracy: %.4f over %zu puzzles\n", task_accuracy(records),
                    records.size());
      }
    } else if (trn->parsed()) {
      SolverConfig scfg;
      scfg.entropy_weighting = parse_switch(trn_entropy);
      const auto puzzles = read_puzzles(trn_in);
      const auto result = train_rule_priors(puzzles, tcfg, scfg);
      nlohmann::ordered_json j;
      for (RuleKind r : kAllRules) {
        j["rule_priors"][std::string(rule_name(r))] = result.rule_priors[rule_index(r)];
      }
      j["loss_trace"] = result.loss_trace;
      write_text(trn_out.empty() ? "-" : trn_out, j.dump(2) + "\n");
    } else if (ev->parsed()) {
      if (!ev_field.empty()) provider.max_tokens_field = ev_field;
      if (!ev_effort.empty()) provider.reasoning_effort = ev_effort;
      EvalOptions opts;
      if (!ev_journal.empty()) opts.journal = ev_journal;
      if (!ev_dry.empty()) opts.dry_run_dir = ev_dry;
      if (!ev_style.empty()) opts.style = style_from_name(ev_style);
      const auto puzzles = read_puzzles(ev_in);
      const auto records = run_eval(puzzles, provider, opts);
      if (!ev_out.empty()) write_records(ev_out, records);
      if (!records.empty()) {
        std::printf("task accuracy: %.4f over %zu puzzles\n", task_accuracy(records),
                    records.size());
      }
    } else if (rep->parsed()) {
      const auto records = read_records(rep_records);
      const auto puzzles = read_puzzles(rep_puzzles);
      write_text(rep_out, emit_report(records, puzzles, report_format_from_name(rep_fmt)));
    }
  } catch (const std::exception& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return 1;
  }
  return 0;
}
