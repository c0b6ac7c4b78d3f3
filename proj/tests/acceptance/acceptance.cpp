// Runs every acceptance criterion and prints one PASS/FAIL line per item.
// Exit status is non-zero when any criterion fails.

#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <limits>
#include <mutex>
#include <random>
#include <string>
#include <vector>

#include "fixtures.hpp"
#include "mock_server.hpp"
#include "puzzle_oracle.hpp"
#include "ravenx/generator.hpp"
#include "ravenx/harness.hpp"
#include "ravenx/metrics.hpp"
#include "ravenx/solver.hpp"
#include "ravenx/uncertainty.hpp"

using namespace ravenx;

namespace {

struct Outcome {
  bool pass = false;
  std::string detail;
};

std::string fmt(const char* f, auto... args) {
  char buf[512];
  std::snprintf(buf, sizeof buf, f, args...);
  return buf;
}

std::vector<Puzzle> clean(int g, int m, int n, std::uint64_t seed) {
  GenConfig cfg;
  cfg.grid_cols = g;
  cfg.range_m = m;
  cfg.n_puzzles = n;
  cfg.seed = seed;
  return generate_dataset(cfg);
}

std::vector<Puzzle> corrupt(const std::vector<Puzzle>& data, int k, Smoothing s,
                            std::uint64_t seed) {
  UncertaintyConfig u;
  u.n_confounders = k;
  u.smoothing = s;
  u.seed = seed;
  std::vector<Puzzle> out;
  out.reserve(data.size());
  for (const auto& p : data) out.push_back(apply_uncertainty(p, u));
  return out;
}

double accuracy(const std::vector<Puzzle>& data, bool weighting) {
  SolverConfig cfg;
  cfg.entropy_weighting = weighting;
  return task_accuracy(solve_dataset(data, cfg));
}

Outcome snr_table() {
  const std::pair<int, double> table[] = {{1, 4.77},   {3, 0.00},    {5, -2.22},  {10, -5.23},
                                          {20, -8.24}, {30, -10.00}, {300, -20.00}};
  double worst = 0.0;
  for (auto [k, db] : table) worst = std::max(worst, std::abs(snr_db(k) - db));
  return {worst <= 0.01, fmt("max |error| %.4f dB over 7 entries", worst)};
}

Outcome generator_soundness() {
  int bad = 0, total = 0;
  for (auto [g, m] : {std::pair{3, 10}, std::pair{10, 100}, std::pair{10, 1000}}) {
    for (const auto& p : clean(g, m, 1000, 1)) {
      ++total;
      const bool ok = validate_puzzle(p).empty() &&
                      oracle::consistent_candidates(p) == std::vector<int>{p.answer_index} &&
                      oracle::explainable_candidates(p) == std::vector<int>{p.answer_index};
      bad += ok ? 0 : 1;
    }
  }
  return {bad == 0, fmt("%d/%d puzzles valid with a unique rule-consistent candidate", total - bad, total)};
}

Outcome solver_exactness() {
  std::string detail;
  bool pass = true;
  for (auto [g, m] : {std::pair{3, 10}, std::pair{10, 100}, std::pair{10, 1000}}) {
    const double acc = accuracy(clean(g, m, 500, 2), true);
    pass = pass && acc == 1.0;
    detail += fmt("3x%d/m=%d %.1f%%  ", g, m, 100 * acc);
  }
  return {pass, detail};
}

Outcome confounder_robustness() {
  const auto base = clean(10, 1000, 500, 3);
  const auto noisy = corrupt(base, 10, {}, 4);
  const double on0 = accuracy(base, true), on10 = accuracy(noisy, true);
  const double off0 = accuracy(base, false), off10 = accuracy(noisy, false);
  double h_true = 0.0, h_conf = 0.0;
  for (const auto& p : noisy) {
    for (std::size_t a = 0; a < static_cast<std::size_t>(p.attribute_count()); ++a) {
      const double h = abduce_confidence(p, a, SolverConfig{}).entropy;
      (a < 3 ? h_true : h_conf) += h;
    }
  }
  h_true /= 3.0 * noisy.size();
  h_conf /= 10.0 * noisy.size();
  const double drop_on = 100 * (on0 - on10), drop_off = 100 * (off0 - off10);
  const bool small_drop = drop_on <= 2.0;
  const bool entropy_order = h_conf > h_true;
  const bool ablation = drop_off > drop_on;
  return {small_drop && entropy_order && ablation,
          fmt("weighted drop %.1f pts [%s]; H(conf) %.3f > H(true) %.4f [%s]; "
              "unweighted drop %.1f pts > weighted [%s]",
              drop_on, small_drop ? "ok" : "no", h_conf, h_true, entropy_order ? "ok" : "no",
              drop_off, ablation ? "ok" : "no")};
}

// Not a criterion: the same ablation where confounder values can collide.
std::string confounder_ablation_small_range() {
  const auto noisy = corrupt(clean(3, 10, 500, 3), 30, {}, 4);
  return fmt("3x3/m=10/k=30: weighted %.1f%%, unweighted %.1f%%", 100 * accuracy(noisy, true),
             100 * accuracy(noisy, false));
}

Outcome smoothing_floor() {
  const auto base = clean(10, 1000, 500, 5);
  const double a = accuracy(corrupt(base, 0, {SmoothingKind::Bins, 0.51}, 6), true);
  const double c = accuracy(corrupt(base, 10, {SmoothingKind::Bins, 0.51}, 6), true);
  return {a >= 0.8 && c >= 0.8, fmt("k=0: %.1f%%, k=10: %.1f%% (floor 80%%)", 100 * a, 100 * c)};
}

Outcome smoothing_statistics() {
  Rng rng(7);
  constexpr int n = 100000;
  const double p_low = 0.7;
  double sum = 0.0, sq = 0.0;
  const auto t = SparsePmf::degenerate(500, 1000);
  for (int i = 0; i < n; ++i) {
    const double p = smooth_bins(t, p_low, rng).prob(500);
    sum += p;
    sq += p * p;
  }
  const double mean = sum / n;
  const double se = std::sqrt((sq / n - mean * mean) / n);
  const double z = std::abs(mean - (p_low + 1) / 2) / se;
  double worst = 0.0;
  for (double sigma : {0.3, 0.5, 0.7}) {
    const auto g = smooth_gaussian(t, sigma);
    const double want = std::exp(1.0 / (2 * sigma * sigma));
    for (int side : {-1, 1}) worst = std::max(worst, std::abs(g.prob(500) / g.prob(500 + side) - want) / want);
  }
  return {z <= 3.0 && worst <= 1e-9,
          fmt("E[p(T)] = %.5f vs %.5f (%.2f sigma); gaussian ratio rel. error %.1e", mean,
              (p_low + 1) / 2, z, worst)};
}

Outcome gradient_check() {
  Rng rng(8);
  const auto base = clean(10, 100, 40, 9);
  double worst = 0.0;
  // Batches whose attributes all sit at the entropy floor have a loss near
  // 5e3 and a gradient near 1e-3, too small for the difference quotient to
  // resolve against rounding (eps * |L| / h); those are redrawn.
  int resampled = 0;
  for (int draw = 0; draw < 20; ++draw) {
    std::vector<PuzzleEvidence> batch;
    SolverConfig cfg;
    bool informative = false;
    while (!informative) {
      batch.clear();
      for (int j = 0; j < 2; ++j) {
        const auto& p = base[static_cast<std::size_t>(rng.uniform_int(0, 39))];
        const Smoothing s = draw % 2 ? Smoothing{SmoothingKind::Bins, 0.51}
                                     : Smoothing{SmoothingKind::Gaussian, 0.6};
        batch.push_back(collect_evidence(corrupt({p}, draw % 3, s, rng.next_u64()).front(), true));
      }
      for (auto& w : cfg.rule_priors) w = rng.uniform(-1.5, 1.5);
      const auto lg = loss_and_gradient(batch, cfg, 1.0);
      double gnorm = 0.0;
      for (double x : lg.gradient) gnorm += x * x;
      const double rounding = std::numeric_limits<double>::epsilon() * std::abs(lg.loss) / 1e-5;
      informative = std::sqrt(gnorm) > 1e6 * rounding;
      resampled += informative ? 0 : 1;
    }
    const auto analytic = loss_and_gradient(batch, cfg, 1.0).gradient;
    const double h = 1e-5;
    double diff = 0.0, norm = 0.0;
    for (std::size_t r = 0; r < kRuleCount; ++r) {
      auto up = cfg, down = cfg;
      up.rule_priors[r] += h;
      down.rule_priors[r] -= h;
      const double numeric =
          (loss_and_gradient(batch, up, 1.0).loss - loss_and_gradient(batch, down, 1.0).loss) / (2 * h);
      diff += (numeric - analytic[r]) * (numeric - analytic[r]);
      norm += numeric * numeric;
    }
    worst = std::max(worst, std::sqrt(diff / norm));
  }
  return {worst < 1e-4, fmt("worst relative error %.2e over 20 draws (%d redrawn)", worst, resampled)};
}

Outcome prompt_fidelity() {
  int matched = 0, closure = 0;
  const char* names[] = {"iraven_plain_3x3", "iravenx_confounders_3x10",
                         "iravenx_probabilistic_3x10"};
  for (const char* name : names) {
    const auto p = fixtures::puzzle(name);
    const auto text = render_prompt(p, style_for(p));
    matched += text == fixtures::expected_prompt(name);
    for (int j = 0; j < 8; ++j) {
      const bool listed = text.find("Answer #" + std::to_string(j) + ": (") != std::string::npos;
      const auto parsed = parse_answer("...\nMy Answer: Answer #" + std::to_string(j));
      closure += listed && parsed.index == j && !parsed.failed;
    }
  }
  const auto fallback = parse_answer("I cannot decide.");
  const bool default_zero = fallback.index == 0 && fallback.failed;
  return {matched == 3 && closure == 24 && default_zero,
          fmt("%d/3 prompts byte-identical; %d/24 render-parse closures; default-to-0 %s", matched,
              closure, default_zero ? "ok" : "no")};
}

Outcome random_chance() {
  const auto data = clean(10, 1000, 500, 10);
  std::mt19937 gen(11);
  std::mutex mu;
  mock::ChatServer server([&](const std::string&, int) {
    std::lock_guard lock(mu);
    const int j = static_cast<int>(gen() % 8);
    return std::pair{200, "My Answer: Answer #" + std::to_string(j)};
  });
  ProviderConfig provider;
  provider.endpoint = server.endpoint();
  provider.model = "uniform-random";
  provider.api_key_env = "RAVENX_ACCEPTANCE_NO_KEY";
  provider.max_concurrency = 4;
  const double acc = task_accuracy(run_eval(data, provider, EvalOptions{}));
  const double sigma = std::sqrt(0.125 * 0.875 / 500);
  return {std::abs(acc - 0.125) <= 3 * sigma,
          fmt("%.1f%% over 500 puzzles (12.5%% +- %.1f%%)", 100 * acc, 300 * sigma)};
}

Outcome not_reproducible() {
  // Model accuracies, token counts and timing need paid, nondeterministic
  // APIs. What is checked here is that the harness is configured to re-run
  // them with the published sampling settings.
  const ProviderConfig p;
  const bool defaults = p.temperature == 0.6 && p.top_p == 0.7 && p.max_output_tokens == 25000;
  return {defaults, "model results not asserted; harness defaults temperature 0.6, top-p 0.7, "
                    "25000 output tokens"};
}

}  // namespace

int main() {
  const std::vector<std::pair<const char*, std::function<Outcome()>>> criteria = {
      {"SNR table", snr_table},
      {"generator soundness", generator_soundness},
      {"solver exactness on clean data", solver_exactness},
      {"confounder robustness", confounder_robustness},
      {"smoothing robustness floor", smoothing_floor},
      {"smoothing statistics", smoothing_statistics},
      {"gradient correctness", gradient_check},
      {"prompt fidelity", prompt_fidelity},
      {"random-chance harness", random_chance},
      {"model results (not reproducible at desk scale)", not_reproducible},
  };
  int failed = 0;
  for (std::size_t i = 0; i < criteria.size(); ++i) {
    const auto start = std::chrono::steady_clock::now();
    Outcome out;
    try {
      out = criteria[i].second();
    } catch (const std::exception& e) {
      out = {false, std::string("exception: ") + e.what()};
    }
    const double secs =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    failed += out.pass ? 0 : 1;
    std::printf("%s %2zu %s: %s (%.1fs)\n", out.pass ? "PASS" : "FAIL", i + 1, criteria[i].first,
                out.detail.c_str(), secs);
    std::fflush(stdout);
    if (i == 3) std::printf("     note: %s\n", confounder_ablation_small_range().c_str());
  }
  std::printf("%d/%zu criteria passed\n", static_cast<int>(criteria.size()) - failed,
              criteria.size());
  return failed == 0 ? 0 : 1;
}
