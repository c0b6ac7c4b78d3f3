#include "ravenx/uncertainty.hpp"

#include <cmath>
#include <limits>

#include "ravenx/errors.hpp"

namespace ravenx {

namespace {

constexpr double kGaussianCutoff = 1e-12;

int degenerate_value(const SparsePmf& pmf, const char* who) {
  if (!pmf.is_degenerate()) {
    throw PreconditionError(std::string(who) + ": input PMF must be degenerate");
  }
  return pmf.entries().front().value;
}

}  // namespace

void UncertaintyConfig::validate() const {
  if (n_confounders < 0) throw ConfigError("number of confounders must be >= 0");
  switch (smoothing.kind) {
    case SmoothingKind::None:
      break;
    case SmoothingKind::Bins:
      if (!(smoothing.param > 0.5 && smoothing.param <= 1.0)) {
        throw ConfigError("p_L must lie in (0.5, 1]");
      }
      break;
    case SmoothingKind::Gaussian:
      if (!(smoothing.param > 0.0) || !std::isfinite(smoothing.param)) {
        throw ConfigError("sigma must be positive");
      }
      break;
  }
}

Puzzle inject_confounders(const Puzzle& puzzle, int k, Rng& rng) {
  if (k < 0) throw ConfigError("number of confounders must be >= 0");
  Puzzle out = puzzle;
  if (k == 0) return out;
  const int m = out.range_m;
  auto extend = [&](Panel& panel) {
    for (int j = 0; j < k; ++j) {
      panel.confounders.push_back(
          SparsePmf::degenerate(static_cast<int>(rng.uniform_int(0, m - 1)), m));
    }
  };
  for (auto& panel : out.context) extend(panel);
  for (auto& panel : out.candidates) extend(panel);
  out.n_confounders += k;
  return out;
}

double snr_db(int k) {
  if (k <= 0) return std::numeric_limits<double>::infinity();
  return 10.0 * std::log10(3.0 / static_cast<double>(k));
}

SparsePmf smooth_bins(const SparsePmf& pmf, double p_low, Rng& rng) {
  const int t = degenerate_value(pmf, "smooth_bins");
  const int m = pmf.range();
  if (m < 3) throw PreconditionError("smooth_bins: range must hold three bins");
  const double p_true = rng.uniform(p_low, 1.0);
  const double p_n1 = rng.uniform(0.0, 1.0 - p_true);
  const double p_n2 = std::max(0.0, 1.0 - p_true - p_n1);

  int n1 = t - 1;
  int n2 = t + 1;
  if (t == 0) {
    n1 = t + 1;
    n2 = t + 2;
  } else if (t == m - 1) {
    n1 = t - 1;
    n2 = t - 2;
  }
  std::vector<PmfEntry> entries{{t, p_true}};
  if (p_n1 > 0.0) entries.push_back({n1, p_n1});
  if (p_n2 > 0.0) entries.push_back({n2, p_n2});
  // Renormalize to absorb rounding in 1 - p_true - p_n1.
  auto normalized = SparsePmf::normalized(entries, m);
  return *normalized;
}

SparsePmf smooth_gaussian(const SparsePmf& pmf, double sigma) {
  const int t = degenerate_value(pmf, "smooth_gaussian");
  const int m = pmf.range();
  if (!(sigma > 0.0)) throw ConfigError("sigma must be positive");
  // Relative weights exp(-d^2 / (2 sigma^2)); the normalized mass of offset d
  // is at most its weight relative to the peak, so stop once that drops
  // below the cutoff.
  SparseMeasure weights{{t, 1.0}};
  const double denom = 2.0 * sigma * sigma;
  for (int d = 1; d < m; ++d) {
    const double w = std::exp(-static_cast<double>(d) * d / denom);
    if (w < kGaussianCutoff) break;
    if (t - d >= 0) weights.insert(weights.begin(), {t - d, w});
    if (t + d < m) weights.push_back({t + d, w});
  }
  const double total = pmf::total_mass(weights);
  std::erase_if(weights, [&](const PmfEntry& e) { return e.prob / total < kGaussianCutoff; });
  return *SparsePmf::normalized(weights, m);
}

Puzzle apply_uncertainty(const Puzzle& puzzle, const UncertaintyConfig& cfg) {
  cfg.validate();
  if (!puzzle.is_clean()) {
    throw PreconditionError("apply_uncertainty: puzzle " + puzzle.puzzle_id +
                            " already carries non-degenerate PMFs");
  }
  Rng rng(derive_seed(cfg.seed, puzzle.seed));
  Puzzle out = inject_confounders(puzzle, cfg.n_confounders, rng);
  out.smoothing = cfg.smoothing;
  if (cfg.smoothing.kind == SmoothingKind::None) return out;

  auto smooth = [&](const SparsePmf& p) {
    return cfg.smoothing.kind == SmoothingKind::Bins ? smooth_bins(p, cfg.smoothing.param, rng)
                                                     : smooth_gaussian(p, cfg.smoothing.param);
  };
  auto smooth_panel = [&](Panel& panel) {
    for (auto& p : panel.true_attrs) p = smooth(p);
    if (cfg.smooth_confounders) {
      for (auto& p : panel.confounders) p = smooth(p);
    }
  };
  for (auto& panel : out.context) smooth_panel(panel);
  for (auto& panel : out.candidates) smooth_panel(panel);
  return out;
}

}  // namespace ravenx
