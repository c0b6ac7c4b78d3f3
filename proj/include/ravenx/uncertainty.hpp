#pragma once

#include <cstdint>

#include "ravenx/pmf.hpp"
#include "ravenx/puzzle.hpp"
#include "ravenx/rng.hpp"

namespace ravenx {

/// Simulated perception noise. smoothing.param is p_L in (0.5, 1] for Bins
/// and sigma > 0 for Gaussian.
struct UncertaintyConfig {
  int n_confounders = 0;
  Smoothing smoothing;
  std::uint64_t seed = 0;
  /// Smooth confounder PMFs as well as the true attributes.
  bool smooth_confounders = true;

  void validate() const;
};

/// Adds k confounders to every context panel and candidate, each value drawn
/// i.i.d. uniformly from [0, m-1]. True attributes are left untouched.
Puzzle inject_confounders(const Puzzle& puzzle, int k, Rng& rng);

/// Signal-to-noise ratio 10 log10(3 / k) in dB; +inf for k == 0.
double snr_db(int k);

/// Three-bin smoothing of a degenerate PMF at T: p(T) ~ U(p_L, 1),
/// p(N1) ~ U(0, 1 - p(T)), p(N2) = 1 - p(T) - p(N1). N1/N2 are T-1/T+1,
/// or the two values on the inner side when T sits on a range boundary.
SparsePmf smooth_bins(const SparsePmf& pmf, double p_low, Rng& rng);

/// Discretized Gaussian centred on the true value, truncated below 1e-12
/// mass and renormalized over the range.
SparsePmf smooth_gaussian(const SparsePmf& pmf, double sigma);

/// Confounders first, then smoothing of every PMF in context and candidates.
/// The random stream depends only on (cfg.seed, puzzle.seed).
Puzzle apply_uncertainty(const Puzzle& puzzle, const UncertaintyConfig& cfg);

}  // namespace ravenx
