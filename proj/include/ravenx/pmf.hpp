#pragma once

#include <optional>
#include <span>
#include <vector>

namespace ravenx {

/// One support point of a discrete distribution over attribute values.
struct PmfEntry {
  int value = 0;
  double prob = 0.0;

  friend bool operator==(const PmfEntry&, const PmfEntry&) = default;
};

/// Non-negative, not necessarily normalized, sparse measure over integers,
/// sorted by value with no duplicates and no zero entries. Intermediate
/// results of PMF arithmetic (convolutions, products) live in this form.
using SparseMeasure = std::vector<PmfEntry>;

/// Discrete probability mass function over [0, range - 1] with sparse support.
///
/// Invariants (checked on construction, InvariantError otherwise): values are
/// distinct and inside the range, every stored probability is > 0, and the
/// probabilities sum to 1 within 1e-9. Entries are kept sorted by value.
class SparsePmf {
 public:
  static constexpr double kSumTolerance = 1e-9;

  SparsePmf(std::vector<PmfEntry> entries, int range);

  static SparsePmf degenerate(int value, int range);
  static SparsePmf uniform(int range);

  /// Normalizes a measure restricted to [0, range - 1]. Returns nullopt when
  /// no mass is left inside the range.
  static std::optional<SparsePmf> normalized(const SparseMeasure& measure, int range);

  std::span<const PmfEntry> entries() const { return entries_; }
  int range() const { return range_; }
  std::size_t size() const { return entries_.size(); }
  bool is_degenerate() const { return entries_.size() == 1; }

  double prob(int value) const;

  /// Most probable value; ties resolve to the smallest value.
  int mode() const;

  const SparseMeasure& measure() const { return entries_; }

  friend bool operator==(const SparsePmf&, const SparsePmf&) = default;

 private:
  std::vector<PmfEntry> entries_;
  int range_ = 0;
};

namespace pmf {

/// Sum-distribution of two independent measures: (a*b)(v) = sum_u a(u) b(v-u).
SparseMeasure convolve(const SparseMeasure& a, const SparseMeasure& b);

/// Difference-distribution: (a ⋆ b)(v) = sum_u a(v+u) b(u), i.e. the law of
/// X - Y for X ~ a, Y ~ b.
SparseMeasure cross_correlate(const SparseMeasure& a, const SparseMeasure& b);

/// Point-wise product a(v) b(v).
SparseMeasure multiply(const SparseMeasure& a, const SparseMeasure& b);

/// Translates every support point by offset.
SparseMeasure shift(const SparseMeasure& a, int offset);

/// Keeps only the entries with lo <= value <= hi.
SparseMeasure restrict_to(const SparseMeasure& a, int lo, int hi);

/// sum_v a(v) b(v).
double dot(const SparseMeasure& a, const SparseMeasure& b);

double total_mass(const SparseMeasure& a);

}  // namespace pmf
}  // namespace ravenx
