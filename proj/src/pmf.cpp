#include "ravenx/pmf.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "ravenx/errors.hpp"

namespace ravenx {

SparsePmf::SparsePmf(std::vector<PmfEntry> entries, int range)
    : entries_(std::move(entries)), range_(range) {
  if (range_ < 1) {
    throw InvariantError("pmf: range must be >= 1");
  }
  if (entries_.empty()) {
    throw InvariantError("pmf: empty support");
  }
  std::sort(entries_.begin(), entries_.end(),
            [](const PmfEntry& a, const PmfEntry& b) { return a.value < b.value; });
  double total = 0.0;
  for (std::size_t i = 0; i < entries_.size(); ++i) {
    const auto& e = entries_[i];
    if (e.value < 0 || e.value >= range_) {
      std::ostringstream msg;
      msg << "pmf: value " << e.value << " outside [0, " << range_ - 1 << "]";
      throw InvariantError(msg.str());
    }
    if (i > 0 && entries_[i - 1].value == e.value) {
      throw InvariantError("pmf: duplicate value " + std::to_string(e.value));
    }
    if (!(e.prob > 0.0) || e.prob > 1.0 + kSumTolerance) {
      throw InvariantError("pmf: probability of value " + std::to_string(e.value) +
                           " must lie in (0, 1]");
    }
    total += e.prob;
  }
  if (std::abs(total - 1.0) > kSumTolerance) {
    std::ostringstream msg;
    msg.precision(12);
    msg << "pmf: probabilities sum to " << total << ", expected 1";
    throw InvariantError(msg.str());
  }
}

SparsePmf SparsePmf::degenerate(int value, int range) {
  return SparsePmf({{value, 1.0}}, range);
}

SparsePmf SparsePmf::uniform(int range) {
  std::vector<PmfEntry> entries(static_cast<std::size_t>(range));
  const double p = 1.0 / range;
  for (int v = 0; v < range; ++v) entries[static_cast<std::size_t>(v)] = {v, p};
  return SparsePmf(std::move(entries), range);
}

std::optional<SparsePmf> SparsePmf::normalized(const SparseMeasure& measure, int range) {
  auto inside = pmf::restrict_to(measure, 0, range - 1);
  const double total = pmf::total_mass(inside);
  if (!(total > 0.0) || !std::isfinite(total)) return std::nullopt;
  for (auto& e : inside) e.prob /= total;
  // Underflowed entries would violate the positivity invariant.
  std::erase_if(inside, [](const PmfEntry& e) { return !(e.prob > 0.0); });
  return SparsePmf(std::move(inside), range);
}

double SparsePmf::prob(int value) const {
  auto it = std::lower_bound(entries_.begin(), entries_.end(), value,
                             [](const PmfEntry& e, int v) { return e.value < v; });
  return (it != entries_.end() && it->value == value) ? it->prob : 0.0;
}

int SparsePmf::mode() const {
  const PmfEntry* best = &entries_.front();
  for (const auto& e : entries_) {
    if (e.prob > best->prob) best = &e;
  }
  return best->value;
}

namespace pmf {

namespace {

// Accumulates pairwise products into a dense buffer spanning the result
// support; sparse inputs keep that span small.
template <typename Combine>
SparseMeasure pairwise(const SparseMeasure& a, const SparseMeasure& b, Combine combine) {
  if (a.empty() || b.empty()) return {};
  int lo = combine(a.front().value, b.front().value);
  int hi = lo;
  for (int x : {a.front().value, a.back().value}) {
    for (int y : {b.front().value, b.back().value}) {
      lo = std::min(lo, combine(x, y));
      hi = std::max(hi, combine(x, y));
    }
  }
  std::vector<double> acc(static_cast<std::size_t>(hi - lo + 1), 0.0);
  for (const auto& x : a) {
    for (const auto& y : b) {
      acc[static_cast<std::size_t>(combine(x.value, y.value) - lo)] += x.prob * y.prob;
    }
  }
  SparseMeasure out;
  for (std::size_t i = 0; i < acc.size(); ++i) {
    if (acc[i] > 0.0) out.push_back({lo + static_cast<int>(i), acc[i]});
  }
  return out;
}

}  // namespace

SparseMeasure convolve(const SparseMeasure& a, const SparseMeasure& b) {
  return pairwise(a, b, [](int x, int y) { return x + y; });
}

SparseMeasure cross_correlate(const SparseMeasure& a, const SparseMeasure& b) {
  return pairwise(a, b, [](int x, int y) { return x - y; });
}

SparseMeasure multiply(const SparseMeasure& a, const SparseMeasure& b) {
  SparseMeasure out;
  auto ia = a.begin();
  auto ib = b.begin();
  while (ia != a.end() && ib != b.end()) {
    if (ia->value < ib->value) {
      ++ia;
    } else if (ib->value < ia->value) {
      ++ib;
    } else {
      const double p = ia->prob * ib->prob;
      if (p > 0.0) out.push_back({ia->value, p});
      ++ia;
      ++ib;
    }
  }
  return out;
}

SparseMeasure shift(const SparseMeasure& a, int offset) {
  SparseMeasure out = a;
  for (auto& e : out) e.value += offset;
  return out;
}

SparseMeasure restrict_to(const SparseMeasure& a, int lo, int hi) {
  SparseMeasure out;
  for (const auto& e : a) {
    if (e.value >= lo && e.value <= hi) out.push_back(e);
  }
  return out;
}

double dot(const SparseMeasure& a, const SparseMeasure& b) {
  double acc = 0.0;
  auto ia = a.begin();
  auto ib = b.begin();
  while (ia != a.end() && ib != b.end()) {
    if (ia->value < ib->value) {
      ++ia;
    } else if (ib->value < ia->value) {
      ++ib;
    } else {
      acc += ia->prob * ib->prob;
      ++ia;
      ++ib;
    }
  }
  return acc;
}

double total_mass(const SparseMeasure& a) {
  double acc = 0.0;
  for (const auto& e : a) acc += e.prob;
  return acc;
}

}  // namespace pmf
}  // namespace ravenx
