#include "ravenx/solver.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <limits>
#include <numeric>
#include <thread>

#include "ravenx/errors.hpp"
#include "ravenx/rng.hpp"

namespace ravenx {

namespace {

// Operand PMFs of the arithmetic rules only admit values >= 1.
SparseMeasure operand(const SparsePmf& p) {
  return pmf::restrict_to(p.measure(), 1, std::numeric_limits<int>::max());
}

// Law of the sum of the operand cells [first, last).
SparseMeasure operand_sum(std::span<const SparsePmf> cells, std::size_t first, std::size_t last) {
  SparseMeasure acc{{0, 1.0}};
  for (std::size_t i = first; i < last; ++i) {
    acc = pmf::convolve(acc, operand(cells[i]));
    if (acc.empty()) break;
  }
  return acc;
}

// Sum over v of prod_i p_i(v + step * i): every cell is moved back onto the
// first cell's coordinate and the measures are multiplied.
double aligned_mass(std::span<const SparsePmf> row, int step) {
  SparseMeasure acc = row[0].measure();
  for (std::size_t i = 1; i < row.size() && !acc.empty(); ++i) {
    acc = pmf::multiply(acc, pmf::shift(row[i].measure(), -step * static_cast<int>(i)));
  }
  return pmf::total_mass(acc);
}

double fit_row(RuleKind kind, std::span<const SparsePmf> row) {
  const auto g = row.size();
  switch (kind) {
    case RuleKind::Constant:
      return aligned_mass(row, 0);
    case RuleKind::ArithPlus:
      return pmf::dot(operand_sum(row, 0, g - 1), row[g - 1].measure());
    case RuleKind::ArithMinus: {
      // v1 = (v2 + ... + v_{g-1}) + v_g.
      const auto rest = pmf::convolve(operand_sum(row, 1, g - 1), row[g - 1].measure());
      return pmf::dot(row[0].measure(), rest);
    }
    case RuleKind::ProgPlus1:
    case RuleKind::ProgMinus1:
    case RuleKind::ProgPlus2:
    case RuleKind::ProgMinus2:
      return aligned_mass(row, progression_step(kind));
    case RuleKind::DistShiftLeft:
    case RuleKind::DistShiftRight:
      break;
  }
  return 0.0;
}

// Mass of assignments giving every position a distinct value, where
// position j takes value v with weight q_j(v). Positions whose supports do
// not overlap are independent, so the permanent-like sum factorizes over
// connected components; each component is summed exactly with a DP over
// subsets of its positions.
double distinct_assignment_mass(const std::vector<SparseMeasure>& q) {
  const std::size_t n = q.size();
  std::vector<std::size_t> parent(n);
  std::iota(parent.begin(), parent.end(), 0);
  auto find = [&](std::size_t x) {
    while (parent[x] != x) x = parent[x] = parent[parent[x]];
    return x;
  };
  std::vector<std::pair<int, std::size_t>> owners;
  for (std::size_t j = 0; j < n; ++j) {
    if (q[j].empty()) return 0.0;
    for (const auto& e : q[j]) owners.emplace_back(e.value, j);
  }
  std::sort(owners.begin(), owners.end());
  for (std::size_t i = 1; i < owners.size(); ++i) {
    if (owners[i].first == owners[i - 1].first) {
      parent[find(owners[i].second)] = find(owners[i - 1].second);
    }
  }

  double result = 1.0;
  std::vector<bool> done(n, false);
  for (std::size_t root_pos = 0; root_pos < n; ++root_pos) {
    const std::size_t root = find(root_pos);
    if (done[root]) continue;
    done[root] = true;
    std::vector<std::size_t> members;
    for (std::size_t j = 0; j < n; ++j) {
      if (find(j) == root) members.push_back(j);
    }
    if (members.size() == 1) {
      result *= pmf::total_mass(q[members.front()]);
      continue;
    }
    std::vector<int> values;
    for (auto j : members) {
      for (const auto& e : q[j]) values.push_back(e.value);
    }
    std::sort(values.begin(), values.end());
    values.erase(std::unique(values.begin(), values.end()), values.end());

    const std::size_t states = std::size_t{1} << members.size();
    std::vector<double> dp(states, 0.0);
    dp[0] = 1.0;
    for (int v : values) {
      std::vector<double> next = dp;
      for (std::size_t bit = 0; bit < members.size(); ++bit) {
        const auto& mj = q[members[bit]];
        auto it = std::lower_bound(mj.begin(), mj.end(), v,
                                   [](const PmfEntry& e, int x) { return e.value < x; });
        if (it == mj.end() || it->value != v) continue;
        const std::size_t flag = std::size_t{1} << bit;
        for (std::size_t mask = 0; mask < states; ++mask) {
          if ((mask & flag) == 0 && dp[mask] != 0.0) next[mask | flag] += dp[mask] * it->prob;
        }
      }
      dp = std::move(next);
    }
    result *= dp[states - 1];
    if (result == 0.0) break;
  }
  return result;
}

void check_rows(std::span<const SparsePmf> row1, std::span<const SparsePmf> row2) {
  if (row1.size() != row2.size()) throw DimensionError("rule_fit: rows differ in length");
  if (row1.size() < 3) throw DimensionError("rule_fit: rows need at least 3 cells");
  const int range = row1.front().range();
  auto same_range = [&](const SparsePmf& p) { return p.range() == range; };
  if (!std::all_of(row1.begin(), row1.end(), same_range) ||
      !std::all_of(row2.begin(), row2.end(), same_range)) {
    throw DimensionError("rule_fit: rows mix attribute ranges");
  }
}

double safe_log(double x) { return std::log(std::max(x, std::numeric_limits<double>::min())); }

}  // namespace

void SolverConfig::validate() const {
  if (!(entropy_floor > 0.0)) throw ConfigError("entropy floor must be positive");
  if (!(epsilon >= 0.0)) throw ConfigError("epsilon must be non-negative");
  for (double w : rule_priors) {
    if (!std::isfinite(w)) throw ConfigError("rule priors must be finite");
  }
}

void TrainConfig::validate() const {
  if (!(learning_rate >= 0.0) || !std::isfinite(learning_rate)) {
    throw ConfigError("learning rate must be finite and non-negative");
  }
  if (!(temperature > 0.0)) throw ConfigError("temperature must be positive");
  if (epochs < 0) throw ConfigError("epochs must be >= 0");
  if (batch_size < 0) throw ConfigError("batch size must be >= 0");
}

RuleVector softmax(const RuleVector& logits) {
  const double top = *std::max_element(logits.begin(), logits.end());
  RuleVector out{};
  double total = 0.0;
  for (std::size_t i = 0; i < kRuleCount; ++i) {
    out[i] = std::exp(logits[i] - top);
    total += out[i];
  }
  for (auto& v : out) v /= total;
  return out;
}

AttributeRows attribute_rows(const Puzzle& puzzle, std::size_t attribute) {
  AttributeRows out;
  out.range = puzzle.range_m;
  for (int r = 0; r < kRows; ++r) {
    const int cols = r == kRows - 1 ? puzzle.grid_cols - 1 : puzzle.grid_cols;
    auto& row = out.rows[static_cast<std::size_t>(r)];
    row.reserve(static_cast<std::size_t>(cols));
    for (int c = 0; c < cols; ++c) row.push_back(puzzle.cell(r, c).attribute(attribute));
  }
  return out;
}

double rule_fit(RuleKind kind, std::span<const SparsePmf> row1, std::span<const SparsePmf> row2) {
  check_rows(row1, row2);
  if (!is_distribute(kind)) return fit_row(kind, row1) * fit_row(kind, row2);
  const int cols = static_cast<int>(row1.size());
  std::vector<SparseMeasure> agree;
  agree.reserve(row1.size());
  for (int c = 0; c < cols; ++c) {
    const auto target = static_cast<std::size_t>(distribute_target(kind, c, cols));
    agree.push_back(pmf::multiply(row1[static_cast<std::size_t>(c)].measure(), row2[target].measure()));
  }
  return distinct_assignment_mass(agree);
}

ConfidenceVector confidence_from_fits(const RuleVector& fits, const SolverConfig& cfg) {
  ConfidenceVector out;
  const auto prior = softmax(cfg.rule_priors);
  double total = 0.0;
  for (std::size_t r = 0; r < kRuleCount; ++r) {
    out.s[r] = fits[r] * prior[r];
    total += out.s[r] + cfg.epsilon;
  }
  double entropy = 0.0;
  for (std::size_t r = 0; r < kRuleCount; ++r) {
    const double p = (out.s[r] + cfg.epsilon) / total;
    out.s_normalized[r] = p;
    if (p > 0.0) entropy -= p * std::log(p);
  }
  out.entropy = std::max(entropy, cfg.entropy_floor);
  return out;
}

ConfidenceVector abduce_confidence(const Puzzle& puzzle, std::size_t attribute,
                                   const SolverConfig& cfg) {
  const auto rows = attribute_rows(puzzle, attribute);
  RuleVector fits{};
  for (RuleKind k : kAllRules) fits[rule_index(k)] = rule_fit(k, rows.rows[0], rows.rows[1]);
  return confidence_from_fits(fits, cfg);
}

std::optional<SparsePmf> try_predict_pmf(RuleKind kind, const AttributeRows& rows) {
  const auto& row3 = rows.rows[2];
  const int m = rows.range;
  const std::size_t known = row3.size();
  switch (kind) {
    case RuleKind::Constant: {
      SparseMeasure acc = row3[0].measure();
      for (std::size_t i = 1; i < known && !acc.empty(); ++i) {
        acc = pmf::multiply(acc, row3[i].measure());
      }
      auto out = SparsePmf::normalized(acc, m);
      return out ? out : SparsePmf::uniform(m);
    }
    case RuleKind::ArithPlus:
      return SparsePmf::normalized(operand_sum(row3, 0, known), m);
    case RuleKind::ArithMinus:
      return SparsePmf::normalized(
          pmf::cross_correlate(row3[0].measure(), operand_sum(row3, 1, known)), m);
    case RuleKind::ProgPlus1:
    case RuleKind::ProgMinus1:
    case RuleKind::ProgPlus2:
    case RuleKind::ProgMinus2: {
      // Cell i predicts the last cell (column `known`) at v_i + step * (known - i).
      const int step = progression_step(kind);
      SparseMeasure acc;
      for (std::size_t i = 0; i < known; ++i) {
        auto moved = pmf::shift(row3[i].measure(), step * static_cast<int>(known - i));
        acc = i == 0 ? std::move(moved) : pmf::multiply(acc, moved);
        if (acc.empty()) return std::nullopt;
      }
      return SparsePmf::normalized(acc, m);
    }
    case RuleKind::DistShiftLeft:
    case RuleKind::DistShiftRight: {
      const int cols = static_cast<int>(rows.rows[0].size());
      return rows.rows[0][static_cast<std::size_t>(distribute_source_of_last(kind, cols))];
    }
  }
  return std::nullopt;
}

SparsePmf predict_pmf(RuleKind kind, const AttributeRows& rows) {
  auto out = try_predict_pmf(kind, rows);
  if (!out) {
    throw FeasibilityError("predict_pmf: rule " + std::string(rule_name(kind)) +
                           " leaves no mass inside the attribute range");
  }
  return *out;
}

PuzzleEvidence collect_evidence(const Puzzle& puzzle, bool include_confounders) {
  PuzzleEvidence out;
  out.answer_index = puzzle.answer_index;
  const std::size_t count = include_confounders
                                ? static_cast<std::size_t>(puzzle.attribute_count())
                                : static_cast<std::size_t>(kTrueAttributes);
  out.attributes.reserve(count);
  for (std::size_t a = 0; a < count; ++a) {
    const auto rows = attribute_rows(puzzle, a);
    AttributeEvidence ev;
    for (RuleKind k : kAllRules) {
      const auto r = rule_index(k);
      ev.fits[r] = rule_fit(k, rows.rows[0], rows.rows[1]);
      const auto prediction = try_predict_pmf(k, rows);
      for (std::size_t c = 0; c < kCandidates; ++c) {
        ev.agreement[r][c] =
            prediction ? pmf::dot(prediction->measure(), puzzle.candidates[c].attribute(a).measure())
                       : 0.0;
      }
    }
    out.attributes.push_back(ev);
  }
  return out;
}

ScoreResult score_evidence(const PuzzleEvidence& evidence, const SolverConfig& cfg) {
  ScoreResult out;
  out.confidences.reserve(evidence.attributes.size());
  for (const auto& attr : evidence.attributes) {
    auto conf = confidence_from_fits(attr.fits, cfg);
    const double weight = cfg.entropy_weighting ? 1.0 / conf.entropy : 1.0;
    for (std::size_t c = 0; c < kCandidates; ++c) {
      double s = 0.0;
      for (std::size_t r = 0; r < kRuleCount; ++r) s += conf.s_normalized[r] * attr.agreement[r][c];
      out.scores[c] += s * weight;
    }
    out.confidences.push_back(conf);
  }
  out.predicted_index = 0;
  for (std::size_t c = 1; c < kCandidates; ++c) {
    if (out.scores[c] > out.scores[static_cast<std::size_t>(out.predicted_index)]) {
      out.predicted_index = static_cast<int>(c);
    }
  }
  return out;
}

ScoreResult score_candidates(const Puzzle& puzzle, const SolverConfig& cfg) {
  cfg.validate();
  return score_evidence(collect_evidence(puzzle, cfg.include_confounders), cfg);
}

LossGradient loss_and_gradient(std::span<const PuzzleEvidence> batch, const SolverConfig& cfg,
                               double temperature) {
  LossGradient out;
  if (batch.empty()) return out;
  const auto prior = softmax(cfg.rule_priors);

  for (const auto& puzzle : batch) {
    const auto answer = static_cast<std::size_t>(puzzle.answer_index);
    for (const auto& attr : puzzle.attributes) {
      // Forward pass.
      RuleVector shifted{};
      double z_total = 0.0;
      for (std::size_t r = 0; r < kRuleCount; ++r) {
        shifted[r] = attr.fits[r] * prior[r] + cfg.epsilon;
        z_total += shifted[r];
      }
      RuleVector conf{};
      double raw_entropy = 0.0;
      for (std::size_t r = 0; r < kRuleCount; ++r) {
        conf[r] = shifted[r] / z_total;
        raw_entropy -= conf[r] * safe_log(conf[r]);
      }
      const bool clamped = raw_entropy < cfg.entropy_floor;
      const double entropy = clamped ? cfg.entropy_floor : raw_entropy;

      std::array<double, kCandidates> logits{};
      for (std::size_t c = 0; c < kCandidates; ++c) {
        double s = 0.0;
        for (std::size_t r = 0; r < kRuleCount; ++r) s += conf[r] * attr.agreement[r][c];
        logits[c] = s / temperature;
      }
      const double top = *std::max_element(logits.begin(), logits.end());
      double denom = 0.0;
      for (double z : logits) denom += std::exp(z - top);
      const double attr_loss = top + std::log(denom) - logits[answer];
      const double weight = cfg.entropy_weighting ? 1.0 / entropy : 1.0;
      out.loss += attr_loss * weight;

      // Backward pass: d/d conf_r.
      RuleVector grad_conf{};
      for (std::size_t c = 0; c < kCandidates; ++c) {
        const double dlogit =
            (std::exp(logits[c] - top) / denom - (c == answer ? 1.0 : 0.0)) / temperature;
        for (std::size_t r = 0; r < kRuleCount; ++r) {
          grad_conf[r] += weight * dlogit * attr.agreement[r][c];
        }
      }
      if (cfg.entropy_weighting && !clamped) {
        // d(L/H)/dH = -L/H^2 and dH/dconf_r = -(log conf_r + 1).
        for (std::size_t r = 0; r < kRuleCount; ++r) {
          grad_conf[r] += attr_loss / (entropy * entropy) * (safe_log(conf[r]) + 1.0);
        }
      }
      // Through the normalization conf = shifted / sum(shifted).
      double mean_grad = 0.0;
      for (std::size_t r = 0; r < kRuleCount; ++r) mean_grad += grad_conf[r] * conf[r];
      RuleVector grad_prior{};
      for (std::size_t r = 0; r < kRuleCount; ++r) {
        grad_prior[r] = attr.fits[r] * (grad_conf[r] - mean_grad) / z_total;
      }
      // Through the softmax of the logits.
      double prior_mean = 0.0;
      for (std::size_t r = 0; r < kRuleCount; ++r) prior_mean += grad_prior[r] * prior[r];
      for (std::size_t r = 0; r < kRuleCount; ++r) {
        out.gradient[r] += prior[r] * (grad_prior[r] - prior_mean);
      }
    }
  }
  const double n = static_cast<double>(batch.size());
  out.loss /= n;
  for (auto& g : out.gradient) g /= n;
  return out;
}

TrainResult train_rule_priors(std::span<const Puzzle> dataset, const TrainConfig& tcfg,
                              const SolverConfig& cfg) {
  tcfg.validate();
  cfg.validate();
  std::vector<PuzzleEvidence> evidence;
  evidence.reserve(dataset.size());
  for (const auto& p : dataset) evidence.push_back(collect_evidence(p, cfg.include_confounders));

  SolverConfig state = cfg;
  TrainResult out;
  auto full_loss = [&] {
    const double loss = loss_and_gradient(evidence, state, tcfg.temperature).loss;
    if (!std::isfinite(loss)) throw DivergenceError("training loss became non-finite");
    return loss;
  };
  out.loss_trace.push_back(full_loss());

  const std::size_t n = evidence.size();
  const std::size_t batch =
      tcfg.batch_size <= 0 ? n : std::min(n, static_cast<std::size_t>(tcfg.batch_size));
  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), 0);
  Rng rng(tcfg.seed);
  std::vector<PuzzleEvidence> chunk;
  for (int epoch = 0; epoch < tcfg.epochs && n > 0; ++epoch) {
    rng.shuffle(std::span<std::size_t>(order));
    for (std::size_t start = 0; start < n; start += batch) {
      chunk.clear();
      for (std::size_t i = start; i < std::min(n, start + batch); ++i) {
        chunk.push_back(evidence[order[i]]);
      }
      const auto step = loss_and_gradient(chunk, state, tcfg.temperature);
      for (std::size_t r = 0; r < kRuleCount; ++r) {
        state.rule_priors[r] -= tcfg.learning_rate * step.gradient[r];
        if (!std::isfinite(state.rule_priors[r])) {
          throw DivergenceError("rule priors became non-finite");
        }
      }
    }
    out.loss_trace.push_back(full_loss());
  }
  out.rule_priors = state.rule_priors;
  return out;
}

std::vector<EvalRecord> solve_dataset(std::span<const Puzzle> dataset, const SolverConfig& cfg,
                                      int threads) {
  cfg.validate();
  std::vector<EvalRecord> out(dataset.size());
  auto solve_range = [&](std::size_t first, std::size_t stride) {
    for (std::size_t i = first; i < dataset.size(); i += stride) {
      const auto start = std::chrono::steady_clock::now();
      const auto result = score_candidates(dataset[i], cfg);
      const auto stop = std::chrono::steady_clock::now();
      out[i] = score_choice(dataset[i], result.predicted_index);
      out[i].elapsed_ms = std::chrono::duration<double, std::milli>(stop - start).count();
    }
  };
  const auto workers = static_cast<std::size_t>(std::max(1, threads));
  if (workers == 1 || dataset.size() < 2) {
    solve_range(0, 1);
    return out;
  }
  {
    std::vector<std::jthread> pool;
    for (std::size_t w = 0; w < workers; ++w) pool.emplace_back(solve_range, w, workers);
  }
  return out;
}

}  // namespace ravenx
