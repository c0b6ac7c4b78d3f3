#pragma once

#include <array>
#include <cstdint>
#include <optional>
#include <span>
#include <vector>

#include "ravenx/pmf.hpp"
#include "ravenx/puzzle.hpp"
#include "ravenx/rules.hpp"

namespace ravenx {

using RuleVector = std::array<double, kRuleCount>;

struct SolverConfig {
  /// Divide each attribute's score by the entropy of its rule confidence.
  bool entropy_weighting = true;
  /// Lower clamp of the entropy, keeps one-hot confidences finite.
  double entropy_floor = 1e-3;
  /// Additive smoothing applied before normalizing the confidence vector.
  double epsilon = 1e-9;
  /// Rule prior logits; softmax(rule_priors) multiplies the rule fits.
  RuleVector rule_priors{};
  /// Let confounder attributes contribute to the score (and loss).
  bool include_confounders = true;

  void validate() const;
};

struct TrainConfig {
  double learning_rate = 0.1;
  int epochs = 50;
  /// 0 means full batch.
  int batch_size = 0;
  double temperature = 1.0;
  std::uint64_t seed = 0;

  void validate() const;
};

/// Rule confidence for one attribute: raw s, normalized s and its entropy.
struct ConfidenceVector {
  RuleVector s{};
  RuleVector s_normalized{};
  double entropy = 0.0;
};

/// PMFs of one attribute arranged by row. Rows 0 and 1 hold g cells, row 2
/// holds the g-1 visible cells.
struct AttributeRows {
  std::array<std::vector<SparsePmf>, kRows> rows;
  int range = 0;
};

AttributeRows attribute_rows(const Puzzle& puzzle, std::size_t attribute);

/// Probability mass of the value assignments of rows 1-2 that are consistent
/// with the rule, under independent panel marginals. Equals 1 on degenerate
/// rows that satisfy the rule and 0 when no consistent assignment exists.
double rule_fit(RuleKind kind, std::span<const SparsePmf> row1, std::span<const SparsePmf> row2);

/// Confidence from precomputed fits: s_r = fit_r * softmax(w)_r.
ConfidenceVector confidence_from_fits(const RuleVector& fits, const SolverConfig& cfg);

ConfidenceVector abduce_confidence(const Puzzle& puzzle, std::size_t attribute,
                                   const SolverConfig& cfg);

/// Distribution of the missing cell under a rule, or nullopt when the rule
/// leaves no mass inside the range.
std::optional<SparsePmf> try_predict_pmf(RuleKind kind, const AttributeRows& rows);

/// As try_predict_pmf, throwing FeasibilityError on an empty prediction.
SparsePmf predict_pmf(RuleKind kind, const AttributeRows& rows);

/// Everything about one attribute the scoring needs that does not depend on
/// the rule priors: rule fits and rule-prediction / candidate agreements.
struct AttributeEvidence {
  RuleVector fits{};
  /// agreement[r][c] = <predict_pmf(r), candidate c's PMF>.
  std::array<std::array<double, kCandidates>, kRuleCount> agreement{};
};

struct PuzzleEvidence {
  std::vector<AttributeEvidence> attributes;
  int answer_index = 0;
};

PuzzleEvidence collect_evidence(const Puzzle& puzzle, bool include_confounders);

struct ScoreResult {
  std::array<double, kCandidates> scores{};
  int predicted_index = 0;
  /// One entry per scored attribute (true attributes first).
  std::vector<ConfidenceVector> confidences;
};

ScoreResult score_evidence(const PuzzleEvidence& evidence, const SolverConfig& cfg);

/// Entropy-weighted candidate scores; argmax with lowest-index tie-break.
ScoreResult score_candidates(const Puzzle& puzzle, const SolverConfig& cfg);

struct LossGradient {
  double loss = 0.0;
  RuleVector gradient{};
};

/// Mean over puzzles of sum_attr L_attr / H(s_attr), with
/// L_attr = -log softmax_c(S_attr(c) / temperature) at the answer, and its
/// exact gradient with respect to cfg.rule_priors.
LossGradient loss_and_gradient(std::span<const PuzzleEvidence> batch, const SolverConfig& cfg,
                               double temperature);

struct TrainResult {
  RuleVector rule_priors{};
  /// Full-dataset loss before training and after every epoch.
  std::vector<double> loss_trace;
};

/// Gradient descent on the rule priors. Throws DivergenceError when the loss
/// stops being finite.
TrainResult train_rule_priors(std::span<const Puzzle> dataset, const TrainConfig& tcfg,
                              const SolverConfig& cfg);

RuleVector softmax(const RuleVector& logits);

/// Solves every puzzle, recording the choice and wall-clock per puzzle.
/// Results are in dataset order regardless of `threads`.
std::vector<EvalRecord> solve_dataset(std::span<const Puzzle> dataset, const SolverConfig& cfg,
                                      int threads = 1);

}  // namespace ravenx
