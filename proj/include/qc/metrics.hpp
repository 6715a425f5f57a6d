#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include "qc/corpus.hpp"
#include "qc/features.hpp"

namespace qc {

struct EvalReport {
  std::string metric;
  int level = 0;
  double value = 0.0;
  std::vector<std::string> question_ids;   // aligned with per_question
  std::vector<double> per_question;
  int n = 0;
  std::optional<double> p_value;
};

struct SignificanceResult {
  double p_value = 1.0;
  int resamples = 0;
  std::string statistic;
};

// Ranked predictions for one question at one level (scores non-increasing,
// exact ties broken by ascending label code).
struct RankedPrediction {
  std::string question_id;
  int level = 0;
  std::vector<ScoredLabel> ranked;
};

// AP = (1/|gold|) * sum over gold labels of precision at that label's rank.
// Gold labels absent from the ranking contribute zero.
double average_precision(const std::vector<std::string>& ranked_codes,
                         const std::set<std::string>& gold_codes);

// Gold labels are truncated to `level` before matching on their leaf codes.
EvalReport map_score(const std::vector<RankedPrediction>& predictions, const GoldMap& gold,
                     int level, bool strict = true);

// Hit when the top-ranked label is in the (possibly 2-element) gold set.
EvalReport p_at_1(const std::vector<RankedPrediction>& predictions, const GoldMap& gold,
                  int level, bool strict = true);

using LabelSets = std::map<std::string, std::set<std::string>>;

// Pooled label-instance TP/FP/FN across questions.
double multilabel_micro_f1(const LabelSets& predicted, const LabelSets& gold);

// Mean over questions of |pred ∩ gold| / |pred ∪ gold| (1 when both empty).
double multilabel_accuracy(const LabelSets& predicted, const LabelSets& gold);

// Chance-corrected agreement with the multi-label convention: per question,
// label multisets (truncated to `level`) are greedily paired for maximum
// agreement and the shorter list is padded with an annotator-specific
// never-matching placeholder; expected agreement comes from per-annotator
// marginals over the paired evaluations.
double cohens_kappa(const AnnotationSet& annotator_a, const AnnotationSet& annotator_b, int level);

// Paired one-sided bootstrap over per-question scores: p = proportion of
// resamples where mean(B) - mean(A) <= 0 (ties count against B). Resamples
// use counter-based seeds, so the result is independent of thread count.
SignificanceResult bootstrap_significance(const std::vector<double>& scores_a,
                                          const std::vector<double>& scores_b,
                                          int n_resamples = 10000, std::uint64_t seed = 13,
                                          int threads = 1);

// Fisher's method: X = -2 * sum(ln p_i) against chi-squared with 2k df,
// evaluated with the exact even-df closed form.
double fisher_combine(const std::vector<double>& p_values);

}  // namespace qc
