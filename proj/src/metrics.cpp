#include "qc/metrics.hpp"

#include <algorithm>
#include <cmath>

#include "qc/errors.hpp"
#include "qc/parallel.hpp"
#include "qc/rng.hpp"
#include "qc/taxonomy.hpp"

namespace qc {

double average_precision(const std::vector<std::string>& ranked_codes,
                         const std::set<std::string>& gold_codes) {
  if (gold_codes.empty()) throw DataError("average_precision: empty gold set");
  double sum = 0.0;
  int hits = 0;
  for (std::size_t rank = 0; rank < ranked_codes.size(); ++rank) {
    if (gold_codes.count(ranked_codes[rank])) {
      ++hits;
      sum += static_cast<double>(hits) / static_cast<double>(rank + 1);
    }
  }
  return sum / static_cast<double>(gold_codes.size());
}

namespace {

std::set<std::string> gold_codes_at_level(const std::vector<LabelPath>& labels, int level) {
  std::set<std::string> codes;
  for (const auto& label : labels) codes.insert(truncate(label, level).leaf());
  return codes;
}

EvalReport rank_metric(const char* name, const std::vector<RankedPrediction>& predictions,
                       const GoldMap& gold, int level, bool strict,
                       double (*per_question)(const RankedPrediction&,
                                              const std::set<std::string>&)) {
  std::map<std::string, const RankedPrediction*> by_id;
  for (const auto& pred : predictions) by_id[pred.question_id] = &pred;

  EvalReport report;
  report.metric = name;
  report.level = level;
  double sum = 0.0;
  for (const auto& [id, labels] : gold) {
    auto it = by_id.find(id);
    if (it == by_id.end()) {
      if (strict) throw DataError(std::string(name) + ": no prediction for question " + id);
      continue;
    }
    double value = per_question(*it->second, gold_codes_at_level(labels, level));
    report.question_ids.push_back(id);
    report.per_question.push_back(value);
    sum += value;
  }
  report.n = static_cast<int>(report.per_question.size());
  report.value = report.n == 0 ? 0.0 : sum / report.n;
  return report;
}

}  // namespace

EvalReport map_score(const std::vector<RankedPrediction>& predictions, const GoldMap& gold,
                     int level, bool strict) {
  return rank_metric("MAP", predictions, gold, level, strict,
                     [](const RankedPrediction& pred, const std::set<std::string>& codes) {
                       std::vector<std::string> ranked;
                       ranked.reserve(pred.ranked.size());
                       for (const auto& entry : pred.ranked) ranked.push_back(entry.code);
                       return average_precision(ranked, codes);
                     });
}

EvalReport p_at_1(const std::vector<RankedPrediction>& predictions, const GoldMap& gold,
                  int level, bool strict) {
  return rank_metric("P@1", predictions, gold, level, strict,
                     [](const RankedPrediction& pred, const std::set<std::string>& codes) {
                       if (pred.ranked.empty()) return 0.0;
                       return codes.count(pred.ranked.front().code) ? 1.0 : 0.0;
                     });
}

namespace {

void require_aligned(const LabelSets& predicted, const LabelSets& gold, const char* what) {
  if (predicted.size() != gold.size()) throw DataError(std::string(what) + ": id sets differ");
  for (const auto& [id, labels] : gold) {
    if (!predicted.count(id)) throw DataError(std::string(what) + ": missing prediction for " + id);
  }
}

}  // namespace

double multilabel_micro_f1(const LabelSets& predicted, const LabelSets& gold) {
  require_aligned(predicted, gold, "micro_f1");
  long long tp = 0, fp = 0, fn = 0;
  for (const auto& [id, gold_set] : gold) {
    const auto& pred_set = predicted.at(id);
    for (const auto& label : pred_set) {
      if (gold_set.count(label)) {
        ++tp;
      } else {
        ++fp;
      }
    }
    for (const auto& label : gold_set) {
      if (!pred_set.count(label)) ++fn;
    }
  }
  const double denom = 2.0 * tp + fp + fn;
  return denom == 0.0 ? 1.0 : 2.0 * tp / denom;
}

double multilabel_accuracy(const LabelSets& predicted, const LabelSets& gold) {
  require_aligned(predicted, gold, "multilabel_accuracy");
  if (gold.empty()) return 1.0;
  double sum = 0.0;
  for (const auto& [id, gold_set] : gold) {
    const auto& pred_set = predicted.at(id);
    if (gold_set.empty() && pred_set.empty()) {
      sum += 1.0;
      continue;
    }
    long long intersection = 0;
    for (const auto& label : pred_set) {
      if (gold_set.count(label)) ++intersection;
    }
    const long long union_size =
        static_cast<long long>(gold_set.size() + pred_set.size()) - intersection;
    sum += static_cast<double>(intersection) / static_cast<double>(union_size);
  }
  return sum / static_cast<double>(gold.size());
}

double cohens_kappa(const AnnotationSet& annotator_a, const AnnotationSet& annotator_b,
                    int level) {
  if (annotator_a.size() != annotator_b.size()) {
    throw DataError("cohens_kappa: annotators cover different question sets");
  }
  for (const auto& [id, labels] : annotator_a) {
    if (!annotator_b.count(id)) {
      throw DataError("cohens_kappa: question " + id + " missing for second annotator");
    }
  }

  // Placeholder labels are annotator-specific so they can never agree, by
  // construction or by chance.
  const std::string placeholder_a = "\x01<unspecified:a>";
  const std::string placeholder_b = "\x01<unspecified:b>";

  long long evaluations = 0;
  long long agreements = 0;
  std::map<std::string, long long> marginal_a;
  std::map<std::string, long long> marginal_b;

  auto truncated_keys = [&](const std::vector<LabelPath>& labels) {
    std::vector<std::string> keys;
    for (const auto& label : labels) keys.push_back(truncate(label, level).leaf());
    std::sort(keys.begin(), keys.end());
    return keys;
  };

  for (const auto& [id, labels_a] : annotator_a) {
    std::vector<std::string> keys_a = truncated_keys(labels_a);
    std::vector<std::string> keys_b = truncated_keys(annotator_b.at(id));

    // Greedy maximum-agreement pairing = multiset intersection; leftovers are
    // paired with each other, and a length mismatch pads with placeholders.
    std::multiset<std::string> remaining_b(keys_b.begin(), keys_b.end());
    std::vector<std::string> unmatched_a;
    long long matched = 0;
    for (const auto& key : keys_a) {
      auto it = remaining_b.find(key);
      if (it != remaining_b.end()) {
        remaining_b.erase(it);
        ++matched;
        ++marginal_a[key];
        ++marginal_b[key];
        ++agreements;
        ++evaluations;
      } else {
        unmatched_a.push_back(key);
      }
    }
    std::vector<std::string> unmatched_b(remaining_b.begin(), remaining_b.end());
    const std::size_t pairs = std::max(unmatched_a.size(), unmatched_b.size());
    for (std::size_t i = 0; i < pairs; ++i) {
      const std::string& key_a = i < unmatched_a.size() ? unmatched_a[i] : placeholder_a;
      const std::string& key_b = i < unmatched_b.size() ? unmatched_b[i] : placeholder_b;
      ++marginal_a[key_a];
      ++marginal_b[key_b];
      ++evaluations;
    }
  }

  if (evaluations == 0) throw DataError("cohens_kappa: no evaluations");
  const double n = static_cast<double>(evaluations);
  const double p_observed = static_cast<double>(agreements) / n;
  double p_expected = 0.0;
  for (const auto& [key, count_a] : marginal_a) {
    auto it = marginal_b.find(key);
    if (it == marginal_b.end()) continue;
    p_expected += (count_a / n) * (it->second / n);
  }
  if (1.0 - p_expected == 0.0) return p_observed == 1.0 ? 1.0 : 0.0;
  return (p_observed - p_expected) / (1.0 - p_expected);
}

SignificanceResult bootstrap_significance(const std::vector<double>& scores_a,
                                          const std::vector<double>& scores_b, int n_resamples,
                                          std::uint64_t seed, int threads) {
  if (scores_a.size() != scores_b.size()) {
    throw DataError("bootstrap_significance: score arrays differ in length");
  }
  if (scores_a.empty()) throw DataError("bootstrap_significance: empty score arrays");
  if (n_resamples < 1) throw DataError("bootstrap_significance: need at least one resample");

  const std::size_t n = scores_a.size();
  std::vector<double> delta(n);
  for (std::size_t i = 0; i < n; ++i) delta[i] = scores_b[i] - scores_a[i];

  std::vector<std::uint8_t> not_better(static_cast<std::size_t>(n_resamples), 0);
  parallel_for(static_cast<std::size_t>(n_resamples), threads, [&](std::size_t r) {
    SplitMix64 rng(mix_seed(seed, static_cast<std::uint64_t>(r)));
    double sum = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
      sum += delta[static_cast<std::size_t>(rng.next_below(n))];
    }
    not_better[r] = sum <= 0.0 ? 1 : 0;
  });

  long long count = 0;
  for (std::uint8_t flag : not_better) count += flag;

  SignificanceResult result;
  result.resamples = n_resamples;
  result.p_value = static_cast<double>(count) / static_cast<double>(n_resamples);
  result.statistic = "one-sided paired bootstrap of mean(B) - mean(A)";
  return result;
}

double fisher_combine(const std::vector<double>& p_values) {
  if (p_values.empty()) throw DataError("fisher_combine: need at least one p-value");
  double statistic = 0.0;
  for (double p : p_values) {
    if (p <= 0.0 || p > 1.0) throw DataError("fisher_combine: p-values must be in (0, 1]");
    statistic += -2.0 * std::log(p);
  }
  // Chi-squared survival with 2k df: exp(-x/2) * sum_{i<k} (x/2)^i / i!.
  const double half = statistic / 2.0;
  const std::size_t k = p_values.size();
  double p;
  if (half < 350.0) {
    double term = 1.0;
    double sum = 1.0;
    for (std::size_t i = 1; i < k; ++i) {
      term *= half / static_cast<double>(i);
      sum += term;
    }
    p = std::exp(-half) * sum;
  } else {
    // Large statistics overflow the direct series; sum it in log space.
    std::vector<double> log_terms(k);
    for (std::size_t i = 0; i < k; ++i) {
      log_terms[i] = static_cast<double>(i) * std::log(half) - std::lgamma(i + 1.0);
    }
    const double peak = *std::max_element(log_terms.begin(), log_terms.end());
    double sum = 0.0;
    for (double lt : log_terms) sum += std::exp(lt - peak);
    p = std::exp(-half + peak + std::log(sum));
  }
  return std::min(1.0, std::max(0.0, p));
}

}  // namespace qc
