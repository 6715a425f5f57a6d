#include "qc/analysis.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <set>
#include <unordered_map>

#include "qc/errors.hpp"
#include "qc/features.hpp"

namespace qc {

CategoryReport per_category_report(const std::map<std::string, bool>& qa_correct,
                                   const GoldMap& gold, const Taxonomy& taxonomy, int level,
                                   int min_n) {
  CategoryReport report;
  report.level = level;
  report.min_n = min_n;

  std::map<LabelPath, std::pair<int, int>> groups;  // category -> (correct, n)
  long long correct_total = 0;
  for (const auto& [id, correct] : qa_correct) {
    correct_total += correct ? 1 : 0;
    ++report.n_questions;
    auto it = gold.find(id);
    if (it == gold.end()) continue;
    std::set<LabelPath> categories;
    for (const auto& label : it->second) categories.insert(truncate(label, level));
    for (const auto& category : categories) {
      auto& [hits, n] = groups[category];
      hits += correct ? 1 : 0;
      ++n;
    }
  }
  report.overall_accuracy =
      report.n_questions == 0 ? 0.0 : static_cast<double>(correct_total) / report.n_questions;

  for (const auto& [category, counts] : groups) {
    CategoryRow row;
    row.category = category;
    row.display = taxonomy.definition_chain(category);
    row.n = counts.second;
    row.accuracy = static_cast<double>(counts.first) / counts.second;
    row.below_floor = row.n < min_n;
    report.rows.push_back(std::move(row));
  }
  std::sort(report.rows.begin(), report.rows.end(), [](const CategoryRow& a, const CategoryRow& b) {
    if (a.accuracy != b.accuracy) return a.accuracy > b.accuracy;
    if (a.n != b.n) return a.n > b.n;
    return a.category < b.category;
  });
  return report;
}

std::string category_report_tsv(const CategoryReport& report) {
  std::string out = "category\tcode\taccuracy\tn\tflag\n";
  char buf[64];
  for (const auto& row : report.rows) {
    std::snprintf(buf, sizeof(buf), "%.4f\t%d", row.accuracy, row.n);
    out += row.display + "\t" + row.category.leaf() + "\t" + buf +
           (row.below_floor ? "\tlow_n" : "\t-") + "\n";
  }
  std::snprintf(buf, sizeof(buf), "%.4f\t%d", report.overall_accuracy, report.n_questions);
  out += std::string("OVERALL\t-\t") + buf + "\t-\n";
  return out;
}

namespace {

// Tokens of every node name + definition along the label path.
std::set<std::string> label_text_tokens(const LabelPath& label, const Taxonomy& taxonomy) {
  std::set<std::string> tokens;
  for (const auto& code : label.codes) {
    const TaxonomyNode& node = taxonomy.node(code);
    for (const auto& tok : tokenize(node.name)) tokens.insert(tok);
    for (const auto& tok : tokenize(node.definition)) tokens.insert(tok);
  }
  return tokens;
}

bool distance1_from_any(const LabelPath& predicted, const std::vector<LabelPath>& gold) {
  for (const auto& g : gold) {
    if (g.length() != predicted.length() || predicted.length() < 1) continue;
    if (g.codes.back() == predicted.codes.back()) continue;
    bool same_prefix =
        std::equal(g.codes.begin(), g.codes.end() - 1, predicted.codes.begin());
    if (same_prefix) return true;
  }
  return false;
}

bool prefix_of_any(const LabelPath& predicted, const std::vector<LabelPath>& gold) {
  for (const auto& g : gold) {
    const int common = std::min(predicted.length(), g.length());
    if (predicted.length() == g.length()) continue;  // proper prefix only
    if (std::equal(predicted.codes.begin(), predicted.codes.begin() + common,
                   g.codes.begin())) {
      return true;
    }
  }
  return false;
}

}  // namespace

ErrorBreakdown qc_error_breakdown(const std::vector<RankedPrediction>& predictions,
                                  const GoldMap& gold, const Taxonomy& taxonomy,
                                  const std::vector<Question>& questions) {
  std::map<std::string, const Question*> question_by_id;
  for (const auto& q : questions) question_by_id[q.id] = &q;

  // idf over the candidate texts of the evaluated questions.
  std::unordered_map<std::string, int> df;
  int n_docs = 0;
  for (const auto& q : questions) {
    for (const auto& c : q.candidates) {
      std::set<std::string> distinct;
      for (const auto& tok : tokenize(c.text)) distinct.insert(tok);
      for (const auto& tok : distinct) ++df[tok];
      ++n_docs;
    }
  }
  auto idf = [&](const std::string& tok) {
    auto it = df.find(tok);
    const int d = it == df.end() ? 0 : it->second;
    return std::log(static_cast<double>(n_docs + 1) / static_cast<double>(d + 1)) + 1.0;
  };
  auto overlap = [&](const std::set<std::string>& label_tokens, const std::string& text) {
    std::set<std::string> distinct;
    for (const auto& tok : tokenize(text)) distinct.insert(tok);
    double score = 0.0;
    for (const auto& tok : distinct) {
      if (label_tokens.count(tok)) score += idf(tok);
    }
    return score;
  };

  ErrorBreakdown breakdown;
  for (const auto& pred : predictions) {
    auto git = gold.find(pred.question_id);
    if (git == gold.end() || pred.ranked.empty()) continue;
    const std::vector<LabelPath>& gold_labels = git->second;

    std::set<std::string> gold_codes;
    for (const auto& g : gold_labels) gold_codes.insert(g.leaf());
    const std::string& top_code = pred.ranked.front().code;
    if (gold_codes.count(top_code)) continue;  // not an error

    ++breakdown.total_errors;
    const LabelPath predicted = taxonomy.path_to(top_code);
    bool any = false;

    if (distance1_from_any(predicted, gold_labels)) {
      ++breakdown.distance1_leaf;
      any = true;
    }
    if (prefix_of_any(predicted, gold_labels)) {
      ++breakdown.correct_in_gold_multiset;
      any = true;
    }
    auto qit = question_by_id.find(pred.question_id);
    if (qit != question_by_id.end()) {
      const Question& q = *qit->second;
      const auto label_tokens = label_text_tokens(predicted, taxonomy);
      const AnswerCandidate* correct = q.candidate(q.answer_key);
      if (correct) {
        const double correct_overlap = overlap(label_tokens, correct->text);
        double best_incorrect = 0.0;
        bool has_incorrect = false;
        for (const auto& c : q.candidates) {
          if (c.key == q.answer_key) continue;
          has_incorrect = true;
          best_incorrect = std::max(best_incorrect, overlap(label_tokens, c.text));
        }
        if (has_incorrect && best_incorrect > correct_overlap) {
          ++breakdown.correlated_with_incorrect_candidate;
          any = true;
        }
      }
    }
    if (!any) ++breakdown.other;
  }
  return breakdown;
}

std::map<int, double> agreement_report(const AnnotationSet& annotator_a,
                                       const AnnotationSet& annotator_b,
                                       const Taxonomy& taxonomy) {
  std::map<int, double> by_level;
  for (int level = 1; level <= taxonomy.max_depth(); ++level) {
    by_level[level] = cohens_kappa(annotator_a, annotator_b, level);
  }
  return by_level;
}

std::string agreement_report_tsv(const std::map<int, double>& by_level) {
  std::string out = "level\tkappa\n";
  char buf[64];
  for (const auto& [level, kappa] : by_level) {
    std::snprintf(buf, sizeof(buf), "%d\t%.4f\n", level, kappa);
    out += buf;
  }
  return out;
}

}  // namespace qc
