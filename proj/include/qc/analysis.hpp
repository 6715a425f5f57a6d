#pragma once

#include <map>
#include <string>
#include <vector>

#include "qc/corpus.hpp"
#include "qc/metrics.hpp"
#include "qc/taxonomy.hpp"

namespace qc {

struct CategoryRow {
  LabelPath category;
  std::string display;  // definition chain of the category
  double accuracy = 0.0;
  int n = 0;
  bool below_floor = false;
};

struct CategoryReport {
  std::vector<CategoryRow> rows;  // sorted by descending accuracy
  double overall_accuracy = 0.0;
  int n_questions = 0;
  int level = 0;
  int min_n = 0;
};

// Groups per-question QA correctness by truncated gold label(s); 2-label
// questions count in both categories. Groups smaller than min_n are flagged.
CategoryReport per_category_report(const std::map<std::string, bool>& qa_correct,
                                   const GoldMap& gold, const Taxonomy& taxonomy, int level,
                                   int min_n = 5);

std::string category_report_tsv(const CategoryReport& report);

struct ErrorBreakdown {
  int total_errors = 0;
  // Classes overlap, so counts need not sum to total_errors.
  int distance1_leaf = 0;
  int correlated_with_incorrect_candidate = 0;
  int correct_in_gold_multiset = 0;  // matches gold at a coarser truncation
  int other = 0;
};

// Classifies finest-level ranking errors (top-1 not in the gold set):
//  - distance1_leaf: predicted and a gold label differ only in the last path
//    element;
//  - correlated_with_incorrect_candidate: the predicted label's name and
//    definition text overlaps (idf-weighted) an incorrect candidate strictly
//    more than the correct one;
//  - correct_in_gold_multiset: the prediction matches a gold label at a
//    coarser truncation (one path is a proper prefix of the other).
ErrorBreakdown qc_error_breakdown(const std::vector<RankedPrediction>& predictions,
                                  const GoldMap& gold, const Taxonomy& taxonomy,
                                  const std::vector<Question>& questions);

// Kappa per truncation level 1..max_depth.
std::map<int, double> agreement_report(const AnnotationSet& annotator_a,
                                       const AnnotationSet& annotator_b, const Taxonomy& taxonomy);

std::string agreement_report_tsv(const std::map<int, double>& by_level);

}  // namespace qc
