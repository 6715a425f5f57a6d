#include <doctest.h>

#include "qc/analysis.hpp"
#include "qc/rng.hpp"
#include "support/fixtures.hpp"

using namespace qc;

TEST_CASE("per-category report groups by truncated gold labels") {
  Taxonomy tax = test::sample_taxonomy();
  GoldMap gold;
  std::map<std::string, bool> correct;

  // 7 questions under MAT_COS (5 correct), 3 under ENG_LIGHT (all correct).
  for (int i = 0; i < 7; ++i) {
    std::string id = "m" + std::to_string(i);
    gold[id] = {tax.path_to(i % 2 == 0 ? "MAT_COS_BOILING" : "MAT_COS_FREEZING")};
    correct[id] = i < 5;
  }
  for (int i = 0; i < 3; ++i) {
    std::string id = "e" + std::to_string(i);
    gold[id] = {tax.path_to("ENG_LIGHT")};
    correct[id] = true;
  }

  CategoryReport report = per_category_report(correct, gold, tax, 2, 5);
  REQUIRE(report.rows.size() == 2);
  CHECK(report.rows[0].category == LabelPath({"ENG", "ENG_LIGHT"}));
  CHECK(report.rows[0].accuracy == doctest::Approx(1.0));
  CHECK(report.rows[0].below_floor);  // n = 3 < 5
  CHECK(report.rows[1].category == LabelPath({"MAT", "MAT_COS"}));
  CHECK(report.rows[1].accuracy == doctest::Approx(5.0 / 7.0));
  CHECK(report.rows[1].n == 7);
  CHECK_FALSE(report.rows[1].below_floor);
  CHECK(report.overall_accuracy == doctest::Approx(8.0 / 10.0));

  SUBCASE("a two-label question lands in both categories") {
    gold["dual"] = {tax.path_to("MAT_COS_BOILING"), tax.path_to("ENG_LIGHT")};
    correct["dual"] = true;
    CategoryReport dual = per_category_report(correct, gold, tax, 2, 5);
    int total_n = 0;
    for (const auto& row : dual.rows) total_n += row.n;
    CHECK(total_n == 12);  // 11 questions, one counted twice
  }
  SUBCASE("all-correct run has accuracy 1.0 in every row") {
    for (auto& [id, flag] : correct) flag = true;
    CategoryReport all = per_category_report(correct, gold, tax, 2, 5);
    for (const auto& row : all.rows) CHECK(row.accuracy == doctest::Approx(1.0));
    CHECK(all.overall_accuracy == doctest::Approx(1.0));
  }
  SUBCASE("tsv rendering includes the overall row") {
    std::string tsv = category_report_tsv(report);
    CHECK(tsv.find("OVERALL") != std::string::npos);
    CHECK(tsv.find("Matter Changes of State") != std::string::npos);
  }
}

namespace {

RankedPrediction top1(const std::string& id, const std::string& code) {
  RankedPrediction pred;
  pred.question_id = id;
  pred.level = 3;
  pred.ranked = {ScoredLabel{code, 0.9}, ScoredLabel{"SAF", 0.1}};
  return pred;
}

}  // namespace

TEST_CASE("qc error breakdown classifies ranking errors") {
  Taxonomy tax = test::sample_taxonomy();
  std::vector<Question> questions;
  GoldMap gold;
  std::vector<RankedPrediction> preds;

  // q1: sibling-leaf confusion (distance 1).
  questions.push_back(test::make_question("q1", "water on the stove",
                                          {"it freezes solid", "it boils away", "x", "y"}, "A"));
  gold["q1"] = {tax.path_to("MAT_COS_FREEZING")};
  preds.push_back(top1("q1", "MAT_COS_BOILING"));

  // q2: predicted label text matches an incorrect candidate only.
  questions.push_back(test::make_question(
      "q2", "what gives plants energy", {"water from roots", "light from the sun", "soil", "air"},
      "A"));
  gold["q2"] = {tax.path_to("SAF")};
  preds.push_back(top1("q2", "ENG_LIGHT"));

  // q3: prediction is an ancestor of the gold label (coarser truncation hit).
  questions.push_back(test::make_question("q3", "another", {"a", "b", "c", "d"}, "A"));
  gold["q3"] = {tax.path_to("MAT_COS_BOILING")};
  preds.push_back(top1("q3", "MAT_COS"));

  // q4: correct prediction, not an error.
  questions.push_back(test::make_question("q4", "fine", {"a", "b", "c", "d"}, "A"));
  gold["q4"] = {tax.path_to("SAF")};
  preds.push_back(top1("q4", "SAF"));

  ErrorBreakdown breakdown = qc_error_breakdown(preds, gold, tax, questions);
  CHECK(breakdown.total_errors == 3);
  CHECK(breakdown.distance1_leaf == 1);
  CHECK(breakdown.correlated_with_incorrect_candidate >= 1);
  CHECK(breakdown.correct_in_gold_multiset == 1);

  SUBCASE("no errors, all counts zero") {
    std::vector<RankedPrediction> perfect = {top1("q4", "SAF")};
    GoldMap only;
    only["q4"] = gold["q4"];
    ErrorBreakdown none = qc_error_breakdown(perfect, only, tax, questions);
    CHECK(none.total_errors == 0);
    CHECK(none.distance1_leaf == 0);
    CHECK(none.correlated_with_incorrect_candidate == 0);
    CHECK(none.correct_in_gold_multiset == 0);
    CHECK(none.other == 0);
  }
}

TEST_CASE("error total matches 1 - P@1 within rounding") {
  Taxonomy tax = test::sample_taxonomy();
  std::vector<Question> questions;
  GoldMap gold;
  std::vector<RankedPrediction> preds;
  SplitMix64 rng(8);
  const std::vector<std::string> leaves = {"MAT_COS_BOILING", "MAT_COS_FREEZING", "ENG_LIGHT",
                                           "SAF"};
  int expected_errors = 0;
  for (int i = 0; i < 60; ++i) {
    std::string id = "q" + std::to_string(i);
    questions.push_back(test::make_question(id, "text " + std::to_string(i)));
    std::string gold_code = leaves[rng.next_below(4)];
    std::string pred_code = leaves[rng.next_below(4)];
    gold[id] = {tax.path_to(gold_code)};
    preds.push_back(top1(id, pred_code));
    if (pred_code != gold_code) ++expected_errors;
  }
  ErrorBreakdown breakdown = qc_error_breakdown(preds, gold, tax, questions);
  CHECK(breakdown.total_errors == expected_errors);
}

TEST_CASE("agreement report computes kappa per level") {
  Taxonomy tax = test::sample_taxonomy();
  AnnotationSet a, b;
  SplitMix64 rng(21);
  for (int i = 0; i < 200; ++i) {
    std::string id = "q" + std::to_string(i);
    bool boiling = rng.next_below(2) == 0;
    a[id] = {tax.path_to(boiling ? "MAT_COS_BOILING" : "MAT_COS_FREEZING")};
    // Annotator b agrees at levels 1-2 but flips half the leaves.
    bool flip = rng.next_below(2) == 0;
    b[id] = {tax.path_to((boiling != flip) ? "MAT_COS_BOILING" : "MAT_COS_FREEZING")};
  }
  auto by_level = agreement_report(a, b, tax);
  REQUIRE(by_level.size() == 3);
  CHECK(by_level.at(1) == doctest::Approx(1.0));
  CHECK(by_level.at(2) == doctest::Approx(1.0));
  CHECK(by_level.at(1) > by_level.at(3));

  SUBCASE("identical annotations give 1.0 at every level") {
    auto self = agreement_report(a, a, tax);
    for (const auto& [level, kappa] : self) CHECK(kappa == doctest::Approx(1.0));
  }
  SUBCASE("tsv rendering") {
    std::string tsv = agreement_report_tsv(by_level);
    CHECK(tsv.rfind("level\tkappa\n", 0) == 0);
    CHECK(std::count(tsv.begin(), tsv.end(), '\n') == 4);
  }
}
