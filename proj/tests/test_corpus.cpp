#include <doctest.h>

#include "qc/corpus.hpp"
#include "qc/errors.hpp"
#include "support/fixtures.hpp"

using namespace qc;

namespace {

const char* kQuestionLine =
    R"({"id":"q1","question":"What happens to water?","choices":[{"label":"A","text":"melts"},)"
    R"({"label":"B","text":"boils"},{"label":"C","text":"freezes"},{"label":"D","text":"nothing"}],)"
    R"("answerKey":"C","grade":4,"split":"train"})";

}  // namespace

TEST_CASE("questions load from JSONL") {
  test::TempDir tmp("corpus_load");
  auto path = tmp.write("q.jsonl", std::string(kQuestionLine) + "\n");
  auto questions = load_questions(path);
  REQUIRE(questions.size() == 1);
  CHECK(questions[0].id == "q1");
  CHECK(questions[0].answer_key == "C");
  CHECK(questions[0].candidates.size() == 4);
  CHECK(questions[0].grade == 4);
  CHECK(questions[0].split == Split::train);
}

TEST_CASE("malformed question lines are reported with their line number") {
  test::TempDir tmp("corpus_bad");
  SUBCASE("missing choices") {
    auto path = tmp.write("q.jsonl",
                          std::string(kQuestionLine) + "\n" +
                              R"({"id":"q2","question":"x?","answerKey":"A"})" + "\n");
    CHECK_THROWS_WITH_AS(load_questions(path), doctest::Contains(":2"), DataError);
  }
  SUBCASE("duplicate id") {
    auto path = tmp.write("q.jsonl", std::string(kQuestionLine) + "\n" + kQuestionLine + "\n");
    CHECK_THROWS_WITH_AS(load_questions(path), doctest::Contains("duplicate question id"),
                         DataError);
  }
  SUBCASE("answer key without candidate") {
    std::string line = kQuestionLine;
    line.replace(line.find("\"answerKey\":\"C\""), 15, "\"answerKey\":\"Z\"");
    auto path = tmp.write("q.jsonl", line + "\n");
    CHECK_THROWS_WITH_AS(load_questions(path), doctest::Contains("matches no candidate"),
                         DataError);
  }
  SUBCASE("not JSON at all") {
    auto path = tmp.write("q.jsonl", "not json\n");
    CHECK_THROWS_WITH_AS(load_questions(path), doctest::Contains("malformed JSON"), DataError);
  }
}

TEST_CASE("write-then-load round-trips the corpus") {
  test::TempDir tmp("corpus_rt");
  std::vector<Question> questions;
  questions.push_back(test::make_question("a", "Why is the sky blue?",
                                          {"scattering", "mirrors", "water", "dust"}, "A",
                                          Split::dev));
  questions.back().grade = 5;
  questions.push_back(test::make_question("b", "What melts ice?", {"heat", "cold", "salt", "sun"},
                                          "C", Split::test));
  auto path = tmp.path("out.jsonl");
  write_questions(path, questions);
  auto loaded = load_questions(path);
  REQUIRE(loaded.size() == 2);
  for (std::size_t i = 0; i < 2; ++i) {
    CHECK(loaded[i].id == questions[i].id);
    CHECK(loaded[i].text == questions[i].text);
    CHECK(loaded[i].answer_key == questions[i].answer_key);
    CHECK(loaded[i].grade == questions[i].grade);
    CHECK(loaded[i].split == questions[i].split);
    REQUIRE(loaded[i].candidates.size() == questions[i].candidates.size());
    for (std::size_t c = 0; c < loaded[i].candidates.size(); ++c) {
      CHECK(loaded[i].candidates[c].key == questions[i].candidates[c].key);
      CHECK(loaded[i].candidates[c].text == questions[i].candidates[c].text);
    }
  }
}

TEST_CASE("split counts") {
  std::vector<Question> questions;
  CHECK(split_counts(questions).train == 0);
  questions.push_back(test::make_question("a", "x?"));
  questions.push_back(test::make_question("b", "y?"));
  questions.push_back(test::make_question("c", "z?", {"1", "2", "3", "4"}, "A", Split::test));
  auto counts = split_counts(questions);
  CHECK(counts.train == 2);
  CHECK(counts.dev == 0);
  CHECK(counts.test == 1);
}

TEST_CASE("corpus statistics") {
  SUBCASE("single question") {
    std::vector<Question> qs = {test::make_question("a", "What is ice?")};
    auto stats = corpus_stats(qs);
    CHECK(stats.mean_words == doctest::Approx(3.0));
    CHECK(stats.mean_sentences == doctest::Approx(1.0));
  }
  SUBCASE("mean over two questions") {
    std::vector<Question> qs = {test::make_question("a", "one two three four"),
                                test::make_question("b", "one two three four five six")};
    CHECK(corpus_stats(qs).mean_words == doctest::Approx(5.0));
  }
  SUBCASE("sentence terminators with a minimum of one") {
    std::vector<Question> qs = {test::make_question("a", "First. Second? Third!"),
                                test::make_question("b", "no terminator at all")};
    CHECK(corpus_stats(qs).mean_sentences == doctest::Approx(2.0));
  }
  SUBCASE("empty corpus") {
    CHECK(corpus_stats({}).n == 0);
  }
}

TEST_CASE("gold labels validate against the taxonomy") {
  Taxonomy tax = test::sample_taxonomy();
  test::TempDir tmp("gold");
  SUBCASE("single code expands to its full path") {
    auto path = tmp.write("g.tsv", "q1\tMAT_COS_BOILING\n");
    GoldMap gold = load_gold_labels(path, tax);
    REQUIRE(gold.count("q1"));
    CHECK(gold["q1"][0] == LabelPath({"MAT", "MAT_COS", "MAT_COS_BOILING"}));
  }
  SUBCASE("two labels allowed") {
    auto path = tmp.write("g.tsv", "q1\tMAT_COS_BOILING,ENG_LIGHT\n");
    CHECK(load_gold_labels(path, tax)["q1"].size() == 2);
  }
  SUBCASE("three labels rejected") {
    auto path = tmp.write("g.tsv", "q1\tMAT,ENG,SAF\n");
    CHECK_THROWS_WITH_AS(load_gold_labels(path, tax), doctest::Contains("more than 2"), DataError);
  }
  SUBCASE("unknown code rejected") {
    auto path = tmp.write("g.tsv", "q1\tBOGUS\n");
    CHECK_THROWS_WITH_AS(load_gold_labels(path, tax), doctest::Contains("unknown taxonomy code"),
                         DataError);
  }
  SUBCASE("duplicate label rejected") {
    auto path = tmp.write("g.tsv", "q1\tMAT,MAT\n");
    CHECK_THROWS(load_gold_labels(path, tax));
  }
  SUBCASE("unknown question id: strict errors, lenient warns and skips") {
    auto path = tmp.write("g.tsv", "q1\tMAT\nghost\tENG\n");
    std::vector<Question> questions = {test::make_question("q1", "x?")};
    CHECK_THROWS(load_gold_labels(path, tax, questions, {.strict = true}));
    GoldMap lenient = load_gold_labels(path, tax, questions, {.strict = false});
    CHECK(lenient.size() == 1);
    CHECK(lenient.count("q1") == 1);
  }
}

TEST_CASE("gold labels round-trip through the TSV writer") {
  Taxonomy tax = test::sample_taxonomy();
  test::TempDir tmp("gold_rt");
  GoldMap gold;
  gold["q1"] = {tax.path_to("MAT_COS_BOILING")};
  gold["q2"] = {tax.path_to("ENG_LIGHT"), tax.path_to("MAT_COS")};
  auto path = tmp.path("g.tsv");
  write_gold_labels(path, gold);
  GoldMap loaded = load_gold_labels(path, tax);
  CHECK(loaded == gold);
}

TEST_CASE("annotations load and group by annotator") {
  Taxonomy tax = test::sample_taxonomy();
  test::TempDir tmp("annot");
  auto path = tmp.write("a.tsv",
                        "q1\tann1\tMAT_COS_BOILING\n"
                        "q1\tann2\tMAT_COS_FREEZING\n"
                        "q2\tann1\tENG_LIGHT,MAT\n"
                        "q2\tann2\tENG_LIGHT\n");
  auto records = load_annotations(path, tax);
  CHECK(records.size() == 4);
  auto grouped = annotations_by_annotator(records);
  REQUIRE(grouped.size() == 2);
  CHECK(grouped["ann1"].size() == 2);
  CHECK(grouped["ann1"]["q2"].size() == 2);

  SUBCASE("duplicate annotation for the same question rejected") {
    records.push_back(records[0]);
    CHECK_THROWS(annotations_by_annotator(records));
  }
}

TEST_CASE("join_labels pairs questions with their gold labels") {
  Taxonomy tax = test::sample_taxonomy();
  std::vector<Question> questions = {test::make_question("q1", "a?"),
                                     test::make_question("q2", "b?")};
  GoldMap gold;
  gold["q2"] = {tax.path_to("SAF")};
  auto labeled = join_labels(questions, gold);
  REQUIRE(labeled.size() == 1);
  CHECK(labeled[0].question.id == "q2");
}
