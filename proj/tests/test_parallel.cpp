// The OpenMP kernels must produce results identical to the serial reference
// path for any thread count; these tests pin that contract module by module.
#include <doctest.h>

#include <numeric>

#include "qc/classifier.hpp"
#include "qc/metrics.hpp"
#include "qc/parallel.hpp"
#include "qc/qa.hpp"
#include "qc/synth.hpp"
#include "support/fixtures.hpp"

using namespace qc;

TEST_CASE("parallel_for fills per-index slots like the serial loop") {
  const std::size_t n = 1000;
  std::vector<std::uint64_t> serial(n), parallel(n);
  auto fill = [](std::vector<std::uint64_t>& out) {
    return [&out](std::size_t i) { out[i] = i * i + 17; };
  };
  parallel_for(n, 1, fill(serial));
  parallel_for(n, 4, fill(parallel));
  CHECK(serial == parallel);
}

TEST_CASE("training and prediction are independent of thread count") {
  auto corpus = synth::qc_benchmark(120, 5);
  Taxonomy tax = Taxonomy::from_nodes(corpus.nodes);
  std::vector<LabeledQuestion> dataset;
  for (const auto& q : corpus.questions) {
    dataset.push_back(LabeledQuestion{q, corpus.gold.at(q.id)});
  }
  FeatureConfig features;
  features.use_pos_tagged = false;
  TrainConfig train;
  train.epochs = 5;
  Resources none;

  HierarchicalClassifier serial =
      HierarchicalClassifier::train(dataset, 3, features, train, tax, none, 1);
  HierarchicalClassifier threaded =
      HierarchicalClassifier::train(dataset, 3, features, train, tax, none, 4);

  for (int level = 1; level <= 3; ++level) {
    const auto& ms = serial.ensemble(level).models;
    const auto& mt = threaded.ensemble(level).models;
    REQUIRE(ms.size() == mt.size());
    for (std::size_t i = 0; i < ms.size(); ++i) {
      CHECK(ms[i].first == mt[i].first);
      CHECK(ms[i].second.bias == mt[i].second.bias);
      CHECK(ms[i].second.weights == mt[i].second.weights);  // bit-identical
    }
  }

  auto preds_serial = serial.predict_levels(corpus.questions, {3}, none, 1);
  auto preds_threaded = serial.predict_levels(corpus.questions, {3}, none, 4);
  for (std::size_t qi = 0; qi < corpus.questions.size(); ++qi) {
    const auto& a = preds_serial.at(3)[qi].ranked;
    const auto& b = preds_threaded.at(3)[qi].ranked;
    REQUIRE(a.size() == b.size());
    for (std::size_t i = 0; i < a.size(); ++i) {
      CHECK(a[i].code == b[i].code);
      CHECK(a[i].score == b[i].score);
    }
  }
}

TEST_CASE("bootstrap p-value is independent of thread count") {
  std::vector<double> a(500), b(500);
  std::iota(a.begin(), a.end(), 0.0);
  for (std::size_t i = 0; i < b.size(); ++i) b[i] = a[i] + (i % 3 == 0 ? 1.0 : -0.25);
  SignificanceResult serial = bootstrap_significance(a, b, 5000, 42, 1);
  SignificanceResult threaded = bootstrap_significance(a, b, 5000, 42, 4);
  CHECK(serial.p_value == threaded.p_value);
}

TEST_CASE("noise sweep table is independent of thread count") {
  auto corpus = synth::qa_benchmark(80, 9);
  Taxonomy tax = Taxonomy::from_nodes(corpus.nodes);
  OverlapSolver overlap(corpus.questions);
  SolverFn solver = overlap.as_solver();
  std::vector<double> props = {0.0, 0.2, 0.4};
  auto serial = noise_sweep(corpus.questions, solver, corpus.gold, tax, props, 4, 3, 3, 1);
  auto threaded = noise_sweep(corpus.questions, solver, corpus.gold, tax, props, 4, 3, 3, 4);
  REQUIRE(serial.size() == threaded.size());
  for (std::size_t i = 0; i < serial.size(); ++i) {
    CHECK(serial[i].mean_p_at_1 == threaded[i].mean_p_at_1);
    CHECK(serial[i].stddev == threaded[i].stddev);
  }
}

TEST_CASE("qa evaluation is independent of thread count") {
  auto corpus = synth::qa_benchmark(100, 13);
  Taxonomy tax = Taxonomy::from_nodes(corpus.nodes);
  OverlapSolver overlap(corpus.questions);
  LabelSource source;
  source.kind = LabelSource::Kind::perturbed;
  source.proportion = 0.3;
  source.level = 3;
  QAEvalOutcome serial = qa_evaluate(corpus.questions, overlap.as_solver(), source, corpus.gold,
                                     {}, tax, 5, 7, true, 1);
  QAEvalOutcome threaded = qa_evaluate(corpus.questions, overlap.as_solver(), source, corpus.gold,
                                       {}, tax, 5, 7, true, 4);
  CHECK(serial.per_run_p_at_1 == threaded.per_run_p_at_1);
  CHECK(serial.first_run_correct == threaded.first_run_correct);
}
