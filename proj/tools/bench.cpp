// Benchmarks the OpenMP kernels against the serial reference path and checks
// that both produce identical results. Usage: qc_bench [threads]
#include <chrono>
#include <cstdio>
#include <cstdlib>
#include <functional>
#include <string>
#include <vector>

#include "qc/classifier.hpp"
#include "qc/metrics.hpp"
#include "qc/parallel.hpp"
#include "qc/qa.hpp"
#include "qc/rng.hpp"
#include "qc/synth.hpp"

using namespace qc;

namespace {

double time_of(const std::function<void()>& fn) {
  auto start = std::chrono::steady_clock::now();
  fn();
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
}

void row(const char* name, double serial_s, double parallel_s, bool identical) {
  std::printf("%-28s %9.3fs %9.3fs %7.2fx  %s\n", name, serial_s, parallel_s,
              serial_s / parallel_s, identical ? "identical" : "MISMATCH");
}

}  // namespace

int main(int argc, char** argv) {
  const int threads = argc > 1 ? std::atoi(argv[1]) : resolve_threads(0);
  std::printf("serial reference vs OpenMP kernels (%d threads)\n", threads);
  std::printf("%-28s %10s %10s %8s\n", "kernel", "serial", "parallel", "speedup");

  bool all_identical = true;

  {  // one-vs-all level training
    auto corpus = synth::qc_benchmark(1200, 99);
    Taxonomy tax = Taxonomy::from_nodes(corpus.nodes);
    std::vector<LabeledQuestion> dataset;
    for (const auto& q : corpus.questions) dataset.push_back({q, corpus.gold.at(q.id)});
    FeatureConfig features;
    features.use_pos_tagged = false;
    TrainConfig train;
    train.epochs = 30;
    Resources none;

    HierarchicalClassifier serial, parallel;
    double ts = time_of([&] {
      serial = HierarchicalClassifier::train(dataset, 3, features, train, tax, none, 1);
    });
    double tp = time_of([&] {
      parallel = HierarchicalClassifier::train(dataset, 3, features, train, tax, none, threads);
    });
    bool same = true;
    for (int level = 1; level <= 3; ++level) {
      const auto& a = serial.ensemble(level).models;
      const auto& b = parallel.ensemble(level).models;
      if (a.size() != b.size()) same = false;
      for (std::size_t i = 0; same && i < a.size(); ++i) {
        same = a[i].first == b[i].first && a[i].second.bias == b[i].second.bias &&
               a[i].second.weights == b[i].second.weights;
      }
    }
    all_identical &= same;
    row("train (52 binary models)", ts, tp, same);

    std::vector<Question> questions;
    for (const auto& lq : dataset) questions.push_back(lq.question);
    std::map<int, std::vector<RankedPrediction>> ps, pp;
    double es = time_of([&] { ps = serial.predict_levels(questions, {1, 2, 3}, none, 1); });
    double ep = time_of([&] { pp = serial.predict_levels(questions, {1, 2, 3}, none, threads); });
    same = true;
    for (int level = 1; level <= 3 && same; ++level) {
      for (std::size_t qi = 0; qi < questions.size() && same; ++qi) {
        const auto& a = ps.at(level)[qi].ranked;
        const auto& b = pp.at(level)[qi].ranked;
        if (a.size() != b.size()) same = false;
        for (std::size_t i = 0; same && i < a.size(); ++i) {
          same = a[i].code == b[i].code && a[i].score == b[i].score;
        }
      }
    }
    all_identical &= same;
    row("predict (3 levels)", es, ep, same);
  }

  {  // bootstrap resampling
    std::vector<double> a, b;
    SplitMix64 rng(4);
    for (int i = 0; i < 3548; ++i) {
      a.push_back(rng.next_unit() < 0.45 ? 1.0 : 0.0);
      b.push_back(rng.next_unit() < 0.50 ? 1.0 : 0.0);
    }
    SignificanceResult rs, rp;
    double ts = time_of([&] { rs = bootstrap_significance(a, b, 200000, 7, 1); });
    double tp = time_of([&] { rp = bootstrap_significance(a, b, 200000, 7, threads); });
    bool same = rs.p_value == rp.p_value;
    all_identical &= same;
    row("bootstrap (200k resamples)", ts, tp, same);
  }

  {  // label-noise sweep
    auto corpus = synth::qa_benchmark(1000, 31);
    Taxonomy tax = Taxonomy::from_nodes(corpus.nodes);
    OverlapSolver overlap(corpus.questions);
    SolverFn solver = overlap.as_solver();
    std::vector<double> props = {0.0, 0.1, 0.2, 0.3, 0.4};
    std::vector<SweepRow> rs, rp;
    double ts = time_of(
        [&] { rs = noise_sweep(corpus.questions, solver, corpus.gold, tax, props, 20, 3, 3, 1); });
    double tp = time_of([&] {
      rp = noise_sweep(corpus.questions, solver, corpus.gold, tax, props, 20, 3, 3, threads);
    });
    bool same = rs.size() == rp.size();
    for (std::size_t i = 0; same && i < rs.size(); ++i) {
      same = rs[i].mean_p_at_1 == rp[i].mean_p_at_1 && rs[i].stddev == rp[i].stddev;
    }
    all_identical &= same;
    row("noise sweep (5x20 runs)", ts, tp, same);
  }

  if (!all_identical) {
    std::printf("FAILURE: a parallel kernel diverged from the serial reference\n");
    return 1;
  }
  return 0;
}
