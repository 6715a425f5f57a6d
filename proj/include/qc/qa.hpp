#pragma once

#include <cstdint>
#include <functional>
#include <map>
#include <optional>
#include <string>
#include <unordered_map>
#include <vector>

#include "qc/corpus.hpp"
#include "qc/serialize.hpp"
#include "qc/taxonomy.hpp"

namespace qc {

struct ExpandedQuestion {
  std::string id;
  std::string original;
  std::string prefix;    // label definition chain; empty when unlabeled
  std::string expanded;  // prefix + " " + original, or original when no prefix
};

// Prepends the label's level-by-level definition text to the question.
ExpandedQuestion expand_query(const Question& question, const LabelPath* label,
                              const Taxonomy& taxonomy);

// Pure scoring function: (question, expanded text, run seed) -> per-candidate
// scores. Solvers must be deterministic given these inputs.
using SolverFn =
    std::function<CandidateScores(const Question&, const std::string&, std::uint64_t)>;

// Desk-scale reference solver: idf-weighted token overlap between the
// (expanded) question and each candidate, the candidate optionally extended
// with its best-matching reference-corpus sentence. Deterministic; ignores
// the run seed.
class OverlapSolver {
 public:
  OverlapSolver(const std::vector<Question>& corpus,
                const std::vector<std::string>* reference_sentences = nullptr);

  CandidateScores solve(const Question& question, const std::string& expanded_text) const;

  SolverFn as_solver() const;

  double idf(const std::string& token) const;

 private:
  std::unordered_map<std::string, int> document_frequency_;
  int n_documents_ = 0;
  std::vector<std::vector<std::string>> reference_tokens_;
};

// Solver backed by an externally produced candidate-scores file (the
// ingestion path for neural QA models). Expansion text is ignored.
SolverFn external_scores_solver(const std::vector<CandidateScores>& scores, bool strict = true);

struct LabelSource {
  enum class Kind { none, gold, predicted, perturbed };
  Kind kind = Kind::none;
  double proportion = 0.0;  // perturbed only
  int level = 1;            // perturbation truncation level
};

// Argmax answer selection; exact score ties go to the lowest candidate key.
std::string select_answer(const Question& question, const CandidateScores& scores);

struct QAEvalOutcome {
  std::vector<double> per_run_p_at_1;
  double mean_p_at_1 = 0.0;
  double stddev = 0.0;  // sample stddev across runs (0 for a single run)
  int runs = 0;
  int n = 0;
  // Per-question correctness of the first run, for downstream analyses.
  std::map<std::string, bool> first_run_correct;
};

// P@1 under a label source; multi-run means vary only the stochastic seeds
// (perturbation draws and any solver randomness). Gold questions with two
// labels expand with the first gold label.
QAEvalOutcome qa_evaluate(const std::vector<Question>& questions, const SolverFn& solver,
                          const LabelSource& source, const GoldMap& gold,
                          const std::map<std::string, LabelPath>& predicted_top,
                          const Taxonomy& taxonomy, int runs = 1, std::uint64_t seed = 13,
                          bool strict = true, int threads = 1);

// Replaces round(proportion * n) uniformly chosen questions' labels with a
// uniformly random different label at `level` (universe = the taxonomy's
// maximal labels truncated to that level). Deterministic per seed.
std::map<std::string, LabelPath> perturb_labels(const std::map<std::string, LabelPath>& gold,
                                                double proportion, const Taxonomy& taxonomy,
                                                int level, std::uint64_t seed);

struct SweepRow {
  double proportion = 0.0;
  double mean_p_at_1 = 0.0;
  double stddev = 0.0;
  int runs = 0;
};

// Mean P@1 over `runs` independent perturbations per proportion. (proportion,
// run) pairs execute in parallel with counter-based seeds; the table is
// independent of thread count.
std::vector<SweepRow> noise_sweep(const std::vector<Question>& questions, const SolverFn& solver,
                                  const GoldMap& gold, const Taxonomy& taxonomy,
                                  const std::vector<double>& proportions, int runs = 20,
                                  std::uint64_t seed = 13, int level = 1, int threads = 1);

// Plot-ready TSV: proportion \t mean_p_at_1 \t stddev \t runs.
std::string sweep_tsv(const std::vector<SweepRow>& rows);

}  // namespace qc
