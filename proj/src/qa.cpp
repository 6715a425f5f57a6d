#include "qc/qa.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <memory>
#include <numeric>
#include <set>

#include "qc/errors.hpp"
#include "qc/features.hpp"
#include "qc/parallel.hpp"
#include "qc/rng.hpp"

namespace qc {

ExpandedQuestion expand_query(const Question& question, const LabelPath* label,
                              const Taxonomy& taxonomy) {
  ExpandedQuestion out;
  out.id = question.id;
  out.original = question.text;
  if (label && !label->empty()) {
    out.prefix = taxonomy.definition_chain(*label);
  }
  out.expanded = out.prefix.empty() ? out.original : out.prefix + " " + out.original;
  return out;
}

OverlapSolver::OverlapSolver(const std::vector<Question>& corpus,
                             const std::vector<std::string>* reference_sentences) {
  auto add_document = [&](const std::string& text) {
    std::set<std::string> distinct;
    for (const auto& tok : tokenize(text)) distinct.insert(tok);
    for (const auto& tok : distinct) ++document_frequency_[tok];
    ++n_documents_;
  };
  for (const auto& q : corpus) {
    for (const auto& c : q.candidates) add_document(c.text);
  }
  if (reference_sentences) {
    for (const auto& sentence : *reference_sentences) {
      add_document(sentence);
      reference_tokens_.push_back(tokenize(sentence));
    }
  }
}

double OverlapSolver::idf(const std::string& token) const {
  auto it = document_frequency_.find(token);
  const int df = it == document_frequency_.end() ? 0 : it->second;
  return std::log(static_cast<double>(n_documents_ + 1) / static_cast<double>(df + 1)) + 1.0;
}

CandidateScores OverlapSolver::solve(const Question& question,
                                     const std::string& expanded_text) const {
  std::set<std::string> question_tokens;
  for (const auto& tok : tokenize(expanded_text)) question_tokens.insert(tok);

  CandidateScores out;
  out.question_id = question.id;
  for (const auto& candidate : question.candidates) {
    std::set<std::string> candidate_tokens;
    for (const auto& tok : tokenize(candidate.text)) candidate_tokens.insert(tok);

    if (!reference_tokens_.empty() && !candidate_tokens.empty()) {
      // Extend the candidate with its best-matching reference sentence.
      double best = 0.0;
      const std::vector<std::string>* best_sentence = nullptr;
      for (const auto& sentence : reference_tokens_) {
        std::set<std::string> seen;
        double overlap = 0.0;
        for (const auto& tok : sentence) {
          if (candidate_tokens.count(tok) && seen.insert(tok).second) overlap += idf(tok);
        }
        if (overlap > best) {  // ties keep the earliest sentence
          best = overlap;
          best_sentence = &sentence;
        }
      }
      if (best_sentence) {
        for (const auto& tok : *best_sentence) candidate_tokens.insert(tok);
      }
    }

    double score = 0.0;
    for (const auto& tok : candidate_tokens) {
      if (question_tokens.count(tok)) score += idf(tok);
    }
    out.scores[candidate.key] = score;
  }
  return out;
}

SolverFn OverlapSolver::as_solver() const {
  return [this](const Question& q, const std::string& expanded, std::uint64_t) {
    return solve(q, expanded);
  };
}

SolverFn external_scores_solver(const std::vector<CandidateScores>& scores, bool strict) {
  auto by_id = std::make_shared<std::map<std::string, CandidateScores>>();
  for (const auto& cs : scores) (*by_id)[cs.question_id] = cs;
  return [by_id, strict](const Question& q, const std::string&, std::uint64_t) {
    auto it = by_id->find(q.id);
    if (it != by_id->end()) return it->second;
    if (strict) throw DataError("no external scores for question " + q.id);
    CandidateScores zero;
    zero.question_id = q.id;
    for (const auto& c : q.candidates) zero.scores[c.key] = 0.0;
    return zero;
  };
}

std::string select_answer(const Question& question, const CandidateScores& scores) {
  std::vector<std::string> keys;
  for (const auto& c : question.candidates) keys.push_back(c.key);
  std::sort(keys.begin(), keys.end());
  std::string best_key;
  double best_score = 0.0;
  for (const auto& key : keys) {
    auto it = scores.scores.find(key);
    const double score = it == scores.scores.end() ? 0.0 : it->second;
    if (best_key.empty() || score > best_score) {
      best_key = key;
      best_score = score;
    }
  }
  if (best_key.empty()) throw DataError("question " + question.id + " has no candidates");
  return best_key;
}

std::map<std::string, LabelPath> perturb_labels(const std::map<std::string, LabelPath>& gold,
                                                double proportion, const Taxonomy& taxonomy,
                                                int level, std::uint64_t seed) {
  if (proportion < 0.0 || proportion > 1.0) {
    throw DataError("perturb_labels: proportion must be in [0, 1]");
  }
  const auto universe_set = taxonomy.labels_at_level(level);
  const std::vector<LabelPath> universe(universe_set.begin(), universe_set.end());
  if (universe.size() < 2) {
    throw DataError("perturb_labels: fewer than 2 labels at level " + std::to_string(level));
  }

  std::map<std::string, LabelPath> out = gold;
  const std::size_t n = gold.size();
  const auto k = static_cast<std::size_t>(std::llround(proportion * static_cast<double>(n)));
  if (k == 0) return out;

  std::vector<std::string> ids;
  ids.reserve(n);
  for (const auto& [id, label] : gold) ids.push_back(id);

  SplitMix64 rng(seed);
  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), 0);
  shuffle(order, rng);
  std::vector<std::size_t> selected(order.begin(), order.begin() + static_cast<std::ptrdiff_t>(k));
  std::sort(selected.begin(), selected.end());

  for (std::size_t index : selected) {
    const std::string& id = ids[index];
    const LabelPath current = truncate(gold.at(id), level);
    auto pos = std::lower_bound(universe.begin(), universe.end(), current);
    if (pos != universe.end() && *pos == current) {
      // Draw from the universe minus the current label.
      auto j = static_cast<std::size_t>(rng.next_below(universe.size() - 1));
      const auto current_index = static_cast<std::size_t>(pos - universe.begin());
      if (j >= current_index) ++j;
      out[id] = universe[j];
    } else {
      out[id] = universe[static_cast<std::size_t>(rng.next_below(universe.size()))];
    }
  }
  return out;
}

namespace {

struct RunLabels {
  // nullptr entry = no expansion for that question.
  std::vector<const LabelPath*> labels;
  std::map<std::string, LabelPath> storage;
};

RunLabels resolve_labels(const std::vector<Question>& questions, const LabelSource& source,
                         const GoldMap& gold, const std::map<std::string, LabelPath>& predicted,
                         const Taxonomy& taxonomy, std::uint64_t run_seed, bool strict) {
  RunLabels out;
  out.labels.assign(questions.size(), nullptr);
  switch (source.kind) {
    case LabelSource::Kind::none:
      return out;
    case LabelSource::Kind::gold:
    case LabelSource::Kind::perturbed: {
      for (const auto& [id, labels] : gold) {
        if (!labels.empty()) out.storage.emplace(id, labels.front());
      }
      if (source.kind == LabelSource::Kind::perturbed) {
        out.storage =
            perturb_labels(out.storage, source.proportion, taxonomy, source.level, run_seed);
      }
      break;
    }
    case LabelSource::Kind::predicted:
      out.storage = std::map<std::string, LabelPath>(predicted.begin(), predicted.end());
      break;
  }
  for (std::size_t i = 0; i < questions.size(); ++i) {
    auto it = out.storage.find(questions[i].id);
    if (it != out.storage.end()) {
      out.labels[i] = &it->second;
    } else if (strict) {
      throw DataError("qa_evaluate: no label for question " + questions[i].id);
    }
  }
  return out;
}

}  // namespace

QAEvalOutcome qa_evaluate(const std::vector<Question>& questions, const SolverFn& solver,
                          const LabelSource& source, const GoldMap& gold,
                          const std::map<std::string, LabelPath>& predicted_top,
                          const Taxonomy& taxonomy, int runs, std::uint64_t seed, bool strict,
                          int threads) {
  if (runs < 1) throw DataError("qa_evaluate: runs must be >= 1");
  if (questions.empty()) throw DataError("qa_evaluate: no questions");

  QAEvalOutcome outcome;
  outcome.runs = runs;
  outcome.n = static_cast<int>(questions.size());

  for (int run = 0; run < runs; ++run) {
    const std::uint64_t run_seed = mix_seed(seed, static_cast<std::uint64_t>(run));
    RunLabels labels =
        resolve_labels(questions, source, gold, predicted_top, taxonomy, run_seed, strict);

    std::vector<std::uint8_t> correct(questions.size(), 0);
    parallel_for(questions.size(), threads, [&](std::size_t qi) {
      const Question& q = questions[qi];
      ExpandedQuestion expanded = expand_query(q, labels.labels[qi], taxonomy);
      CandidateScores scores = solver(q, expanded.expanded, run_seed);
      correct[qi] = select_answer(q, scores) == q.answer_key ? 1 : 0;
    });

    long long hits = 0;
    for (std::size_t qi = 0; qi < questions.size(); ++qi) {
      hits += correct[qi];
      if (run == 0) outcome.first_run_correct[questions[qi].id] = correct[qi] != 0;
    }
    outcome.per_run_p_at_1.push_back(static_cast<double>(hits) /
                                     static_cast<double>(questions.size()));
  }

  double sum = std::accumulate(outcome.per_run_p_at_1.begin(), outcome.per_run_p_at_1.end(), 0.0);
  outcome.mean_p_at_1 = sum / runs;
  if (runs > 1) {
    double ss = 0.0;
    for (double v : outcome.per_run_p_at_1) {
      ss += (v - outcome.mean_p_at_1) * (v - outcome.mean_p_at_1);
    }
    outcome.stddev = std::sqrt(ss / (runs - 1));
  }
  return outcome;
}

std::vector<SweepRow> noise_sweep(const std::vector<Question>& questions, const SolverFn& solver,
                                  const GoldMap& gold, const Taxonomy& taxonomy,
                                  const std::vector<double>& proportions, int runs,
                                  std::uint64_t seed, int level, int threads) {
  if (proportions.empty()) throw DataError("noise_sweep: no proportions given");
  if (runs < 1) throw DataError("noise_sweep: runs must be >= 1");

  // Flatten (proportion, run) into independent jobs with counter-based seeds.
  const std::size_t jobs = proportions.size() * static_cast<std::size_t>(runs);
  std::vector<double> job_p_at_1(jobs, 0.0);
  parallel_for(jobs, threads, [&](std::size_t job) {
    const std::size_t pi = job / static_cast<std::size_t>(runs);
    const int run = static_cast<int>(job % static_cast<std::size_t>(runs));
    LabelSource source;
    source.kind = LabelSource::Kind::perturbed;
    source.proportion = proportions[pi];
    source.level = level;
    const std::uint64_t job_seed = mix_seed(mix_seed(seed, static_cast<std::uint64_t>(pi)),
                                            static_cast<std::uint64_t>(run));
    QAEvalOutcome outcome = qa_evaluate(questions, solver, source, gold, {}, taxonomy,
                                        /*runs=*/1, job_seed, /*strict=*/false, /*threads=*/1);
    job_p_at_1[job] = outcome.mean_p_at_1;
  });

  std::vector<SweepRow> rows;
  for (std::size_t pi = 0; pi < proportions.size(); ++pi) {
    SweepRow row;
    row.proportion = proportions[pi];
    row.runs = runs;
    double sum = 0.0;
    for (int run = 0; run < runs; ++run) {
      sum += job_p_at_1[pi * static_cast<std::size_t>(runs) + static_cast<std::size_t>(run)];
    }
    row.mean_p_at_1 = sum / runs;
    if (runs > 1) {
      double ss = 0.0;
      for (int run = 0; run < runs; ++run) {
        const double v = job_p_at_1[pi * static_cast<std::size_t>(runs) + static_cast<std::size_t>(run)];
        ss += (v - row.mean_p_at_1) * (v - row.mean_p_at_1);
      }
      row.stddev = std::sqrt(ss / (runs - 1));
    }
    rows.push_back(row);
  }
  return rows;
}

std::string sweep_tsv(const std::vector<SweepRow>& rows) {
  std::string out = "proportion\tmean_p_at_1\tstddev\truns\n";
  char buf[128];
  for (const auto& row : rows) {
    std::snprintf(buf, sizeof(buf), "%.4f\t%.6f\t%.6f\t%d\n", row.proportion, row.mean_p_at_1,
                  row.stddev, row.runs);
    out += buf;
  }
  return out;
}

}  // namespace qc
