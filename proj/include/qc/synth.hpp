#pragma once

#include <cstdint>
#include <vector>

#include "qc/corpus.hpp"
#include "qc/taxonomy.hpp"

namespace qc::synth {

// Forest with exactly level_counts[k] nodes at depth k+1. Children are
// assigned round-robin, so every node has a descendant at the deepest level
// and the distinct truncations of the leaf inventory reproduce level_counts
// exactly at each level.
std::vector<TaxonomyNode> cardinality_nodes(const std::vector<int>& level_counts);

struct Corpus {
  std::vector<TaxonomyNode> nodes;
  std::vector<Question> questions;
  GoldMap gold;
};

// One placeholder question per maximal label, so the gold inventory covers
// every leaf. Backs the bundled stand-in data for per-level category counts.
Corpus coverage_corpus(const std::vector<int>& level_counts, std::uint64_t seed);

// Classification benchmark over a 4/12/36 taxonomy. Each leaf is keyed to a
// unique adjacent token pair; every question also carries a same-branch
// distractor leaf's tokens (non-adjacent) plus filler, so unigrams are
// ambiguous where bigrams are not. 16% of questions carry a second label.
Corpus qc_benchmark(int n_questions, std::uint64_t seed);

// QA benchmark over the same tree shape where each leaf's definition is a
// cue token planted in the correct answer candidate; the question stem alone
// is uninformative. Label-driven expansion is what solves it.
Corpus qa_benchmark(int n_questions, std::uint64_t seed);

}  // namespace qc::synth
