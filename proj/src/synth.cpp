#include "qc/synth.hpp"

#include <string>

#include "qc/errors.hpp"
#include "qc/rng.hpp"

namespace qc::synth {

namespace {

std::string node_code(int depth, int index) {
  return "D" + std::to_string(depth) + "N" + std::to_string(index);
}

Split split_for(std::size_t i) {
  const std::size_t slot = i % 10;
  if (slot < 7) return Split::train;
  if (slot == 7) return Split::dev;
  return Split::test;
}

std::vector<AnswerCandidate> junk_candidates(SplitMix64& rng) {
  std::vector<AnswerCandidate> candidates;
  for (char key = 'A'; key <= 'D'; ++key) {
    std::string text = "opt" + std::to_string(rng.next_below(40)) + " opt" +
                       std::to_string(rng.next_below(40));
    candidates.push_back(AnswerCandidate{std::string(1, key), std::move(text)});
  }
  return candidates;
}

}  // namespace

std::vector<TaxonomyNode> cardinality_nodes(const std::vector<int>& level_counts) {
  if (level_counts.empty()) throw DataError("cardinality_nodes: no level counts");
  std::vector<TaxonomyNode> nodes;
  for (std::size_t depth = 0; depth < level_counts.size(); ++depth) {
    const int count = level_counts[depth];
    if (count < 1) throw DataError("cardinality_nodes: level counts must be >= 1");
    if (depth > 0 && count < level_counts[depth - 1]) {
      throw DataError("cardinality_nodes: level counts must be non-decreasing");
    }
    for (int i = 0; i < count; ++i) {
      TaxonomyNode node;
      node.code = node_code(static_cast<int>(depth + 1), i);
      node.parent_code =
          depth == 0 ? std::string{}
                     : node_code(static_cast<int>(depth), i % level_counts[depth - 1]);
      node.name = "topic " + std::to_string(depth + 1) + "." + std::to_string(i);
      nodes.push_back(std::move(node));
    }
  }
  return nodes;
}

Corpus coverage_corpus(const std::vector<int>& level_counts, std::uint64_t seed) {
  Corpus corpus;
  corpus.nodes = cardinality_nodes(level_counts);
  const Taxonomy taxonomy = Taxonomy::from_nodes(corpus.nodes);

  const int deepest = static_cast<int>(level_counts.size());
  const int leaves = level_counts.back();
  for (int i = 0; i < leaves; ++i) {
    SplitMix64 rng(mix_seed(seed, static_cast<std::uint64_t>(i)));
    Question q;
    q.id = "cov" + std::to_string(i);
    q.text = "Which statement describes item " + std::to_string(i) + "?";
    q.candidates = junk_candidates(rng);
    q.answer_key = std::string(1, static_cast<char>('A' + rng.next_below(4)));
    q.split = split_for(static_cast<std::size_t>(i));
    corpus.gold[q.id] = {taxonomy.path_to(node_code(deepest, i))};
    corpus.questions.push_back(std::move(q));
  }
  return corpus;
}

namespace {

// 4 roots x 3 mids x 3 children = 36 leaves.
constexpr int kRoots = 4;
constexpr int kMids = 3;
constexpr int kChildren = 3;
constexpr int kLeaves = kRoots * kMids * kChildren;

std::string root_code(int r) { return "R" + std::to_string(r); }
std::string mid_code(int r, int m) { return root_code(r) + "_M" + std::to_string(m); }
std::string leaf_code(int r, int m, int c) { return mid_code(r, m) + "_C" + std::to_string(c); }

std::string leaf_code(int leaf) {
  const int r = leaf / (kMids * kChildren);
  const int m = (leaf / kChildren) % kMids;
  const int c = leaf % kChildren;
  return leaf_code(r, m, c);
}

std::vector<TaxonomyNode> grid_nodes(bool qa_definitions) {
  std::vector<TaxonomyNode> nodes;
  for (int r = 0; r < kRoots; ++r) {
    TaxonomyNode root;
    root.code = root_code(r);
    root.name = "area " + std::to_string(r);
    if (qa_definitions) root.definition = "branch" + std::to_string(r);
    nodes.push_back(std::move(root));
    for (int m = 0; m < kMids; ++m) {
      TaxonomyNode mid;
      mid.code = mid_code(r, m);
      mid.parent_code = root_code(r);
      mid.name = "area " + std::to_string(r) + " part " + std::to_string(m);
      if (qa_definitions) mid.definition = "section" + std::to_string(r) + std::to_string(m);
      nodes.push_back(std::move(mid));
      for (int c = 0; c < kChildren; ++c) {
        const int leaf = (r * kMids + m) * kChildren + c;
        TaxonomyNode node;
        node.code = leaf_code(r, m, c);
        node.parent_code = mid_code(r, m);
        node.name = "problem type " + std::to_string(leaf);
        if (qa_definitions) node.definition = "cue" + std::to_string(leaf);
        nodes.push_back(std::move(node));
      }
    }
  }
  return nodes;
}

}  // namespace

Corpus qc_benchmark(int n_questions, std::uint64_t seed) {
  if (n_questions < kLeaves) throw DataError("qc_benchmark: need at least 36 questions");
  Corpus corpus;
  corpus.nodes = grid_nodes(/*qa_definitions=*/false);
  const Taxonomy taxonomy = Taxonomy::from_nodes(corpus.nodes);

  for (int i = 0; i < n_questions; ++i) {
    SplitMix64 rng(mix_seed(seed, static_cast<std::uint64_t>(i)));
    const int leaf = i % kLeaves;
    const int root = leaf / (kMids * kChildren);

    std::vector<LabelPath> labels = {taxonomy.path_to(leaf_code(leaf))};
    const bool two_labels = i % 25 < 4;  // 16%
    int second = -1;
    if (two_labels) {
      second = static_cast<int>(rng.next_below(kLeaves - 1));
      if (second >= leaf) ++second;
      labels.push_back(taxonomy.path_to(leaf_code(second)));
    }

    // Distractor leaf from the same branch, so the shared root token cannot
    // separate it from the gold leaf under unigrams alone.
    int distractor = root * kMids * kChildren + static_cast<int>(rng.next_below(kMids * kChildren - 1));
    if (distractor >= leaf) ++distractor;

    auto key_pair = [](int l) {
      return std::pair<std::string, std::string>{"key" + std::to_string(l) + "x",
                                                 "key" + std::to_string(l) + "y"};
    };

    // Atomic token blocks; the gold pair is adjacent, the distractor pair is
    // split by a pad token so it never forms the key bigram.
    std::vector<std::string> blocks;
    auto [gx, gy] = key_pair(leaf);
    blocks.push_back(gx + " " + gy);
    blocks.push_back("area" + std::to_string(root));
    if (two_labels) {
      auto [sx, sy] = key_pair(second);
      blocks.push_back(sx + " " + sy);
      blocks.push_back("area" + std::to_string(second / (kMids * kChildren)));
    }
    auto [dx, dy] = key_pair(distractor);
    blocks.push_back(dx + " pad" + std::to_string(rng.next_below(20)) + " " + dy);
    blocks.push_back("pad" + std::to_string(rng.next_below(20)));
    shuffle(blocks, rng);

    Question q;
    q.id = "qc" + std::to_string(i);
    for (const auto& block : blocks) {
      if (!q.text.empty()) q.text += ' ';
      q.text += block;
    }
    q.text += '?';
    q.candidates = junk_candidates(rng);
    q.answer_key = std::string(1, static_cast<char>('A' + rng.next_below(4)));
    q.grade = static_cast<int>(3 + rng.next_below(7));
    q.split = split_for(static_cast<std::size_t>(i));

    corpus.gold[q.id] = std::move(labels);
    corpus.questions.push_back(std::move(q));
  }
  return corpus;
}

Corpus qa_benchmark(int n_questions, std::uint64_t seed) {
  if (n_questions < kLeaves) throw DataError("qa_benchmark: need at least 36 questions");
  Corpus corpus;
  corpus.nodes = grid_nodes(/*qa_definitions=*/true);
  const Taxonomy taxonomy = Taxonomy::from_nodes(corpus.nodes);

  for (int i = 0; i < n_questions; ++i) {
    SplitMix64 rng(mix_seed(seed, static_cast<std::uint64_t>(i)));
    const int leaf = i % kLeaves;

    Question q;
    q.id = "qa" + std::to_string(i);
    for (int t = 0; t < 4; ++t) {
      if (t) q.text += ' ';
      q.text += "stem" + std::to_string(rng.next_below(30));
    }
    q.text += '?';

    q.answer_key = std::string(1, static_cast<char>('A' + rng.next_below(4)));
    // The correct candidate carries the gold leaf's cue token; each incorrect
    // candidate carries some other leaf's cue.
    for (char key = 'A'; key <= 'D'; ++key) {
      int cue = leaf;
      if (key != q.answer_key[0]) {
        cue = static_cast<int>(rng.next_below(kLeaves - 1));
        if (cue >= leaf) ++cue;
      }
      std::string text = "cue" + std::to_string(cue) + " opt" + std::to_string(rng.next_below(40));
      q.candidates.push_back(AnswerCandidate{std::string(1, key), std::move(text)});
    }
    q.split = split_for(static_cast<std::size_t>(i));

    corpus.gold[q.id] = {taxonomy.path_to(leaf_code(leaf))};
    corpus.questions.push_back(std::move(q));
  }
  return corpus;
}

}  // namespace qc::synth
