#pragma once

#include <filesystem>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <unordered_map>
#include <vector>

#include "qc/corpus.hpp"

namespace qc {

// Sparse named-feature vector. Names are namespaced by extractor ("uni:",
// "bi:", "dep:", "hyp:", "topic:", "ess:", "hier:") so extractors never
// collide. Zero weights are never stored.
struct FeatureVector {
  std::unordered_map<std::string, double> entries;

  void add_max(const std::string& name, double weight);
  void add_count(const std::string& name, double count);
  void merge_max(const FeatureVector& other);

  bool empty() const { return entries.empty(); }
  std::size_t size() const { return entries.size(); }
  double get(const std::string& name) const;

  // Name-sorted view for serialization and stable test output.
  std::vector<std::pair<std::string, double>> sorted() const;
};

// Shared tokenizer: lowercase, split on whitespace/punctuation, punctuation
// dropped. Digits count as word characters ("3rd" stays one token).
std::vector<std::string> tokenize(const std::string& text);

std::string lowercase(const std::string& s);

// Fixed built-in list of English function words.
bool is_stopword(const std::string& token);

// Binary unigram/bigram features; when tags are given (aligned with tokens)
// the tagged variants are added as well.
FeatureVector ngram_features(const std::vector<std::string>& tokens,
                             const std::vector<std::string>* pos_tags = nullptr);

struct TokenAnnotation {
  int index = 0;  // 1-based
  std::string token;
  std::string pos;
  int head = 0;  // 0 = sentence root
};

struct AnnotatedSentence {
  std::vector<TokenAnnotation> tokens;
};

// question id -> parsed sentences, from the CoNLL-like annotation file.
using AnnotationIndex = std::map<std::string, std::vector<AnnotatedSentence>>;

AnnotationIndex load_annotation_index(const std::filesystem::path& path);

// One unlabeled "dep:governor_dependent" bigram per token with head > 0.
FeatureVector dependency_features(const std::vector<AnnotatedSentence>& sentences);

struct Sense {
  std::string id;
  std::string gloss;
};

struct HypernymEdge {
  std::string parent_id;
  std::string surface;
};

struct SenseInventory {
  std::map<std::string, std::vector<Sense>> senses_by_term;  // senses kept in file order
  std::map<std::string, HypernymEdge> hypernym_of;           // sense id -> parent link

  static SenseInventory load(const std::filesystem::path& senses_tsv,
                             const std::filesystem::path& edges_tsv);
};

// Gloss-overlap disambiguation: picks the sense whose gloss shares the most
// distinct non-stopword tokens with the context; ties keep the first-listed
// sense. Unknown words return nullopt and the caller skips expansion.
std::optional<std::string> lesk_sense(const std::string& word,
                                      const std::vector<std::string>& context_tokens,
                                      const SenseInventory& inventory);

// Hypernym expansion for the dependency root and its direct dependents:
// ancestors at distance d of the Lesk-chosen sense weigh decay^d, merged by max.
FeatureVector hypernym_features(const std::vector<AnnotatedSentence>& sentences,
                                const SenseInventory& inventory, int max_depth, double decay);

struct TopicWordlists {
  std::map<std::string, std::set<std::string>> lists;  // topic name -> lowercase terms

  static TopicWordlists load(const std::filesystem::path& directory);
};

// "topic:NAME" = number of tokens belonging to that wordlist (count-valued).
FeatureVector topic_features(const std::vector<std::string>& tokens,
                             const TopicWordlists& wordlists);

// question id -> externally extracted keyword list.
using EssentialTerms = std::map<std::string, std::vector<std::string>>;

EssentialTerms load_essential_terms(const std::filesystem::path& path);

// One binary "ess:w" feature per keyword that also occurs in the tokens.
FeatureVector essential_features(const std::vector<std::string>& tokens,
                                 const std::vector<std::string>& keywords);

struct ScoredLabel {
  std::string code;
  double score = 0.0;
};

// "hier:CODE" for the top_k coarser-level predictions (coarse-to-fine feedback).
FeatureVector hierarchy_features(const std::vector<ScoredLabel>& prev_level_ranked, int top_k);

struct FeatureConfig {
  bool use_unigrams = true;
  bool use_bigrams = true;
  bool use_pos_tagged = true;
  bool use_dependencies = false;
  bool use_hypernyms = false;
  bool use_topics = false;
  bool use_essential = false;
  bool use_hierarchy = true;
  int hypernym_max_depth = 3;
  double hypernym_decay = 0.5;
  bool include_answer_text = false;
  // When the per-question keyword file is absent, fall back to
  // stopword-filtered content words instead of a no-op.
  bool essential_fallback = false;
  int top_k_hier = 1;

  void validate() const;  // at least one extractor must be enabled
};

// Optional external inputs for the extractor stack. All immutable after load.
struct Resources {
  std::optional<AnnotationIndex> annotations;
  std::optional<SenseInventory> senses;
  std::optional<TopicWordlists> wordlists;
  std::optional<EssentialTerms> essential;
};

// Runs the enabled extractors over the question stem (plus all candidate
// texts when include_answer_text) and merges the results. Pure in
// (question, config, resources, prev_level_ranked).
FeatureVector assemble(const Question& question, const FeatureConfig& config,
                       const Resources& resources,
                       const std::vector<ScoredLabel>* prev_level_ranked = nullptr);

}  // namespace qc
