#pragma once

#include <filesystem>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "qc/taxonomy.hpp"

namespace qc {

enum class Split { train, dev, test };

Split parse_split(const std::string& tag);
std::string split_tag(Split s);

struct AnswerCandidate {
  std::string key;  // "A".."D" typical
  std::string text;
};

struct Question {
  std::string id;
  std::string text;
  std::vector<AnswerCandidate> candidates;
  std::string answer_key;
  std::optional<int> grade;
  Split split = Split::train;

  const AnswerCandidate* candidate(const std::string& key) const;
};

struct LabeledQuestion {
  Question question;
  std::vector<LabelPath> gold_labels;  // 1 or 2 entries
};

struct AnnotationRecord {
  std::string question_id;
  std::string annotator_id;
  std::vector<LabelPath> labels;  // 1 or 2 entries
};

// question id -> gold labels, ordered by id for deterministic iteration.
using GoldMap = std::map<std::string, std::vector<LabelPath>>;

// question id -> labels, per annotator.
using AnnotationSet = std::map<std::string, std::vector<LabelPath>>;

struct LoadOptions {
  bool strict = true;  // lenient mode downgrades unknown-id label rows to warnings
};

// One JSON object per line: id, question, choices[{label,text}], answerKey,
// optional grade, split. Ordering is preserved; ids must be unique.
std::vector<Question> load_questions(const std::filesystem::path& path);

void write_questions(const std::filesystem::path& path, const std::vector<Question>& questions);

struct SplitCounts {
  int train = 0;
  int dev = 0;
  int test = 0;
};

SplitCounts split_counts(const std::vector<Question>& questions);

struct CorpusStats {
  double mean_words = 0.0;
  double mean_sentences = 0.0;
  int n = 0;
};

// Word counts use the shared tokenizer over the question stem only; sentences
// are '.', '?', '!' terminators with a minimum of one per question.
CorpusStats corpus_stats(const std::vector<Question>& questions);

// Labels TSV: question_id \t code[,code]. Codes are validated against the
// taxonomy and expanded to full root paths; at most 2 labels per question.
GoldMap load_gold_labels(const std::filesystem::path& path, const Taxonomy& taxonomy,
                         const LoadOptions& options = {});

// Same validation for rows the strict/lenient unknown-id rule applies to.
GoldMap load_gold_labels(const std::filesystem::path& path, const Taxonomy& taxonomy,
                         const std::vector<Question>& questions, const LoadOptions& options = {});

void write_gold_labels(const std::filesystem::path& path, const GoldMap& gold);

// Annotations TSV: question_id \t annotator_id \t code[,code].
std::vector<AnnotationRecord> load_annotations(const std::filesystem::path& path,
                                               const Taxonomy& taxonomy);

// Groups records by annotator; each annotator_id maps question id -> labels.
std::map<std::string, AnnotationSet> annotations_by_annotator(
    const std::vector<AnnotationRecord>& records);

// Joins questions with their gold labels (questions without labels are skipped;
// in strict mode labels without questions were already rejected at load).
std::vector<LabeledQuestion> join_labels(const std::vector<Question>& questions,
                                         const GoldMap& gold);

}  // namespace qc
