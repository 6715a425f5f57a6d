#include "qc/corpus.hpp"

#include <iostream>
#include <set>
#include <sstream>

#include <json.hpp>

#include "qc/errors.hpp"
#include "qc/features.hpp"
#include "qc/io.hpp"

namespace qc {

using nlohmann::json;

Split parse_split(const std::string& tag) {
  if (tag == "train") return Split::train;
  if (tag == "dev") return Split::dev;
  if (tag == "test") return Split::test;
  throw DataError("unknown split tag: " + tag);
}

std::string split_tag(Split s) {
  switch (s) {
    case Split::train: return "train";
    case Split::dev: return "dev";
    case Split::test: return "test";
  }
  throw DataError("invalid split value");
}

const AnswerCandidate* Question::candidate(const std::string& key) const {
  for (const auto& c : candidates) {
    if (c.key == key) return &c;
  }
  return nullptr;
}

std::vector<Question> load_questions(const std::filesystem::path& path) {
  std::vector<Question> questions;
  std::set<std::string> seen_ids;
  for_each_line(path, [&](std::size_t line_no, const std::string& line) {
    if (line.empty()) return;
    const std::string where = path.string() + ":" + std::to_string(line_no);
    json obj;
    try {
      obj = json::parse(line);
    } catch (const json::parse_error& e) {
      throw DataError(where + ": malformed JSON: " + e.what());
    }
    try {
      Question q;
      q.id = obj.at("id").get<std::string>();
      q.text = obj.at("question").get<std::string>();
      for (const auto& choice : obj.at("choices")) {
        AnswerCandidate c;
        c.key = choice.at("label").get<std::string>();
        c.text = choice.at("text").get<std::string>();
        for (const auto& prev : q.candidates) {
          if (prev.key == c.key) throw DataError("duplicate candidate key " + c.key);
        }
        q.candidates.push_back(std::move(c));
      }
      q.answer_key = obj.at("answerKey").get<std::string>();
      if (obj.contains("grade")) q.grade = obj.at("grade").get<int>();
      q.split = obj.contains("split") ? parse_split(obj.at("split").get<std::string>())
                                      : Split::train;
      if (q.text.empty()) throw DataError("empty question text");
      if (!q.candidate(q.answer_key)) {
        throw DataError("answerKey '" + q.answer_key + "' matches no candidate");
      }
      if (!seen_ids.insert(q.id).second) throw DataError("duplicate question id " + q.id);
      questions.push_back(std::move(q));
    } catch (const json::exception& e) {
      throw DataError(where + ": " + e.what());
    } catch (const DataError& e) {
      throw DataError(where + ": " + e.what());
    }
  });
  return questions;
}

void write_questions(const std::filesystem::path& path, const std::vector<Question>& questions) {
  std::ostringstream out;
  for (const auto& q : questions) {
    json obj;
    obj["id"] = q.id;
    obj["question"] = q.text;
    json choices = json::array();
    for (const auto& c : q.candidates) choices.push_back({{"label", c.key}, {"text", c.text}});
    obj["choices"] = std::move(choices);
    obj["answerKey"] = q.answer_key;
    if (q.grade) obj["grade"] = *q.grade;
    obj["split"] = split_tag(q.split);
    out << obj.dump() << '\n';
  }
  atomic_write(path, out.str());
}

SplitCounts split_counts(const std::vector<Question>& questions) {
  SplitCounts counts;
  for (const auto& q : questions) {
    switch (q.split) {
      case Split::train: ++counts.train; break;
      case Split::dev: ++counts.dev; break;
      case Split::test: ++counts.test; break;
    }
  }
  return counts;
}

CorpusStats corpus_stats(const std::vector<Question>& questions) {
  CorpusStats stats;
  stats.n = static_cast<int>(questions.size());
  if (questions.empty()) return stats;
  long long words = 0;
  long long sentences = 0;
  for (const auto& q : questions) {
    words += static_cast<long long>(tokenize(q.text).size());
    long long terminators = 0;
    for (char c : q.text) {
      if (c == '.' || c == '?' || c == '!') ++terminators;
    }
    sentences += std::max(terminators, 1LL);
  }
  stats.mean_words = static_cast<double>(words) / stats.n;
  stats.mean_sentences = static_cast<double>(sentences) / stats.n;
  return stats;
}

namespace {

std::vector<LabelPath> parse_label_field(const std::string& field, const Taxonomy& taxonomy,
                                         const std::string& where) {
  std::vector<LabelPath> labels;
  for (const auto& code : split_char(field, ',')) {
    if (!taxonomy.contains(code)) throw DataError(where + ": unknown taxonomy code " + code);
    LabelPath path = taxonomy.path_to(code);
    for (const auto& prev : labels) {
      if (prev == path) throw DataError(where + ": duplicate label " + code);
    }
    labels.push_back(std::move(path));
  }
  if (labels.empty()) throw DataError(where + ": empty label list");
  if (labels.size() > 2) throw DataError(where + ": more than 2 labels");
  return labels;
}

}  // namespace

GoldMap load_gold_labels(const std::filesystem::path& path, const Taxonomy& taxonomy,
                         const LoadOptions&) {
  GoldMap gold;
  for_each_tsv_row(path, [&](std::size_t line_no, const std::vector<std::string>& fields) {
    const std::string where = path.string() + ":" + std::to_string(line_no);
    if (fields.size() != 2) throw DataError(where + ": expected question_id \\t code[,code]");
    if (gold.count(fields[0])) throw DataError(where + ": duplicate labels for id " + fields[0]);
    gold[fields[0]] = parse_label_field(fields[1], taxonomy, where);
  });
  return gold;
}

GoldMap load_gold_labels(const std::filesystem::path& path, const Taxonomy& taxonomy,
                         const std::vector<Question>& questions, const LoadOptions& options) {
  GoldMap gold = load_gold_labels(path, taxonomy, options);
  std::set<std::string> ids;
  for (const auto& q : questions) ids.insert(q.id);
  for (auto it = gold.begin(); it != gold.end();) {
    if (!ids.count(it->first)) {
      if (options.strict) {
        throw DataError(path.string() + ": label row for unknown question id " + it->first);
      }
      std::cerr << "warning: skipping labels for unknown question id " << it->first << "\n";
      it = gold.erase(it);
    } else {
      ++it;
    }
  }
  return gold;
}

void write_gold_labels(const std::filesystem::path& path, const GoldMap& gold) {
  std::ostringstream out;
  for (const auto& [id, labels] : gold) {
    out << id << '\t';
    for (std::size_t i = 0; i < labels.size(); ++i) {
      if (i) out << ',';
      out << labels[i].leaf();
    }
    out << '\n';
  }
  atomic_write(path, out.str());
}

std::vector<AnnotationRecord> load_annotations(const std::filesystem::path& path,
                                               const Taxonomy& taxonomy) {
  std::vector<AnnotationRecord> records;
  for_each_tsv_row(path, [&](std::size_t line_no, const std::vector<std::string>& fields) {
    const std::string where = path.string() + ":" + std::to_string(line_no);
    if (fields.size() != 3) {
      throw DataError(where + ": expected question_id \\t annotator_id \\t code[,code]");
    }
    AnnotationRecord rec;
    rec.question_id = fields[0];
    rec.annotator_id = fields[1];
    rec.labels = parse_label_field(fields[2], taxonomy, where);
    records.push_back(std::move(rec));
  });
  return records;
}

std::map<std::string, AnnotationSet> annotations_by_annotator(
    const std::vector<AnnotationRecord>& records) {
  std::map<std::string, AnnotationSet> out;
  for (const auto& rec : records) {
    auto& per_question = out[rec.annotator_id];
    if (per_question.count(rec.question_id)) {
      throw DataError("annotator " + rec.annotator_id + " labels question " + rec.question_id +
                      " twice");
    }
    per_question[rec.question_id] = rec.labels;
  }
  return out;
}

std::vector<LabeledQuestion> join_labels(const std::vector<Question>& questions,
                                         const GoldMap& gold) {
  std::vector<LabeledQuestion> out;
  for (const auto& q : questions) {
    auto it = gold.find(q.id);
    if (it == gold.end()) continue;
    out.push_back(LabeledQuestion{q, it->second});
  }
  return out;
}

}  // namespace qc
