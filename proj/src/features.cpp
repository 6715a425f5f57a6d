#include "qc/features.hpp"

#include <algorithm>
#include <array>
#include <iostream>
#include <mutex>

#include "qc/errors.hpp"
#include "qc/io.hpp"

namespace qc {

void FeatureVector::add_max(const std::string& name, double weight) {
  if (weight == 0.0) return;
  auto [it, inserted] = entries.emplace(name, weight);
  if (!inserted && weight > it->second) it->second = weight;
}

void FeatureVector::add_count(const std::string& name, double count) {
  if (count == 0.0) return;
  entries[name] += count;
  if (entries[name] == 0.0) entries.erase(name);
}

void FeatureVector::merge_max(const FeatureVector& other) {
  for (const auto& [name, weight] : other.entries) add_max(name, weight);
}

double FeatureVector::get(const std::string& name) const {
  auto it = entries.find(name);
  return it == entries.end() ? 0.0 : it->second;
}

std::vector<std::pair<std::string, double>> FeatureVector::sorted() const {
  std::vector<std::pair<std::string, double>> out(entries.begin(), entries.end());
  std::sort(out.begin(), out.end());
  return out;
}

std::string lowercase(const std::string& s) {
  std::string out = s;
  for (char& c : out) {
    if (c >= 'A' && c <= 'Z') c = static_cast<char>(c - 'A' + 'a');
  }
  return out;
}

namespace {

// Word characters: ASCII letters and digits, plus any non-ASCII byte so
// UTF-8 content passes through unsplit.
bool is_word_char(unsigned char c) {
  return (c >= 'a' && c <= 'z') || (c >= 'A' && c <= 'Z') || (c >= '0' && c <= '9') || c >= 0x80;
}

void warn_once(const char* message) {
  static std::mutex mu;
  static std::set<std::string> seen;
  std::lock_guard<std::mutex> lock(mu);
  if (seen.insert(message).second) std::cerr << "warning: " << message << "\n";
}

}  // namespace

std::vector<std::string> tokenize(const std::string& text) {
  std::vector<std::string> tokens;
  std::string current;
  for (unsigned char c : text) {
    if (is_word_char(c)) {
      if (c >= 'A' && c <= 'Z') c = static_cast<unsigned char>(c - 'A' + 'a');
      current.push_back(static_cast<char>(c));
    } else if (!current.empty()) {
      tokens.push_back(std::move(current));
      current.clear();
    }
  }
  if (!current.empty()) tokens.push_back(std::move(current));
  return tokens;
}

bool is_stopword(const std::string& token) {
  static const std::set<std::string> kStopwords = {
      "a",     "about", "above", "after",  "again",  "all",    "also",  "am",     "an",
      "and",   "any",   "are",   "as",     "at",     "be",     "been",  "before", "being",
      "below", "both",  "but",   "by",     "can",    "cannot", "could", "did",    "do",
      "does",  "doing", "down",  "during", "each",   "few",    "for",   "from",   "further",
      "had",   "has",   "have",  "having", "he",     "her",    "here",  "hers",   "him",
      "his",   "how",   "i",     "if",     "in",     "into",   "is",    "it",     "its",
      "just",  "me",    "more",  "most",   "my",     "no",     "nor",   "not",    "now",
      "of",    "off",   "on",    "once",   "only",   "or",     "other", "our",    "ours",
      "out",   "over",  "own",   "same",   "she",    "should", "so",    "some",   "such",
      "than",  "that",  "the",   "their",  "theirs", "them",   "then",  "there",  "these",
      "they",  "this",  "those", "through", "to",    "too",    "under", "until",  "up",
      "very",  "was",   "we",    "were",   "what",   "when",   "where", "which",  "while",
      "who",   "whom",  "why",   "will",   "with",   "would",  "you",   "your",   "yours"};
  return kStopwords.count(token) > 0;
}

FeatureVector ngram_features(const std::vector<std::string>& tokens,
                             const std::vector<std::string>* pos_tags) {
  if (pos_tags && pos_tags->size() != tokens.size()) {
    throw DataError("pos tag count does not match token count");
  }
  FeatureVector fv;
  for (std::size_t i = 0; i < tokens.size(); ++i) {
    fv.add_max("uni:" + tokens[i], 1.0);
    if (pos_tags) fv.add_max("uni:" + tokens[i] + "/" + (*pos_tags)[i], 1.0);
    if (i + 1 < tokens.size()) {
      fv.add_max("bi:" + tokens[i] + "_" + tokens[i + 1], 1.0);
      if (pos_tags) {
        fv.add_max("bi:" + tokens[i] + "/" + (*pos_tags)[i] + "_" + tokens[i + 1] + "/" +
                       (*pos_tags)[i + 1],
                   1.0);
      }
    }
  }
  return fv;
}

AnnotationIndex load_annotation_index(const std::filesystem::path& path) {
  AnnotationIndex index;
  std::string current_qid;
  AnnotatedSentence sentence;

  auto finish_sentence = [&](std::size_t line_no) {
    if (sentence.tokens.empty()) return;
    if (current_qid.empty()) {
      throw DataError(path.string() + ":" + std::to_string(line_no) +
                      ": sentence without a preceding '# qid=' line");
    }
    int roots = 0;
    const int n = static_cast<int>(sentence.tokens.size());
    for (const auto& tok : sentence.tokens) {
      if (tok.head < 0 || tok.head > n) {
        throw DataError(path.string() + ": head out of range for qid " + current_qid);
      }
      if (tok.head == 0) ++roots;
    }
    if (roots != 1) {
      throw DataError(path.string() + ": expected exactly one root per sentence, qid " +
                      current_qid);
    }
    index[current_qid].push_back(std::move(sentence));
    sentence = AnnotatedSentence{};
  };

  for_each_line(path, [&](std::size_t line_no, const std::string& line) {
    if (line.empty()) {
      finish_sentence(line_no);
      return;
    }
    if (line.rfind("# qid=", 0) == 0) {
      finish_sentence(line_no);
      current_qid = line.substr(6);
      return;
    }
    if (line[0] == '#') return;
    auto fields = split_tabs(line);
    if (fields.size() != 4) {
      throw DataError(path.string() + ":" + std::to_string(line_no) +
                      ": expected index \\t token \\t pos \\t head");
    }
    TokenAnnotation tok;
    try {
      tok.index = std::stoi(fields[0]);
      tok.head = std::stoi(fields[3]);
    } catch (const std::exception&) {
      throw DataError(path.string() + ":" + std::to_string(line_no) + ": non-numeric index/head");
    }
    tok.token = fields[1];
    tok.pos = fields[2];
    if (tok.index != static_cast<int>(sentence.tokens.size()) + 1) {
      throw DataError(path.string() + ":" + std::to_string(line_no) + ": token index not sequential");
    }
    sentence.tokens.push_back(std::move(tok));
  });
  finish_sentence(0);
  return index;
}

FeatureVector dependency_features(const std::vector<AnnotatedSentence>& sentences) {
  FeatureVector fv;
  for (const auto& sentence : sentences) {
    const int n = static_cast<int>(sentence.tokens.size());
    for (const auto& tok : sentence.tokens) {
      if (tok.head <= 0) continue;
      if (tok.head > n) throw DataError("dependency head out of range");
      const auto& governor = sentence.tokens[tok.head - 1];
      fv.add_max("dep:" + lowercase(governor.token) + "_" + lowercase(tok.token), 1.0);
    }
  }
  return fv;
}

SenseInventory SenseInventory::load(const std::filesystem::path& senses_tsv,
                                    const std::filesystem::path& edges_tsv) {
  SenseInventory inv;
  for_each_tsv_row(senses_tsv, [&](std::size_t line_no, const std::vector<std::string>& fields) {
    if (fields.size() != 3) {
      throw DataError(senses_tsv.string() + ":" + std::to_string(line_no) +
                      ": expected term \\t sense_id \\t gloss");
    }
    inv.senses_by_term[lowercase(fields[0])].push_back(Sense{fields[1], fields[2]});
  });
  for_each_tsv_row(edges_tsv, [&](std::size_t line_no, const std::vector<std::string>& fields) {
    if (fields.size() != 3) {
      throw DataError(edges_tsv.string() + ":" + std::to_string(line_no) +
                      ": expected sense_id \\t hypernym_sense_id \\t hypernym_surface");
    }
    if (inv.hypernym_of.count(fields[0])) {
      throw DataError(edges_tsv.string() + ":" + std::to_string(line_no) +
                      ": duplicate hypernym edge for sense " + fields[0]);
    }
    inv.hypernym_of[fields[0]] = HypernymEdge{fields[1], fields[2]};
  });
  // Hypernym chains must terminate.
  for (const auto& [sense_id, edge] : inv.hypernym_of) {
    std::string cur = sense_id;
    std::size_t steps = 0;
    while (inv.hypernym_of.count(cur)) {
      cur = inv.hypernym_of.at(cur).parent_id;
      if (++steps > inv.hypernym_of.size()) {
        throw DataError("cycle in hypernym chain starting at sense " + sense_id);
      }
    }
  }
  return inv;
}

std::optional<std::string> lesk_sense(const std::string& word,
                                      const std::vector<std::string>& context_tokens,
                                      const SenseInventory& inventory) {
  auto it = inventory.senses_by_term.find(lowercase(word));
  if (it == inventory.senses_by_term.end() || it->second.empty()) return std::nullopt;

  std::set<std::string> context;
  for (const auto& tok : context_tokens) {
    if (!is_stopword(tok)) context.insert(tok);
  }
  const Sense* best = nullptr;
  std::size_t best_overlap = 0;
  for (const auto& sense : it->second) {
    std::set<std::string> gloss_tokens;
    for (const auto& tok : tokenize(sense.gloss)) {
      if (!is_stopword(tok)) gloss_tokens.insert(tok);
    }
    std::size_t overlap = 0;
    for (const auto& tok : gloss_tokens) {
      if (context.count(tok)) ++overlap;
    }
    if (!best || overlap > best_overlap) {  // ties keep the first-listed sense
      best = &sense;
      best_overlap = overlap;
    }
  }
  return best->id;
}

FeatureVector hypernym_features(const std::vector<AnnotatedSentence>& sentences,
                                const SenseInventory& inventory, int max_depth, double decay) {
  FeatureVector fv;
  for (const auto& sentence : sentences) {
    // Expansion targets: the dependency root and its direct dependents.
    std::vector<std::string> words;
    std::vector<std::string> context;
    int root_index = 0;
    for (const auto& tok : sentence.tokens) {
      context.push_back(lowercase(tok.token));
      if (tok.head == 0) root_index = tok.index;
    }
    for (const auto& tok : sentence.tokens) {
      if (tok.index == root_index || tok.head == root_index) {
        words.push_back(lowercase(tok.token));
      }
    }
    for (const auto& word : words) {
      auto sense = lesk_sense(word, context, inventory);
      if (!sense) continue;
      std::string cur = *sense;
      double weight = 1.0;
      for (int d = 1; d <= max_depth; ++d) {
        auto edge = inventory.hypernym_of.find(cur);
        if (edge == inventory.hypernym_of.end()) break;
        weight *= decay;
        fv.add_max("hyp:" + lowercase(edge->second.surface), weight);
        cur = edge->second.parent_id;
      }
    }
  }
  return fv;
}

TopicWordlists TopicWordlists::load(const std::filesystem::path& directory) {
  namespace fs = std::filesystem;
  if (!fs::is_directory(directory)) {
    throw DataError("wordlist directory not found: " + directory.string());
  }
  std::vector<fs::path> files;
  for (const auto& entry : fs::directory_iterator(directory)) {
    if (entry.is_regular_file()) files.push_back(entry.path());
  }
  std::sort(files.begin(), files.end());
  TopicWordlists wl;
  for (const auto& file : files) {
    std::string topic = file.stem().string();
    if (wl.lists.count(topic)) throw DataError("duplicate topic name: " + topic);
    auto& terms = wl.lists[topic];
    for_each_line(file, [&](std::size_t, const std::string& line) {
      if (line.empty() || line[0] == '#') return;
      terms.insert(lowercase(line));
    });
  }
  return wl;
}

FeatureVector topic_features(const std::vector<std::string>& tokens,
                             const TopicWordlists& wordlists) {
  FeatureVector fv;
  for (const auto& [topic, terms] : wordlists.lists) {
    double count = 0;
    for (const auto& tok : tokens) {
      if (terms.count(tok)) count += 1;
    }
    if (count > 0) fv.add_count("topic:" + topic, count);
  }
  return fv;
}

EssentialTerms load_essential_terms(const std::filesystem::path& path) {
  EssentialTerms terms;
  for_each_tsv_row(path, [&](std::size_t line_no, const std::vector<std::string>& fields) {
    if (fields.size() != 2) {
      throw DataError(path.string() + ":" + std::to_string(line_no) +
                      ": expected question_id \\t term[,term...]");
    }
    auto& list = terms[fields[0]];
    for (const auto& term : split_char(fields[1], ',')) list.push_back(lowercase(term));
  });
  return terms;
}

FeatureVector essential_features(const std::vector<std::string>& tokens,
                                 const std::vector<std::string>& keywords) {
  FeatureVector fv;
  std::set<std::string> present(tokens.begin(), tokens.end());
  for (const auto& keyword : keywords) {
    if (present.count(keyword)) fv.add_max("ess:" + keyword, 1.0);
  }
  return fv;
}

FeatureVector hierarchy_features(const std::vector<ScoredLabel>& prev_level_ranked, int top_k) {
  FeatureVector fv;
  const int n = std::min<int>(top_k, static_cast<int>(prev_level_ranked.size()));
  for (int i = 0; i < n; ++i) fv.add_max("hier:" + prev_level_ranked[i].code, 1.0);
  return fv;
}

void FeatureConfig::validate() const {
  if (!(use_unigrams || use_bigrams || use_pos_tagged || use_dependencies || use_hypernyms ||
        use_topics || use_essential || use_hierarchy)) {
    throw DataError("feature config enables no extractor");
  }
  if (hypernym_max_depth < 1) throw DataError("hypernym_max_depth must be >= 1");
  if (hypernym_decay <= 0.0 || hypernym_decay > 1.0) {
    throw DataError("hypernym_decay must be in (0, 1]");
  }
  if (top_k_hier < 1) throw DataError("top_k_hier must be >= 1");
}

namespace {

// Tagged n-grams use the annotation file's own tokenization; punctuation-only
// tokens are dropped so tags stay aligned with word tokens.
void tagged_tokens(const std::vector<AnnotatedSentence>& sentences,
                   std::vector<std::string>& tokens, std::vector<std::string>& tags) {
  for (const auto& sentence : sentences) {
    for (const auto& tok : sentence.tokens) {
      std::string lowered = lowercase(tok.token);
      bool has_word_char = false;
      for (unsigned char c : lowered) {
        if (is_word_char(c)) {
          has_word_char = true;
          break;
        }
      }
      if (!has_word_char) continue;
      tokens.push_back(std::move(lowered));
      tags.push_back(tok.pos);
    }
  }
}

}  // namespace

FeatureVector assemble(const Question& question, const FeatureConfig& config,
                       const Resources& resources,
                       const std::vector<ScoredLabel>* prev_level_ranked) {
  config.validate();
  FeatureVector fv;

  std::vector<std::vector<std::string>> segments;
  segments.push_back(tokenize(question.text));
  if (config.include_answer_text) {
    for (const auto& candidate : question.candidates) {
      segments.push_back(tokenize(candidate.text));
    }
  }

  const std::vector<AnnotatedSentence>* sentences = nullptr;
  if (resources.annotations) {
    auto it = resources.annotations->find(question.id);
    if (it != resources.annotations->end()) sentences = &it->second;
  }

  if (config.use_unigrams || config.use_bigrams) {
    for (const auto& tokens : segments) {
      FeatureVector ngrams = ngram_features(tokens);
      if (!config.use_unigrams || !config.use_bigrams) {
        const char* drop = config.use_unigrams ? "bi:" : "uni:";
        for (auto it = ngrams.entries.begin(); it != ngrams.entries.end();) {
          it = it->first.rfind(drop, 0) == 0 ? ngrams.entries.erase(it) : std::next(it);
        }
      }
      fv.merge_max(ngrams);
    }
  }

  if (config.use_pos_tagged) {
    if (sentences) {
      std::vector<std::string> tokens, tags;
      tagged_tokens(*sentences, tokens, tags);
      FeatureVector tagged = ngram_features(tokens, &tags);
      // Keep only the tagged variants; plain n-grams are handled above.
      for (auto it = tagged.entries.begin(); it != tagged.entries.end();) {
        it = it->first.find('/') == std::string::npos ? tagged.entries.erase(it) : std::next(it);
      }
      fv.merge_max(tagged);
    } else if (resources.annotations == std::nullopt) {
      warn_once("pos-tagged features enabled but no annotation file configured; skipping");
    }
  }

  if (config.use_dependencies) {
    if (sentences) {
      fv.merge_max(dependency_features(*sentences));
    } else if (resources.annotations == std::nullopt) {
      warn_once("dependency features enabled but no annotation file configured; skipping");
    }
  }

  if (config.use_hypernyms) {
    if (!resources.senses) {
      throw DataError("hypernym features enabled but no sense inventory configured");
    }
    if (sentences) {
      fv.merge_max(hypernym_features(*sentences, *resources.senses, config.hypernym_max_depth,
                                     config.hypernym_decay));
    } else if (resources.annotations == std::nullopt) {
      warn_once("hypernym features enabled but no annotation file configured; skipping");
    }
  }

  if (config.use_topics) {
    if (!resources.wordlists) {
      throw DataError("topic features enabled but no wordlist directory configured");
    }
    for (const auto& tokens : segments) {
      for (const auto& [name, weight] : topic_features(tokens, *resources.wordlists).entries) {
        fv.add_count(name, weight);
      }
    }
  }

  if (config.use_essential) {
    std::vector<std::string> all_tokens;
    for (const auto& tokens : segments) {
      all_tokens.insert(all_tokens.end(), tokens.begin(), tokens.end());
    }
    const std::vector<std::string>* keywords = nullptr;
    if (resources.essential) {
      auto it = resources.essential->find(question.id);
      if (it != resources.essential->end()) keywords = &it->second;
    } else if (!config.essential_fallback) {
      warn_once("essential-term features enabled but no keyword file configured; skipping");
    }
    if (keywords) {
      fv.merge_max(essential_features(all_tokens, *keywords));
    } else if (config.essential_fallback && !resources.essential) {
      std::vector<std::string> content;
      for (const auto& tok : all_tokens) {
        if (!is_stopword(tok)) content.push_back(tok);
      }
      fv.merge_max(essential_features(all_tokens, content));
    }
  }

  if (config.use_hierarchy && prev_level_ranked) {
    fv.merge_max(hierarchy_features(*prev_level_ranked, config.top_k_hier));
  }

  return fv;
}

}  // namespace qc
