#pragma once

#include <unistd.h>

#include <filesystem>
#include <fstream>
#include <string>
#include <vector>

#include "qc/corpus.hpp"
#include "qc/taxonomy.hpp"

namespace qc::test {

// Matter -> Changes of State -> {Boiling, Freezing}, plus side branches.
inline Taxonomy sample_taxonomy() {
  std::vector<TaxonomyNode> nodes = {
      {"MAT", "", "Matter", "Matter"},
      {"MAT_COS", "MAT", "Changes of State", "Changes of State"},
      {"MAT_COS_BOILING", "MAT_COS", "Boiling", "Boiling"},
      {"MAT_COS_FREEZING", "MAT_COS", "Freezing", "Freezing"},
      {"ENG", "", "Energy", "Energy"},
      {"ENG_LIGHT", "ENG", "Light", "Light"},
      {"SAF", "", "Safety", "Safety"},
  };
  return Taxonomy::from_nodes(std::move(nodes));
}

inline Question make_question(std::string id, std::string text,
                              std::vector<std::string> candidate_texts = {"one", "two", "three",
                                                                          "four"},
                              std::string answer_key = "A", Split split = Split::train) {
  Question q;
  q.id = std::move(id);
  q.text = std::move(text);
  char key = 'A';
  for (auto& text_i : candidate_texts) {
    q.candidates.push_back(AnswerCandidate{std::string(1, key++), std::move(text_i)});
  }
  q.answer_key = std::move(answer_key);
  q.split = split;
  return q;
}

class TempDir {
 public:
  explicit TempDir(const std::string& tag) {
    dir_ = std::filesystem::temp_directory_path() /
           ("qclab_test_" + tag + "_" + std::to_string(::getpid()));
    std::filesystem::create_directories(dir_);
  }
  ~TempDir() {
    std::error_code ec;
    std::filesystem::remove_all(dir_, ec);
  }
  std::filesystem::path path(const std::string& name) const { return dir_ / name; }
  const std::filesystem::path& dir() const { return dir_; }

  std::filesystem::path write(const std::string& name, const std::string& content) const {
    auto p = dir_ / name;
    std::filesystem::create_directories(p.parent_path());
    std::ofstream out(p);
    out << content;
    return p;
  }

 private:
  std::filesystem::path dir_;
};

}  // namespace qc::test
