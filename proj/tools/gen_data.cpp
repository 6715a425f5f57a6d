// Regenerates the bundled synthetic stand-in data under data/.
// Usage: qc_gen_data <output-dir>
#include <cstdio>
#include <filesystem>

#include "qc/corpus.hpp"
#include "qc/synth.hpp"

using namespace qc;

namespace {

void write_corpus(const std::filesystem::path& dir, const std::string& stem,
                  const synth::Corpus& corpus) {
  write_taxonomy(dir / (stem + "_taxonomy.tsv"), corpus.nodes);
  write_questions(dir / (stem + "_questions.jsonl"), corpus.questions);
  write_gold_labels(dir / (stem + "_labels.tsv"), corpus.gold);
}

}  // namespace

int main(int argc, char** argv) {
  if (argc != 2) {
    std::fprintf(stderr, "usage: qc_gen_data <output-dir>\n");
    return 1;
  }
  const std::filesystem::path dir = argv[1];
  std::filesystem::create_directories(dir);

  // Level cardinalities 9/88/243/335/379/406, with gold labels covering
  // every maximal label.
  auto coverage = synth::coverage_corpus({9, 88, 243, 335, 379, 406}, 20240601);
  write_corpus(dir, "cardinality", coverage);

  write_corpus(dir, "qc", synth::qc_benchmark(1000, 20240229));
  write_corpus(dir, "qa", synth::qa_benchmark(600, 77));

  std::printf("wrote synthetic data to %s\n", dir.string().c_str());
  return 0;
}
