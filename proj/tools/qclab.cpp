// qclab: config-driven command-line front end for the question-classification
// laboratory. Exit codes: 0 ok, 1 usage, 2 data error, 3 internal error.
#include <CLI11.hpp>

#include <filesystem>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <json.hpp>

#include "qc/analysis.hpp"
#include "qc/classifier.hpp"
#include "qc/corpus.hpp"
#include "qc/errors.hpp"
#include "qc/features.hpp"
#include "qc/io.hpp"
#include "qc/metrics.hpp"
#include "qc/parallel.hpp"
#include "qc/qa.hpp"
#include "qc/rng.hpp"
#include "qc/serialize.hpp"
#include "qc/synth.hpp"
#include "qc/taxonomy.hpp"

using nlohmann::json;

namespace {

struct Paths {
  std::string questions;
  std::string labels;
  std::string taxonomy;
  std::string annotations;  // interannotator file
  std::string conll;        // token/POS/dependency annotations
  std::string senses;
  std::string hypernyms;
  std::string wordlists;
  std::string essential;
  std::string model;
  std::string predictions;
  std::string ref_corpus;
  std::string scores;
  std::string out;
};

struct RunConfig {
  Paths paths;
  qc::FeatureConfig features;
  qc::TrainConfig train;
  std::vector<int> levels;
  std::uint64_t seed = 13;
  bool strict = true;
  int threads = 0;  // 0 = all cores
};

void merge_paths(const json& j, Paths& paths) {
  auto get = [&](const char* key, std::string& field) {
    if (j.contains(key) && field.empty()) field = j.at(key).get<std::string>();
  };
  get("questions", paths.questions);
  get("labels", paths.labels);
  get("taxonomy", paths.taxonomy);
  get("annotations", paths.annotations);
  get("conll", paths.conll);
  get("senses", paths.senses);
  get("hypernyms", paths.hypernyms);
  get("wordlists", paths.wordlists);
  get("essential", paths.essential);
  get("model", paths.model);
  get("predictions", paths.predictions);
  get("ref_corpus", paths.ref_corpus);
  get("scores", paths.scores);
  get("out", paths.out);
}

// Flags override the config file; config paths fill only still-empty fields.
void apply_config_file(const std::string& config_path, RunConfig& config, bool seed_set,
                       bool threads_set, bool strict_set, bool levels_set) {
  if (config_path.empty()) return;
  json j;
  try {
    j = json::parse(qc::read_file(config_path));
  } catch (const json::parse_error& e) {
    throw qc::DataError(config_path + ": bad config JSON: " + e.what());
  }
  if (j.contains("paths")) merge_paths(j.at("paths"), config.paths);
  if (j.contains("features")) config.features = j.at("features").get<qc::FeatureConfig>();
  if (j.contains("train")) config.train = j.at("train").get<qc::TrainConfig>();
  if (!seed_set && j.contains("seed")) config.seed = j.at("seed").get<std::uint64_t>();
  if (!threads_set && j.contains("threads")) config.threads = j.at("threads").get<int>();
  if (!strict_set && j.contains("strict")) config.strict = j.at("strict").get<bool>();
  if (!levels_set && j.contains("levels")) {
    config.levels = j.at("levels").get<std::vector<int>>();
  }
}

std::string require(const std::string& value, const char* what) {
  if (value.empty()) throw qc::DataError(std::string("missing required path: ") + what);
  return value;
}

qc::Taxonomy load_taxonomy(const RunConfig& config) {
  return qc::Taxonomy::load(require(config.paths.taxonomy, "--taxonomy"));
}

std::vector<qc::Question> load_questions_for(const RunConfig& config) {
  return qc::load_questions(require(config.paths.questions, "--questions"));
}

qc::Resources load_resources(const RunConfig& config) {
  qc::Resources resources;
  if (!config.paths.conll.empty()) {
    resources.annotations = qc::load_annotation_index(config.paths.conll);
  }
  if (!config.paths.senses.empty() || !config.paths.hypernyms.empty()) {
    resources.senses = qc::SenseInventory::load(require(config.paths.senses, "--senses"),
                                                require(config.paths.hypernyms, "--hypernyms"));
  }
  if (!config.paths.wordlists.empty()) {
    resources.wordlists = qc::TopicWordlists::load(config.paths.wordlists);
  }
  if (!config.paths.essential.empty()) {
    resources.essential = qc::load_essential_terms(config.paths.essential);
  }
  return resources;
}

std::vector<int> levels_or_default(const RunConfig& config, int max_level) {
  if (!config.levels.empty()) return config.levels;
  std::vector<int> levels;
  for (int level = 1; level <= max_level; ++level) levels.push_back(level);
  return levels;
}

void emit(const RunConfig& config, const std::string& content) {
  if (config.paths.out.empty()) {
    std::cout << content;
    if (!content.empty() && content.back() != '\n') std::cout << '\n';
  } else {
    qc::atomic_write(config.paths.out, content);
  }
}

void note_seed(std::uint64_t seed) { std::cerr << "effective seed: " << seed << "\n"; }

std::vector<qc::Question> filter_split(std::vector<qc::Question> questions,
                                       const std::string& split) {
  if (split == "all") return questions;
  const qc::Split wanted = qc::parse_split(split);
  std::vector<qc::Question> out;
  for (auto& q : questions) {
    if (q.split == wanted) out.push_back(std::move(q));
  }
  return out;
}

// --- subcommand bodies -----------------------------------------------------

int cmd_taxonomy_validate(const RunConfig& config) {
  qc::Taxonomy tax = load_taxonomy(config);
  json out;
  out["nodes"] = tax.size();
  out["max_depth"] = tax.max_depth();
  out["fingerprint"] = tax.fingerprint();
  json per_level = json::object();
  for (int level = 1; level <= tax.max_depth(); ++level) {
    per_level[std::to_string(level)] = tax.labels_at_level(level).size();
  }
  out["taxonomy_labels_per_level"] = std::move(per_level);
  if (!config.paths.labels.empty()) {
    qc::GoldMap gold = qc::load_gold_labels(config.paths.labels, tax);
    std::vector<qc::LabelPath> inventory;
    for (const auto& [id, labels] : gold) {
      inventory.insert(inventory.end(), labels.begin(), labels.end());
    }
    json observed = json::object();
    for (int level = 1; level <= tax.max_depth(); ++level) {
      observed[std::to_string(level)] = qc::Taxonomy::labels_at_level(inventory, level).size();
    }
    out["observed_labels_per_level"] = std::move(observed);
    out["labeled_questions"] = gold.size();
  }
  emit(config, out.dump(2));
  return 0;
}

int cmd_stats(const RunConfig& config) {
  auto questions = load_questions_for(config);
  auto counts = qc::split_counts(questions);
  auto stats = qc::corpus_stats(questions);
  json out;
  out["total_questions"] = questions.size();
  out["splits"] = {{"train", counts.train}, {"dev", counts.dev}, {"test", counts.test}};
  out["mean_words_per_question"] = stats.mean_words;
  out["mean_sentences_per_question"] = stats.mean_sentences;
  emit(config, out.dump(2));
  return 0;
}

std::vector<qc::LabeledQuestion> labeled_train_split(const RunConfig& config,
                                                     const qc::Taxonomy& tax,
                                                     std::vector<qc::Question>* all_questions) {
  auto questions = load_questions_for(config);
  qc::GoldMap gold = qc::load_gold_labels(require(config.paths.labels, "--labels"), tax,
                                          questions, {.strict = config.strict});
  std::vector<qc::LabeledQuestion> dataset;
  for (const auto& q : questions) {
    if (q.split != qc::Split::train) continue;
    auto it = gold.find(q.id);
    if (it == gold.end()) continue;
    dataset.push_back(qc::LabeledQuestion{q, it->second});
  }
  if (all_questions) *all_questions = std::move(questions);
  return dataset;
}

int cmd_train(const RunConfig& config, int max_level) {
  qc::Taxonomy tax = load_taxonomy(config);
  auto dataset = labeled_train_split(config, tax, nullptr);
  if (dataset.empty()) throw qc::DataError("train: no labeled questions in the train split");
  qc::Resources resources = load_resources(config);
  qc::TrainConfig train = config.train;
  train.seed = config.seed;
  note_seed(train.seed);
  qc::HierarchicalClassifier hc = qc::HierarchicalClassifier::train(
      dataset, max_level, config.features, train, tax, resources, config.threads);
  hc.save(require(config.paths.model, "--model"));
  std::cerr << "trained " << max_level << " level(s) on " << dataset.size() << " questions\n";
  return 0;
}

int cmd_predict(const RunConfig& config, const std::string& split, int cv_folds) {
  qc::Taxonomy tax = load_taxonomy(config);
  qc::Resources resources = load_resources(config);
  std::vector<qc::RankedPrediction> output;

  if (cv_folds > 0) {
    // Cross-validated predictions over the training questions; usable as the
    // "predicted" label source when training downstream QA models.
    auto dataset = labeled_train_split(config, tax, nullptr);
    if (static_cast<int>(dataset.size()) < cv_folds) {
      throw qc::DataError("predict --cv: fewer training questions than folds");
    }
    note_seed(config.seed);
    const std::vector<int> levels = levels_or_default(config, 1);
    std::map<std::string, std::vector<qc::RankedPrediction>> by_id;
    for (int fold = 0; fold < cv_folds; ++fold) {
      std::vector<qc::LabeledQuestion> train_part;
      std::vector<qc::Question> heldout;
      for (std::size_t i = 0; i < dataset.size(); ++i) {
        if (static_cast<int>(i % cv_folds) == fold) {
          heldout.push_back(dataset[i].question);
        } else {
          train_part.push_back(dataset[i]);
        }
      }
      qc::TrainConfig train = config.train;
      train.seed = qc::mix_seed(config.seed, static_cast<std::uint64_t>(fold));
      int deepest = *std::max_element(levels.begin(), levels.end());
      qc::HierarchicalClassifier hc = qc::HierarchicalClassifier::train(
          train_part, deepest, config.features, train, tax, resources, config.threads);
      auto preds = hc.predict_levels(heldout, levels, resources, config.threads);
      for (const auto& [level, rows] : preds) {
        for (const auto& pred : rows) by_id[pred.question_id].push_back(pred);
      }
    }
    for (const auto& lq : dataset) {
      auto it = by_id.find(lq.question.id);
      if (it == by_id.end()) continue;
      for (const auto& pred : it->second) output.push_back(pred);
    }
  } else {
    qc::HierarchicalClassifier hc = qc::HierarchicalClassifier::load(
        require(config.paths.model, "--model"), tax.fingerprint(), config.strict);
    auto questions = filter_split(load_questions_for(config), split);
    const std::vector<int> levels = levels_or_default(config, hc.max_level());
    auto preds = hc.predict_levels(questions, levels, resources, config.threads);
    for (int level : levels) {
      for (auto& pred : preds.at(level)) output.push_back(std::move(pred));
    }
  }
  qc::write_predictions(require(config.paths.out, "--out"), output);
  std::cerr << "wrote " << output.size() << " prediction rows\n";
  return 0;
}

int cmd_eval_qc(const RunConfig& config, int level, const std::string& compare_path) {
  qc::Taxonomy tax = load_taxonomy(config);
  qc::GoldMap gold = qc::load_gold_labels(require(config.paths.labels, "--gold"), tax);
  auto all_preds = qc::read_predictions(require(config.paths.predictions, "--pred"));
  std::vector<qc::RankedPrediction> preds;
  for (auto& pred : all_preds) {
    if (pred.level == level) preds.push_back(std::move(pred));
  }
  if (preds.empty()) throw qc::DataError("eval-qc: no predictions at level " + std::to_string(level));

  qc::EvalReport map_report = qc::map_score(preds, gold, level, config.strict);
  qc::EvalReport p1_report = qc::p_at_1(preds, gold, level, config.strict);

  json out = json::array();
  if (!compare_path.empty()) {
    auto compare_all = qc::read_predictions(compare_path);
    std::vector<qc::RankedPrediction> compare;
    for (auto& pred : compare_all) {
      if (pred.level == level) compare.push_back(std::move(pred));
    }
    qc::EvalReport base_map = qc::map_score(compare, gold, level, config.strict);
    qc::EvalReport base_p1 = qc::p_at_1(compare, gold, level, config.strict);
    // One-sided test of "--pred better than --compare", paired by question.
    qc::SignificanceResult map_sig = qc::bootstrap_significance(
        base_map.per_question, map_report.per_question, 10000, config.seed, config.threads);
    qc::SignificanceResult p1_sig = qc::bootstrap_significance(
        base_p1.per_question, p1_report.per_question, 10000, config.seed, config.threads);
    map_report.p_value = map_sig.p_value;
    p1_report.p_value = p1_sig.p_value;
    note_seed(config.seed);
  }
  out.push_back(qc::report_json(map_report));
  out.push_back(qc::report_json(p1_report));
  emit(config, out.dump(2));
  return 0;
}

qc::LabelSource parse_source(const std::string& name, double proportion, int level) {
  qc::LabelSource source;
  source.proportion = proportion;
  source.level = level;
  if (name == "none") {
    source.kind = qc::LabelSource::Kind::none;
  } else if (name == "gold") {
    source.kind = qc::LabelSource::Kind::gold;
  } else if (name == "predicted") {
    source.kind = qc::LabelSource::Kind::predicted;
  } else if (name == "perturbed") {
    source.kind = qc::LabelSource::Kind::perturbed;
  } else {
    throw qc::DataError("unknown label source: " + name);
  }
  return source;
}

// Top-1 labels from a predictions file, preferring `level` when present and
// otherwise the deepest level in the file.
std::map<std::string, qc::LabelPath> top1_from_predictions(const std::string& path,
                                                           const qc::Taxonomy& tax, int level) {
  auto all = qc::read_predictions(path);
  int chosen = 0;
  for (const auto& pred : all) {
    if (pred.ranked.empty()) continue;
    if (pred.level == level) {
      chosen = level;
      break;
    }
    chosen = std::max(chosen, pred.level);
  }
  std::map<std::string, qc::LabelPath> top1;
  for (const auto& pred : all) {
    if (pred.level != chosen || pred.ranked.empty()) continue;
    top1[pred.question_id] = tax.path_to(pred.ranked.front().code);
  }
  return top1;
}

int cmd_eval_qa(const RunConfig& config, const std::string& source_name, double proportion,
                int level, int runs, const std::string& split,
                const std::string& per_question_path) {
  qc::Taxonomy tax = load_taxonomy(config);
  auto all_questions = load_questions_for(config);
  auto questions = filter_split(all_questions, split);
  if (questions.empty()) throw qc::DataError("eval-qa: no questions in split " + split);

  qc::GoldMap gold;
  if (!config.paths.labels.empty()) {
    gold = qc::load_gold_labels(config.paths.labels, tax, all_questions,
                                {.strict = config.strict});
  }
  std::map<std::string, qc::LabelPath> predicted;
  if (!config.paths.predictions.empty()) {
    predicted = top1_from_predictions(config.paths.predictions, tax, level);
  }

  std::optional<std::vector<std::string>> reference;
  if (!config.paths.ref_corpus.empty()) {
    reference.emplace();
    qc::for_each_line(config.paths.ref_corpus, [&](std::size_t, const std::string& line) {
      if (!line.empty()) reference->push_back(line);
    });
  }

  qc::SolverFn solver;
  std::vector<qc::CandidateScores> external;
  qc::OverlapSolver overlap(questions, reference ? &*reference : nullptr);
  if (!config.paths.scores.empty()) {
    external = qc::read_candidate_scores(config.paths.scores);
    solver = qc::external_scores_solver(external, config.strict);
  } else {
    solver = overlap.as_solver();
  }

  qc::LabelSource source = parse_source(source_name, proportion, level);
  if (source.kind == qc::LabelSource::Kind::perturbed || runs > 1) note_seed(config.seed);
  qc::QAEvalOutcome outcome = qc::qa_evaluate(questions, solver, source, gold, predicted, tax,
                                              runs, config.seed, config.strict, config.threads);

  json report{{"metric", "QA-P@1"},
              {"level", level},
              {"value", outcome.mean_p_at_1},
              {"n", outcome.n},
              {"runs", outcome.runs},
              {"stddev", outcome.stddev},
              {"label_source", source_name}};
  json out = json::array({report});
  emit(config, out.dump(2));

  if (!per_question_path.empty()) {
    std::ostringstream rows;
    for (const auto& [id, correct] : outcome.first_run_correct) {
      rows << json{{"id", id}, {"correct", correct}}.dump() << '\n';
    }
    qc::atomic_write(per_question_path, rows.str());
  }
  return 0;
}

int cmd_expand(const RunConfig& config, const std::string& source_name, const std::string& id) {
  qc::Taxonomy tax = load_taxonomy(config);
  auto questions = load_questions_for(config);

  std::map<std::string, qc::LabelPath> labels;
  if (source_name == "gold") {
    qc::GoldMap gold = qc::load_gold_labels(require(config.paths.labels, "--labels"), tax,
                                            questions, {.strict = false});
    for (const auto& [qid, list] : gold) {
      if (!list.empty()) labels[qid] = list.front();
    }
  } else if (source_name == "predicted") {
    labels = top1_from_predictions(require(config.paths.predictions, "--pred"), tax, 0);
  } else if (source_name != "none") {
    throw qc::DataError("expand: unknown label source " + source_name);
  }

  std::ostringstream out;
  bool found = false;
  for (const auto& q : questions) {
    if (!id.empty() && q.id != id) continue;
    found = true;
    auto it = labels.find(q.id);
    const qc::LabelPath* label = it == labels.end() ? nullptr : &it->second;
    qc::ExpandedQuestion expanded = qc::expand_query(q, label, tax);
    if (!id.empty()) {
      out << expanded.expanded << '\n';
    } else {
      out << json{{"id", expanded.id},
                  {"prefix", expanded.prefix},
                  {"expanded", expanded.expanded}}
                 .dump()
          << '\n';
    }
  }
  if (!found) throw qc::DataError("expand: question id not found: " + id);
  emit(config, out.str());
  return 0;
}

int cmd_perturb(const RunConfig& config, double proportion, int level) {
  qc::Taxonomy tax = load_taxonomy(config);
  qc::GoldMap gold = qc::load_gold_labels(require(config.paths.labels, "--labels"), tax);
  std::map<std::string, qc::LabelPath> first;
  for (const auto& [id, labels] : gold) first[id] = labels.front();
  note_seed(config.seed);
  auto perturbed = qc::perturb_labels(first, proportion, tax, level, config.seed);
  qc::GoldMap out_map;
  for (const auto& [id, label] : perturbed) out_map[id] = {label};
  qc::write_gold_labels(require(config.paths.out, "--out"), out_map);
  return 0;
}

int cmd_sweep(const RunConfig& config, const std::vector<double>& proportions, int runs,
              int level, const std::string& split) {
  qc::Taxonomy tax = load_taxonomy(config);
  auto all_questions = load_questions_for(config);
  auto questions = filter_split(all_questions, split);
  if (questions.empty()) throw qc::DataError("sweep: no questions in split " + split);
  qc::GoldMap gold = qc::load_gold_labels(require(config.paths.labels, "--labels"), tax,
                                          all_questions, {.strict = config.strict});
  std::optional<std::vector<std::string>> reference;
  if (!config.paths.ref_corpus.empty()) {
    reference.emplace();
    qc::for_each_line(config.paths.ref_corpus, [&](std::size_t, const std::string& line) {
      if (!line.empty()) reference->push_back(line);
    });
  }
  qc::OverlapSolver overlap(questions, reference ? &*reference : nullptr);
  note_seed(config.seed);
  auto rows = qc::noise_sweep(questions, overlap.as_solver(), gold, tax, proportions, runs,
                              config.seed, level, config.threads);
  emit(config, qc::sweep_tsv(rows));
  return 0;
}

int cmd_agreement(const RunConfig& config, const std::string& annotators,
                  const std::string& format) {
  qc::Taxonomy tax = load_taxonomy(config);
  auto records = qc::load_annotations(require(config.paths.annotations, "--annotations"), tax);
  auto grouped = qc::annotations_by_annotator(records);

  std::vector<std::string> ids;
  if (!annotators.empty()) {
    ids = qc::split_char(annotators, ',');
  } else {
    for (const auto& [id, annotations] : grouped) ids.push_back(id);
  }
  if (ids.size() != 2) {
    throw qc::DataError("agreement: expected exactly 2 annotators, got " +
                        std::to_string(ids.size()));
  }
  for (const auto& id : ids) {
    if (!grouped.count(id)) throw qc::DataError("agreement: unknown annotator " + id);
  }
  auto by_level = qc::agreement_report(grouped.at(ids[0]), grouped.at(ids[1]), tax);
  if (format == "tsv") {
    emit(config, qc::agreement_report_tsv(by_level));
  } else {
    json out = json::array();
    for (const auto& [level, kappa] : by_level) {
      out.push_back({{"metric", "kappa"}, {"level", level}, {"value", kappa},
                     {"n", static_cast<int>(grouped.at(ids[0]).size())}});
    }
    emit(config, out.dump(2));
  }
  return 0;
}

int cmd_report(const RunConfig& config, const std::string& kind,
               const std::string& qa_results_path, int level, int min_n,
               const std::string& format) {
  qc::Taxonomy tax = load_taxonomy(config);
  if (kind == "per-category") {
    qc::GoldMap gold = qc::load_gold_labels(require(config.paths.labels, "--labels"), tax);
    std::map<std::string, bool> correct;
    qc::for_each_line(require(qa_results_path, "--qa-results"),
                      [&](std::size_t line_no, const std::string& line) {
                        if (line.empty()) return;
                        try {
                          json j = json::parse(line);
                          correct[j.at("id").get<std::string>()] = j.at("correct").get<bool>();
                        } catch (const json::exception& e) {
                          throw qc::DataError(qa_results_path + ":" + std::to_string(line_no) +
                                              ": " + e.what());
                        }
                      });
    qc::CategoryReport report = qc::per_category_report(correct, gold, tax, level, min_n);
    if (format == "tsv") {
      emit(config, qc::category_report_tsv(report));
    } else {
      json rows = json::array();
      for (const auto& row : report.rows) {
        rows.push_back({{"category", row.category.leaf()},
                        {"display", row.display},
                        {"accuracy", row.accuracy},
                        {"n", row.n},
                        {"low_n", row.below_floor}});
      }
      emit(config, json{{"level", level},
                        {"overall_accuracy", report.overall_accuracy},
                        {"n_questions", report.n_questions},
                        {"rows", std::move(rows)}}
                       .dump(2));
    }
    return 0;
  }
  if (kind == "qc-errors") {
    qc::GoldMap gold = qc::load_gold_labels(require(config.paths.labels, "--labels"), tax);
    auto questions = load_questions_for(config);
    auto all_preds = qc::read_predictions(require(config.paths.predictions, "--pred"));
    // The breakdown is defined over finest-level rankings; keep only the
    // deepest level present in the file.
    int deepest = 0;
    for (const auto& pred : all_preds) deepest = std::max(deepest, pred.level);
    std::vector<qc::RankedPrediction> preds;
    for (auto& pred : all_preds) {
      if (pred.level == deepest) preds.push_back(std::move(pred));
    }
    qc::ErrorBreakdown breakdown = qc::qc_error_breakdown(preds, gold, tax, questions);
    json out{{"total_errors", breakdown.total_errors},
             {"distance1_leaf", breakdown.distance1_leaf},
             {"correlated_with_incorrect_candidate",
              breakdown.correlated_with_incorrect_candidate},
             {"correct_in_gold_multiset", breakdown.correct_in_gold_multiset},
             {"other", breakdown.other}};
    if (format == "tsv") {
      std::ostringstream tsv;
      tsv << "class\tcount\n";
      for (const auto& [key, value] : out.items()) tsv << key << '\t' << value << '\n';
      emit(config, tsv.str());
    } else {
      emit(config, out.dump(2));
    }
    return 0;
  }
  throw qc::DataError("report: unknown kind " + kind);
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"qclab: hierarchical question classification laboratory"};
  app.require_subcommand(1);
  app.fallthrough(true);

  RunConfig config;
  std::string config_path;
  bool lenient = false;
  app.add_option("--config", config_path, "JSON run-config file (flags override it)");
  auto* seed_opt = app.add_option("--seed", config.seed, "RNG seed recorded in all outputs");
  auto* threads_opt =
      app.add_option("--threads", config.threads, "worker threads (0 = all cores)");
  auto* lenient_flag = app.add_flag("--lenient", lenient, "downgrade recoverable data errors");
  std::string levels_arg;
  auto* levels_opt = app.add_option("--levels", levels_arg, "comma-separated level list");

  app.add_option("--taxonomy", config.paths.taxonomy, "taxonomy TSV");
  app.add_option("--questions", config.paths.questions, "questions JSONL");
  app.add_option("--labels,--gold", config.paths.labels, "gold labels TSV");
  app.add_option("--pred", config.paths.predictions, "predictions JSONL");
  app.add_option("--model", config.paths.model, "model file");
  app.add_option("--out", config.paths.out, "output file (default: stdout)");
  app.add_option("--annotations", config.paths.annotations, "interannotator TSV");
  app.add_option("--conll", config.paths.conll, "CoNLL-like token annotations");
  app.add_option("--senses", config.paths.senses, "sense inventory TSV");
  app.add_option("--hypernyms", config.paths.hypernyms, "hypernym edges TSV");
  app.add_option("--wordlists", config.paths.wordlists, "topic wordlist directory");
  app.add_option("--essential-terms", config.paths.essential, "essential terms TSV");
  app.add_option("--ref-corpus", config.paths.ref_corpus, "reference corpus, 1 sentence/line");
  app.add_option("--scores", config.paths.scores, "external candidate-scores JSONL");

  std::string feature_list;
  int epochs_arg = 0;
  double lr_arg = 0.0;
  double l2_arg = 0.0;
  bool include_answers = false;
  app.add_option("--features", feature_list,
                 "extractors: comma list of uni,bi,pos,dep,hyp,topic,ess,hier");
  auto* epochs_opt = app.add_option("--epochs", epochs_arg, "SGD epochs");
  auto* lr_opt = app.add_option("--learning-rate", lr_arg, "SGD learning rate");
  auto* l2_opt = app.add_option("--l2", l2_arg, "L2 regularization strength");
  auto* answers_flag = app.add_flag("--include-answer-text", include_answers,
                                    "extract features from candidate texts too");

  auto* validate_cmd = app.add_subcommand("taxonomy-validate", "check a taxonomy file");
  auto* stats_cmd = app.add_subcommand("stats", "corpus split counts and summary statistics");

  auto* train_cmd = app.add_subcommand("train", "train the hierarchical classifier");
  int max_level = 6;
  train_cmd->add_option("--max-level", max_level, "train levels 1..N");

  auto* predict_cmd = app.add_subcommand("predict", "write ranked predictions");
  std::string predict_split = "all";
  int cv_folds = 0;
  predict_cmd->add_option("--split", predict_split, "train|dev|test|all");
  predict_cmd->add_option("--cv", cv_folds, "k-fold crossvalidated predictions over train split");

  auto* eval_qc_cmd = app.add_subcommand("eval-qc", "MAP / P@1 of ranked label predictions");
  int eval_level = 6;
  std::string compare_path;
  eval_qc_cmd->add_option("--level", eval_level, "taxonomy level to evaluate");
  eval_qc_cmd->add_option("--compare", compare_path,
                          "baseline predictions for bootstrap significance");

  auto* eval_qa_cmd = app.add_subcommand("eval-qa", "QA P@1 with a QC label source");
  std::string qa_source = "none";
  double qa_proportion = 0.0;
  int qa_level = 6;
  int qa_runs = 1;
  std::string qa_split = "all";
  std::string per_question_path;
  eval_qa_cmd->add_option("--source", qa_source, "none|gold|predicted|perturbed");
  eval_qa_cmd->add_option("--proportion", qa_proportion, "perturbed noise proportion");
  eval_qa_cmd->add_option("--level", qa_level, "perturbation truncation level");
  eval_qa_cmd->add_option("--runs", qa_runs, "number of evaluation runs");
  eval_qa_cmd->add_option("--split", qa_split, "train|dev|test|all");
  eval_qa_cmd->add_option("--per-question", per_question_path,
                          "write per-question correctness JSONL here");

  auto* expand_cmd = app.add_subcommand("expand", "label-definition query expansion");
  std::string expand_source = "gold";
  std::string expand_id;
  expand_cmd->add_option("--source", expand_source, "none|gold|predicted");
  expand_cmd->add_option("--id", expand_id, "expand only this question id (plain text output)");

  auto* perturb_cmd = app.add_subcommand("perturb", "randomly corrupt a share of gold labels");
  double perturb_proportion = 0.0;
  int perturb_level = 6;
  perturb_cmd->add_option("--proportion", perturb_proportion, "share of questions to corrupt")
      ->required();
  perturb_cmd->add_option("--level", perturb_level, "label truncation level");

  auto* sweep_cmd = app.add_subcommand("sweep", "QA P@1 across label-noise proportions");
  std::string sweep_props = "0.0,0.1,0.2,0.3,0.4";
  int sweep_runs = 20;
  int sweep_level = 6;
  std::string sweep_split = "all";
  sweep_cmd->add_option("--proportions", sweep_props, "comma-separated noise proportions");
  sweep_cmd->add_option("--runs", sweep_runs, "perturbation runs per proportion");
  sweep_cmd->add_option("--level", sweep_level, "label truncation level");
  sweep_cmd->add_option("--split", sweep_split, "train|dev|test|all");

  auto* agreement_cmd = app.add_subcommand("agreement", "interannotator kappa per level");
  std::string annotators;
  std::string agreement_format = "tsv";
  agreement_cmd->add_option("--annotators", annotators, "two annotator ids (default: the file's)");
  agreement_cmd->add_option("--format", agreement_format, "tsv|json");

  auto* report_cmd = app.add_subcommand("report", "automated error analyses");
  std::string report_kind = "per-category";
  std::string qa_results_path;
  int report_level = 2;
  int report_min_n = 5;
  std::string report_format = "tsv";
  report_cmd->add_option("--kind", report_kind, "per-category|qc-errors");
  report_cmd->add_option("--qa-results", qa_results_path, "per-question correctness JSONL");
  report_cmd->add_option("--level", report_level, "category truncation level");
  report_cmd->add_option("--min-n", report_min_n, "flag groups smaller than this");
  report_cmd->add_option("--format", report_format, "tsv|json");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int rc = app.exit(e);  // prints the message; 0 for --help
    return rc == 0 ? 0 : 1;
  }

  try {
    apply_config_file(config_path, config, seed_opt->count() > 0, threads_opt->count() > 0,
                      lenient_flag->count() > 0, levels_opt->count() > 0);
    if (lenient) config.strict = false;
    if (epochs_opt->count() > 0) config.train.epochs = epochs_arg;
    if (lr_opt->count() > 0) config.train.learning_rate = lr_arg;
    if (l2_opt->count() > 0) config.train.l2_lambda = l2_arg;
    if (answers_flag->count() > 0) config.features.include_answer_text = include_answers;
    if (!levels_arg.empty()) {
      config.levels.clear();
      for (const auto& piece : qc::split_char(levels_arg, ',')) {
        config.levels.push_back(std::stoi(piece));
      }
    }
    if (!feature_list.empty()) {
      qc::FeatureConfig fc;
      fc.use_unigrams = fc.use_bigrams = fc.use_pos_tagged = fc.use_hierarchy = false;
      fc.include_answer_text = config.features.include_answer_text;
      fc.hypernym_max_depth = config.features.hypernym_max_depth;
      fc.hypernym_decay = config.features.hypernym_decay;
      fc.top_k_hier = config.features.top_k_hier;
      for (const auto& name : qc::split_char(feature_list, ',')) {
        if (name == "uni") fc.use_unigrams = true;
        else if (name == "bi") fc.use_bigrams = true;
        else if (name == "pos") fc.use_pos_tagged = true;
        else if (name == "dep") fc.use_dependencies = true;
        else if (name == "hyp") fc.use_hypernyms = true;
        else if (name == "topic") fc.use_topics = true;
        else if (name == "ess") fc.use_essential = true;
        else if (name == "hier") fc.use_hierarchy = true;
        else throw qc::DataError("unknown extractor: " + name);
      }
      config.features = fc;
    }

    if (validate_cmd->parsed()) return cmd_taxonomy_validate(config);
    if (stats_cmd->parsed()) return cmd_stats(config);
    if (train_cmd->parsed()) return cmd_train(config, max_level);
    if (predict_cmd->parsed()) return cmd_predict(config, predict_split, cv_folds);
    if (eval_qc_cmd->parsed()) return cmd_eval_qc(config, eval_level, compare_path);
    if (eval_qa_cmd->parsed()) {
      return cmd_eval_qa(config, qa_source, qa_proportion, qa_level, qa_runs, qa_split,
                         per_question_path);
    }
    if (expand_cmd->parsed()) return cmd_expand(config, expand_source, expand_id);
    if (perturb_cmd->parsed()) return cmd_perturb(config, perturb_proportion, perturb_level);
    if (sweep_cmd->parsed()) {
      std::vector<double> proportions;
      for (const auto& piece : qc::split_char(sweep_props, ',')) {
        proportions.push_back(std::stod(piece));
      }
      return cmd_sweep(config, proportions, sweep_runs, sweep_level, sweep_split);
    }
    if (agreement_cmd->parsed()) return cmd_agreement(config, annotators, agreement_format);
    if (report_cmd->parsed()) {
      return cmd_report(config, report_kind, qa_results_path, report_level, report_min_n,
                        report_format);
    }
    std::cerr << "error: no subcommand\n";
    return 1;
  } catch (const qc::DataError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "internal error: " << e.what() << "\n";
    return 3;
  }
}
