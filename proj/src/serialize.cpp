#include "qc/serialize.hpp"

#include <sstream>

#include "qc/errors.hpp"
#include "qc/io.hpp"

namespace qc {

using nlohmann::json;

void to_json(json& j, const FeatureConfig& config) {
  j = json{{"unigrams", config.use_unigrams},
           {"bigrams", config.use_bigrams},
           {"pos_tagged", config.use_pos_tagged},
           {"dependencies", config.use_dependencies},
           {"hypernyms", config.use_hypernyms},
           {"topics", config.use_topics},
           {"essential", config.use_essential},
           {"hierarchy", config.use_hierarchy},
           {"hypernym_max_depth", config.hypernym_max_depth},
           {"hypernym_decay", config.hypernym_decay},
           {"include_answer_text", config.include_answer_text},
           {"essential_fallback", config.essential_fallback},
           {"top_k_hier", config.top_k_hier}};
}

void from_json(const json& j, FeatureConfig& config) {
  FeatureConfig defaults;
  config.use_unigrams = j.value("unigrams", defaults.use_unigrams);
  config.use_bigrams = j.value("bigrams", defaults.use_bigrams);
  config.use_pos_tagged = j.value("pos_tagged", defaults.use_pos_tagged);
  config.use_dependencies = j.value("dependencies", defaults.use_dependencies);
  config.use_hypernyms = j.value("hypernyms", defaults.use_hypernyms);
  config.use_topics = j.value("topics", defaults.use_topics);
  config.use_essential = j.value("essential", defaults.use_essential);
  config.use_hierarchy = j.value("hierarchy", defaults.use_hierarchy);
  config.hypernym_max_depth = j.value("hypernym_max_depth", defaults.hypernym_max_depth);
  config.hypernym_decay = j.value("hypernym_decay", defaults.hypernym_decay);
  config.include_answer_text = j.value("include_answer_text", defaults.include_answer_text);
  config.essential_fallback = j.value("essential_fallback", defaults.essential_fallback);
  config.top_k_hier = j.value("top_k_hier", defaults.top_k_hier);
}

void to_json(json& j, const TrainConfig& config) {
  j = json{{"epochs", config.epochs},
           {"learning_rate", config.learning_rate},
           {"l2_lambda", config.l2_lambda},
           {"seed", config.seed},
           {"loss", config.loss}};
}

void from_json(const json& j, TrainConfig& config) {
  TrainConfig defaults;
  config.epochs = j.value("epochs", defaults.epochs);
  config.learning_rate = j.value("learning_rate", defaults.learning_rate);
  config.l2_lambda = j.value("l2_lambda", defaults.l2_lambda);
  config.seed = j.value("seed", defaults.seed);
  config.loss = j.value("loss", defaults.loss);
}

json report_json(const EvalReport& report) {
  json j{{"metric", report.metric},
         {"level", report.level},
         {"value", report.value},
         {"n", report.n}};
  if (report.p_value) j["p_value"] = *report.p_value;
  return j;
}

void write_predictions(const std::filesystem::path& path,
                       const std::vector<RankedPrediction>& predictions) {
  std::ostringstream out;
  for (const auto& pred : predictions) {
    json ranked = json::array();
    for (const auto& entry : pred.ranked) {
      ranked.push_back({{"label", entry.code}, {"score", entry.score}});
    }
    json j{{"id", pred.question_id}, {"level", pred.level}, {"ranked", std::move(ranked)}};
    out << j.dump() << '\n';
  }
  atomic_write(path, out.str());
}

std::vector<RankedPrediction> read_predictions(const std::filesystem::path& path) {
  std::vector<RankedPrediction> predictions;
  for_each_line(path, [&](std::size_t line_no, const std::string& line) {
    if (line.empty()) return;
    const std::string where = path.string() + ":" + std::to_string(line_no);
    try {
      json j = json::parse(line);
      RankedPrediction pred;
      pred.question_id = j.at("id").get<std::string>();
      pred.level = j.at("level").get<int>();
      for (const auto& entry : j.at("ranked")) {
        pred.ranked.push_back(
            ScoredLabel{entry.at("label").get<std::string>(), entry.at("score").get<double>()});
      }
      predictions.push_back(std::move(pred));
    } catch (const json::exception& e) {
      throw DataError(where + ": malformed prediction line: " + e.what());
    }
  });
  return predictions;
}

void write_candidate_scores(const std::filesystem::path& path,
                            const std::vector<CandidateScores>& scores) {
  std::ostringstream out;
  for (const auto& cs : scores) {
    json j{{"id", cs.question_id}, {"scores", cs.scores}};
    out << j.dump() << '\n';
  }
  atomic_write(path, out.str());
}

std::vector<CandidateScores> read_candidate_scores(const std::filesystem::path& path) {
  std::vector<CandidateScores> scores;
  for_each_line(path, [&](std::size_t line_no, const std::string& line) {
    if (line.empty()) return;
    const std::string where = path.string() + ":" + std::to_string(line_no);
    try {
      json j = json::parse(line);
      CandidateScores cs;
      cs.question_id = j.at("id").get<std::string>();
      for (const auto& [key, value] : j.at("scores").items()) {
        cs.scores[key] = value.get<double>();
      }
      scores.push_back(std::move(cs));
    } catch (const json::exception& e) {
      throw DataError(where + ": malformed scores line: " + e.what());
    }
  });
  return scores;
}

}  // namespace qc
