#pragma once

#include <filesystem>
#include <vector>

#include <json.hpp>

#include "qc/classifier.hpp"
#include "qc/features.hpp"
#include "qc/metrics.hpp"

namespace qc {

void to_json(nlohmann::json& j, const FeatureConfig& config);
void from_json(const nlohmann::json& j, FeatureConfig& config);

void to_json(nlohmann::json& j, const TrainConfig& config);
void from_json(const nlohmann::json& j, TrainConfig& config);

nlohmann::json report_json(const EvalReport& report);

// Predictions JSONL: {"id": ..., "level": ..., "ranked": [{"label","score"}...]}.
// This is also the ingestion format for externally produced (e.g. neural)
// classifier predictions.
void write_predictions(const std::filesystem::path& path,
                       const std::vector<RankedPrediction>& predictions);
std::vector<RankedPrediction> read_predictions(const std::filesystem::path& path);

// External candidate-scores JSONL: {"id": ..., "scores": {"A": ..., ...}}.
struct CandidateScores {
  std::string question_id;
  std::map<std::string, double> scores;
};

void write_candidate_scores(const std::filesystem::path& path,
                            const std::vector<CandidateScores>& scores);
std::vector<CandidateScores> read_candidate_scores(const std::filesystem::path& path);

}  // namespace qc
