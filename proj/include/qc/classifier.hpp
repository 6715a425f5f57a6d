#pragma once

#include <cstdint>
#include <filesystem>
#include <map>
#include <string>
#include <vector>

#include "qc/corpus.hpp"
#include "qc/features.hpp"
#include "qc/metrics.hpp"
#include "qc/taxonomy.hpp"

namespace qc {

struct LinearModel {
  std::map<std::string, double> weights;  // sparse, zero entries dropped
  double bias = 0.0;
};

double raw_score(const LinearModel& model, const FeatureVector& features);
double sigmoid(double z);

struct TrainConfig {
  int epochs = 30;
  double learning_rate = 0.1;
  double l2_lambda = 1e-4;
  std::uint64_t seed = 13;
  std::string loss = "logistic";

  void validate() const;
};

// One duplicated single-label training instance (Tsoumakas-style): a question
// with k distinct truncated labels yields k instances sharing its features.
struct TrainInstance {
  std::size_t question_index = 0;
  LabelPath label;  // truncated to the ensemble's level
};

std::vector<TrainInstance> duplicate_multilabel(const std::vector<LabeledQuestion>& dataset,
                                                int level);

// L2-regularized logistic SGD (the in-repo substitute for a linear-kernel
// SVM). Deterministic for fixed inputs and config; instance order is
// positives then negatives, reshuffled per epoch from config.seed.
LinearModel train_binary(const std::vector<FeatureVector>& positives,
                         const std::vector<FeatureVector>& negatives, const TrainConfig& config);

struct LevelEnsemble {
  int level = 0;
  // One binary model per label observed in training at this level, keyed by
  // the label's most specific code, in ascending code order.
  std::vector<std::pair<std::string, LinearModel>> models;

  const LinearModel* model_for(const std::string& code) const;
};

// Per-level one-vs-all ensembles with coarse-to-fine feature feedback.
// Immutable after training; prediction is read-only and thread-safe.
class HierarchicalClassifier {
 public:
  HierarchicalClassifier() = default;
  HierarchicalClassifier(FeatureConfig features, TrainConfig train, std::string taxonomy_hash)
      : feature_config_(std::move(features)),
        train_config_(std::move(train)),
        taxonomy_hash_(std::move(taxonomy_hash)) {}

  // Trains levels 1..max_level in order; level k's hierarchy features come
  // from level k-1's predictions on the same training questions (predicted,
  // not gold, at both train and test time). Per-label trainings run in
  // parallel with per-label seeds, so results do not depend on `threads`.
  static HierarchicalClassifier train(const std::vector<LabeledQuestion>& dataset, int max_level,
                                      const FeatureConfig& features, const TrainConfig& train,
                                      const Taxonomy& taxonomy, const Resources& resources,
                                      int threads = 1);

  int max_level() const { return static_cast<int>(ensembles_.size()); }
  const LevelEnsemble& ensemble(int level) const;
  const FeatureConfig& feature_config() const { return feature_config_; }
  const TrainConfig& train_config() const { return train_config_; }
  const std::string& taxonomy_hash() const { return taxonomy_hash_; }

  // Ranked scores over every label of the level's ensemble: sigmoid of the
  // binary model's raw score, sorted descending, exact ties by ascending code.
  RankedPrediction predict_ranked(const Question& question, int level,
                                  const Resources& resources) const;

  // Batch prediction for each requested level, parallel across questions.
  std::map<int, std::vector<RankedPrediction>> predict_levels(
      const std::vector<Question>& questions, const std::vector<int>& levels,
      const Resources& resources, int threads = 1) const;

  void save(const std::filesystem::path& path) const;
  // strict: a taxonomy fingerprint mismatch is an error instead of a warning.
  static HierarchicalClassifier load(const std::filesystem::path& path,
                                     const std::string& expected_taxonomy_hash = {},
                                     bool strict = false);

  void add_ensemble(LevelEnsemble ensemble);  // levels must arrive in order

 private:
  std::vector<LevelEnsemble> ensembles_;  // ensembles_[k-1] is level k
  FeatureConfig feature_config_;
  TrainConfig train_config_;
  std::string taxonomy_hash_;
};

// Trains one level's ensemble. prev_level_predictions (aligned with the
// dataset) feeds the hierarchy features and may be null for level 1.
LevelEnsemble train_level(const std::vector<LabeledQuestion>& dataset, int level,
                          const std::vector<RankedPrediction>* prev_level_predictions,
                          const FeatureConfig& features, const TrainConfig& train,
                          const Resources& resources, int threads = 1);

}  // namespace qc
