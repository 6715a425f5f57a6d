#include "qc/classifier.hpp"

#include <algorithm>
#include <cmath>
#include <iostream>
#include <numeric>
#include <unordered_map>

#include <json.hpp>

#include "qc/errors.hpp"
#include "qc/io.hpp"
#include "qc/parallel.hpp"
#include "qc/rng.hpp"
#include "qc/serialize.hpp"

namespace qc {

using nlohmann::json;

double sigmoid(double z) {
  if (z >= 0.0) {
    return 1.0 / (1.0 + std::exp(-z));
  }
  const double e = std::exp(z);
  return e / (1.0 + e);
}

double raw_score(const LinearModel& model, const FeatureVector& features) {
  double z = model.bias;
  for (const auto& [name, value] : features.entries) {
    auto it = model.weights.find(name);
    if (it != model.weights.end()) z += it->second * value;
  }
  return z;
}

void TrainConfig::validate() const {
  if (epochs < 1) throw DataError("train config: epochs must be >= 1");
  if (learning_rate <= 0.0) throw DataError("train config: learning_rate must be > 0");
  if (l2_lambda < 0.0) throw DataError("train config: l2_lambda must be >= 0");
  if (loss != "logistic") throw DataError("train config: unsupported loss '" + loss + "'");
  if (learning_rate * l2_lambda >= 1.0) {
    throw DataError("train config: learning_rate * l2_lambda must be < 1");
  }
}

std::vector<TrainInstance> duplicate_multilabel(const std::vector<LabeledQuestion>& dataset,
                                                int level) {
  std::vector<TrainInstance> instances;
  for (std::size_t qi = 0; qi < dataset.size(); ++qi) {
    std::vector<LabelPath> seen;
    for (const auto& label : dataset[qi].gold_labels) {
      LabelPath truncated = truncate(label, level);
      if (std::find(seen.begin(), seen.end(), truncated) != seen.end()) continue;
      seen.push_back(truncated);
      instances.push_back(TrainInstance{qi, std::move(truncated)});
    }
  }
  return instances;
}

namespace {

// Feature names interned to dense ids; rows are (id, value) pairs.
struct EncodedDataset {
  std::vector<std::string> names;
  std::vector<std::vector<std::pair<std::uint32_t, double>>> rows;
};

EncodedDataset encode(const std::vector<const FeatureVector*>& vectors, int threads) {
  // Sorting each vector's names is the expensive part; it parallelizes per
  // question, while the id assignment below stays a cheap serial scan so ids
  // are independent of hash order and thread count.
  std::vector<std::vector<std::pair<std::string, double>>> sorted(vectors.size());
  parallel_for(vectors.size(), threads, [&](std::size_t i) { sorted[i] = vectors[i]->sorted(); });

  EncodedDataset data;
  std::unordered_map<std::string, std::uint32_t> ids;
  data.rows.reserve(vectors.size());
  for (const auto& entries : sorted) {
    std::vector<std::pair<std::uint32_t, double>> row;
    row.reserve(entries.size());
    for (const auto& [name, value] : entries) {
      auto [it, inserted] = ids.emplace(name, static_cast<std::uint32_t>(data.names.size()));
      if (inserted) data.names.push_back(name);
      row.emplace_back(it->second, value);
    }
    data.rows.push_back(std::move(row));
  }
  return data;
}

struct DenseModel {
  std::vector<double> weights;
  double bias = 0.0;
};

// Logistic SGD with lazily scaled L2 decay. One pass order per epoch,
// reshuffled from `seed`; bias is unregularized.
DenseModel train_dense(const EncodedDataset& data, const std::vector<std::uint8_t>& targets,
                       const TrainConfig& config, std::uint64_t seed) {
  DenseModel model;
  model.weights.assign(data.names.size(), 0.0);
  double scale = 1.0;
  const double lr = config.learning_rate;
  const double decay = 1.0 - lr * config.l2_lambda;

  std::vector<std::size_t> order(data.rows.size());
  std::iota(order.begin(), order.end(), 0);
  SplitMix64 rng(seed);

  for (int epoch = 0; epoch < config.epochs; ++epoch) {
    shuffle(order, rng);
    for (std::size_t idx : order) {
      const auto& row = data.rows[idx];
      double z = 0.0;
      for (const auto& [f, v] : row) z += model.weights[f] * v;
      z = z * scale + model.bias;
      const double gradient = sigmoid(z) - (targets[idx] ? 1.0 : 0.0);
      if (config.l2_lambda > 0.0) scale *= decay;
      const double step = lr * gradient / scale;
      for (const auto& [f, v] : row) model.weights[f] -= step * v;
      model.bias -= lr * gradient;
      if (scale < 1e-9) {  // refold before the stored weights blow up
        for (double& w : model.weights) w *= scale;
        scale = 1.0;
      }
    }
  }
  for (double& w : model.weights) w *= scale;
  return model;
}

double dense_score(const DenseModel& model,
                   const std::vector<std::pair<std::uint32_t, double>>& row) {
  double z = model.bias;
  for (const auto& [f, v] : row) z += model.weights[f] * v;
  return z;
}

LinearModel to_sparse(const DenseModel& dense, const std::vector<std::string>& names) {
  LinearModel model;
  model.bias = dense.bias;
  for (std::size_t f = 0; f < dense.weights.size(); ++f) {
    if (dense.weights[f] != 0.0) model.weights[names[f]] = dense.weights[f];
  }
  return model;
}

}  // namespace

LinearModel train_binary(const std::vector<FeatureVector>& positives,
                         const std::vector<FeatureVector>& negatives, const TrainConfig& config) {
  config.validate();
  if (positives.empty()) throw DataError("train_binary: no positive instances");
  std::vector<const FeatureVector*> vectors;
  std::vector<std::uint8_t> targets;
  for (const auto& fv : positives) {
    vectors.push_back(&fv);
    targets.push_back(1);
  }
  for (const auto& fv : negatives) {
    vectors.push_back(&fv);
    targets.push_back(0);
  }
  const EncodedDataset data = encode(vectors, 1);
  return to_sparse(train_dense(data, targets, config, config.seed), data.names);
}

const LinearModel* LevelEnsemble::model_for(const std::string& code) const {
  auto it = std::lower_bound(models.begin(), models.end(), code,
                             [](const auto& entry, const std::string& key) {
                               return entry.first < key;
                             });
  if (it == models.end() || it->first != code) return nullptr;
  return &it->second;
}

namespace {

std::vector<ScoredLabel> rank_scores(std::vector<ScoredLabel> scored) {
  std::sort(scored.begin(), scored.end(), [](const ScoredLabel& a, const ScoredLabel& b) {
    if (a.score != b.score) return a.score > b.score;
    return a.code < b.code;
  });
  return scored;
}

struct LevelResult {
  LevelEnsemble ensemble;
  std::vector<RankedPrediction> predictions;  // aligned with the dataset
};

LevelResult train_level_impl(const std::vector<LabeledQuestion>& dataset, int level,
                             const std::vector<RankedPrediction>* prev_level_predictions,
                             const FeatureConfig& features, const TrainConfig& train,
                             const Resources& resources, int threads) {
  train.validate();
  features.validate();
  if (dataset.empty()) throw DataError("train_level: empty dataset");
  if (prev_level_predictions && prev_level_predictions->size() != dataset.size()) {
    throw DataError("train_level: previous-level predictions misaligned with dataset");
  }

  std::vector<FeatureVector> question_features(dataset.size());
  parallel_for(dataset.size(), threads, [&](std::size_t qi) {
    const std::vector<ScoredLabel>* prev =
        prev_level_predictions ? &(*prev_level_predictions)[qi].ranked : nullptr;
    question_features[qi] = assemble(dataset[qi].question, features, resources, prev);
  });

  std::vector<const FeatureVector*> vectors;
  vectors.reserve(dataset.size());
  for (const auto& fv : question_features) vectors.push_back(&fv);
  const EncodedDataset encoded = encode(vectors, threads);

  const std::vector<TrainInstance> instances = duplicate_multilabel(dataset, level);
  if (instances.empty()) throw DataError("train_level: no labeled instances");

  std::vector<std::string> codes;
  for (const auto& inst : instances) codes.push_back(inst.label.leaf());
  std::sort(codes.begin(), codes.end());
  codes.erase(std::unique(codes.begin(), codes.end()), codes.end());

  // Instance rows reference the per-question encoding.
  std::vector<std::vector<std::pair<std::uint32_t, double>>> instance_rows;
  instance_rows.reserve(instances.size());
  for (const auto& inst : instances) instance_rows.push_back(encoded.rows[inst.question_index]);
  EncodedDataset instance_data;
  instance_data.names = encoded.names;
  instance_data.rows = std::move(instance_rows);

  LevelResult result;
  result.ensemble.level = level;
  result.ensemble.models.resize(codes.size());

  // Train each label's model and score every training question while the
  // dense weights are still around; sparsification happens at the end.
  std::vector<double> score_matrix(dataset.size() * codes.size());
  parallel_for(codes.size(), threads, [&](std::size_t ci) {
    std::vector<std::uint8_t> targets(instances.size(), 0);
    for (std::size_t i = 0; i < instances.size(); ++i) {
      targets[i] = instances[i].label.leaf() == codes[ci] ? 1 : 0;
    }
    DenseModel dense = train_dense(instance_data, targets, train, mix_seed(train.seed, codes[ci]));
    for (std::size_t qi = 0; qi < dataset.size(); ++qi) {
      score_matrix[qi * codes.size() + ci] = sigmoid(dense_score(dense, encoded.rows[qi]));
    }
    result.ensemble.models[ci] = {codes[ci], to_sparse(dense, instance_data.names)};
  });

  result.predictions.resize(dataset.size());
  parallel_for(dataset.size(), threads, [&](std::size_t qi) {
    std::vector<ScoredLabel> scored;
    scored.reserve(codes.size());
    for (std::size_t ci = 0; ci < codes.size(); ++ci) {
      scored.push_back(ScoredLabel{codes[ci], score_matrix[qi * codes.size() + ci]});
    }
    result.predictions[qi] =
        RankedPrediction{dataset[qi].question.id, level, rank_scores(std::move(scored))};
  });
  return result;
}

}  // namespace

LevelEnsemble train_level(const std::vector<LabeledQuestion>& dataset, int level,
                          const std::vector<RankedPrediction>* prev_level_predictions,
                          const FeatureConfig& features, const TrainConfig& train,
                          const Resources& resources, int threads) {
  return train_level_impl(dataset, level, prev_level_predictions, features, train, resources,
                          threads)
      .ensemble;
}

HierarchicalClassifier HierarchicalClassifier::train(const std::vector<LabeledQuestion>& dataset,
                                                     int max_level,
                                                     const FeatureConfig& features,
                                                     const TrainConfig& train,
                                                     const Taxonomy& taxonomy,
                                                     const Resources& resources, int threads) {
  if (max_level < 1) throw DataError("train: max_level must be >= 1");
  for (const auto& lq : dataset) {
    if (lq.gold_labels.empty() || lq.gold_labels.size() > 2) {
      throw DataError("train: question " + lq.question.id + " must have 1 or 2 gold labels");
    }
    for (const auto& label : lq.gold_labels) {
      if (!taxonomy.valid_path(label)) {
        throw DataError("train: invalid gold label path for question " + lq.question.id);
      }
    }
  }

  HierarchicalClassifier hc(features, train, taxonomy.fingerprint());
  std::vector<RankedPrediction> prev;
  for (int level = 1; level <= max_level; ++level) {
    LevelResult result = train_level_impl(dataset, level, level > 1 ? &prev : nullptr, features,
                                          train, resources, threads);
    prev = std::move(result.predictions);
    hc.add_ensemble(std::move(result.ensemble));
  }
  return hc;
}

const LevelEnsemble& HierarchicalClassifier::ensemble(int level) const {
  if (level < 1 || level > max_level()) {
    throw DataError("no trained ensemble for level " + std::to_string(level));
  }
  return ensembles_[static_cast<std::size_t>(level - 1)];
}

void HierarchicalClassifier::add_ensemble(LevelEnsemble ensemble) {
  if (ensemble.level != max_level() + 1) {
    throw DataError("ensembles must be added in level order");
  }
  ensembles_.push_back(std::move(ensemble));
}

RankedPrediction HierarchicalClassifier::predict_ranked(const Question& question, int level,
                                                        const Resources& resources) const {
  if (level < 1 || level > max_level()) {
    throw DataError("predict: untrained level " + std::to_string(level));
  }
  RankedPrediction current;
  std::vector<ScoredLabel> prev;
  for (int k = 1; k <= level; ++k) {
    const LevelEnsemble& ens = ensembles_[static_cast<std::size_t>(k - 1)];
    FeatureVector fv = assemble(question, feature_config_, resources, k > 1 ? &prev : nullptr);
    std::vector<ScoredLabel> scored;
    scored.reserve(ens.models.size());
    for (const auto& [code, model] : ens.models) {
      scored.push_back(ScoredLabel{code, sigmoid(raw_score(model, fv))});
    }
    current = RankedPrediction{question.id, k, rank_scores(std::move(scored))};
    prev = current.ranked;
  }
  return current;
}

std::map<int, std::vector<RankedPrediction>> HierarchicalClassifier::predict_levels(
    const std::vector<Question>& questions, const std::vector<int>& levels,
    const Resources& resources, int threads) const {
  if (levels.empty()) throw DataError("predict: no levels requested");
  int deepest = 0;
  for (int level : levels) {
    if (level < 1 || level > max_level()) {
      throw DataError("predict: untrained level " + std::to_string(level));
    }
    deepest = std::max(deepest, level);
  }
  std::map<int, std::vector<RankedPrediction>> out;
  for (int level : levels) out[level].resize(questions.size());

  parallel_for(questions.size(), threads, [&](std::size_t qi) {
    std::vector<ScoredLabel> prev;
    for (int k = 1; k <= deepest; ++k) {
      const LevelEnsemble& ens = ensembles_[static_cast<std::size_t>(k - 1)];
      FeatureVector fv =
          assemble(questions[qi], feature_config_, resources, k > 1 ? &prev : nullptr);
      std::vector<ScoredLabel> scored;
      scored.reserve(ens.models.size());
      for (const auto& [code, model] : ens.models) {
        scored.push_back(ScoredLabel{code, sigmoid(raw_score(model, fv))});
      }
      RankedPrediction pred{questions[qi].id, k, rank_scores(std::move(scored))};
      prev = pred.ranked;
      auto it = out.find(k);
      if (it != out.end()) it->second[qi] = std::move(pred);
    }
  });
  return out;
}

void HierarchicalClassifier::save(const std::filesystem::path& path) const {
  json j;
  j["format"] = "qclab-model";
  j["version"] = 1;
  j["taxonomy"] = taxonomy_hash_;
  j["features"] = feature_config_;
  j["train"] = train_config_;
  json levels = json::array();
  for (const auto& ens : ensembles_) {
    json models = json::array();
    for (const auto& [code, model] : ens.models) {
      json weights = json::object();
      for (const auto& [name, w] : model.weights) weights[name] = w;
      models.push_back({{"code", code}, {"bias", model.bias}, {"weights", std::move(weights)}});
    }
    levels.push_back({{"level", ens.level}, {"models", std::move(models)}});
  }
  j["levels"] = std::move(levels);
  atomic_write(path, j.dump());
}

HierarchicalClassifier HierarchicalClassifier::load(const std::filesystem::path& path,
                                                    const std::string& expected_taxonomy_hash,
                                                    bool strict) {
  json j;
  try {
    j = json::parse(read_file(path));
  } catch (const json::parse_error& e) {
    throw DataError(path.string() + ": corrupt model file: " + e.what());
  }
  if (!j.is_object() || j.value("format", "") != "qclab-model") {
    throw DataError(path.string() + ": not a qclab model file");
  }
  if (j.value("version", 0) != 1) {
    throw DataError(path.string() + ": unsupported model version");
  }
  FeatureConfig features = j.at("features").get<FeatureConfig>();
  TrainConfig train = j.at("train").get<TrainConfig>();
  std::string hash = j.value("taxonomy", "");
  if (!expected_taxonomy_hash.empty() && hash != expected_taxonomy_hash) {
    if (strict) {
      throw DataError(path.string() + ": model was trained with a different taxonomy");
    }
    std::cerr << "warning: " << path.string() << ": model taxonomy fingerprint " << hash
              << " does not match the loaded taxonomy\n";
  }
  HierarchicalClassifier hc(std::move(features), std::move(train), std::move(hash));
  try {
    for (const auto& lj : j.at("levels")) {
      LevelEnsemble ens;
      ens.level = lj.at("level").get<int>();
      for (const auto& mj : lj.at("models")) {
        LinearModel model;
        model.bias = mj.at("bias").get<double>();
        for (const auto& [name, w] : mj.at("weights").items()) {
          model.weights[name] = w.get<double>();
        }
        ens.models.emplace_back(mj.at("code").get<std::string>(), std::move(model));
      }
      std::sort(ens.models.begin(), ens.models.end(),
                [](const auto& a, const auto& b) { return a.first < b.first; });
      hc.add_ensemble(std::move(ens));
    }
  } catch (const json::exception& e) {
    throw DataError(path.string() + ": corrupt model file: " + e.what());
  }
  return hc;
}

}  // namespace qc
