#pragma once

// Feature map + classifier + quantizer, trained on a labelled word set.

#include <optional>
#include <string>

#include "whpr/classifiers/model.hpp"
#include "whpr/features.hpp"
#include "whpr/harness/dataset.hpp"

namespace whpr {

enum class ModelKind { Regression, Fisher, Svm, Tree, DistanceFlat, DistanceMahalanobis };

inline std::string to_string(ModelKind k) {
  switch (k) {
    case ModelKind::Regression: return "regression";
    case ModelKind::Fisher: return "fisher";
    case ModelKind::Svm: return "svm";
    case ModelKind::Tree: return "tree";
    case ModelKind::DistanceFlat: return "distance_flat";
    case ModelKind::DistanceMahalanobis: return "distance_mahalanobis";
  }
  return "?";
}

/// Accepts the serialized tags plus "distance" for the Mahalanobis variant.
inline ModelKind parse_model_kind(std::string_view s) {
  if (s == "distance") return ModelKind::DistanceMahalanobis;
  for (ModelKind k : {ModelKind::Regression, ModelKind::Fisher, ModelKind::Svm, ModelKind::Tree, ModelKind::DistanceFlat,
                      ModelKind::DistanceMahalanobis})
    if (to_string(k) == s) return k;
  throw std::invalid_argument("unknown model kind '" + std::string(s) + "'");
}

struct PipelineConfig {
  std::string features = "f6";
  ModelKind model = ModelKind::Regression;
  std::optional<QuantizerKind> quantizer = QuantizerKind::EqualInterval;  // linear and distance models only
  std::size_t bins = 100;
  std::optional<double> theta;  // replaces the fitted threshold and quantizer
  std::uint64_t seed = 0;
  std::size_t threads = 1;
  TreeParams tree;
};

struct Pipeline {
  FeatureMap features;
  Model model;
  std::optional<double> theta;

  Prediction predict_features(std::span<const double> x) const {
    if (!theta) return whpr::predict(model, x);
    const double s = model_score(model, x);
    const Orientation o = std::visit(
        [](const auto& m) {
          if constexpr (requires { m.rule; })
            return m.rule.orientation;
          else
            return Orientation::LowIsClass1;  // tree score is the class-2 fraction
        },
        model);
    return {ThresholdRule{*theta, o, 0.0}.classify(s), s};
  }

  Prediction predict(const CyclicWord& w) const { return predict_features(features(w)); }
};

/// Feature rows for every record, extracted in parallel.
inline Matrix feature_matrix(const LabeledWordSet& set, const FeatureMap& map, std::size_t threads = 1) {
  Matrix x(set.size(), map.dimension());
  parallel_for(set.size(), threads, [&](std::size_t i) {
    const auto f = map(set.records[i].word);
    std::copy(f.begin(), f.end(), x.row(i).begin());
  });
  return x;
}

inline std::vector<int> class_labels(const LabeledWordSet& set) {
  std::vector<int> y(set.size());
  for (std::size_t i = 0; i < set.size(); ++i) y[i] = class_of(set.records[i].label);
  return y;
}

inline Model fit_model(const LabeledSet& data, const PipelineConfig& cfg) {
  Model model;
  switch (cfg.model) {
    case ModelKind::Regression: model = fit_linear(data, LinearMethod::Regression); break;
    case ModelKind::Fisher: model = fit_linear(data, LinearMethod::Fisher); break;
    case ModelKind::Svm: model = fit_linear(data, LinearMethod::Svm); break;
    case ModelKind::Tree: return fit_tree(data, cfg.tree);
    case ModelKind::DistanceFlat: model = fit_distance(data, DistanceVariant::Flat); break;
    case ModelKind::DistanceMahalanobis: model = fit_distance(data, DistanceVariant::Mahalanobis); break;
  }
  if (cfg.quantizer) {
    Vector scores(data.size());
    for (std::size_t i = 0; i < data.size(); ++i) scores[i] = model_score(model, data.features.row(i));
    Quantizer q = build_quantizer(scores, data.labels, cfg.bins, *cfg.quantizer);
    std::visit(
        [&](auto& m) {
          if constexpr (requires { m.quantizer; }) m.quantizer = std::move(q);
        },
        model);
  }
  return model;
}

/// Minimal words are class 1, non-minimal class 2.
inline Pipeline train_pipeline(const LabeledWordSet& train, const PipelineConfig& cfg) {
  if (train.size() == 0) throw DataError("training set is empty");
  FeatureMap map = parse_feature_map(cfg.features, train.rank);
  LabeledSet data(feature_matrix(train, map, cfg.threads), class_labels(train), 2);
  return Pipeline{std::move(map), fit_model(data, cfg), cfg.theta};
}

// ---- JSON -----------------------------------------------------------------

inline json pipeline_to_json(const Pipeline& p) {
  json j = model_to_json(p.model);
  j["schema_version"] = kModelSchemaVersion;
  j["feature_map"] = p.features.name();
  j["rank"] = p.features.rank();
  j["patterns"] = p.features.column_names();
  j["theta_override"] = p.theta ? json(*p.theta) : json(nullptr);
  return j;
}

inline Pipeline pipeline_from_json(const json& j) {
  try {
    if (j.at("schema_version").get<int>() != kModelSchemaVersion)
      throw ModelError("unsupported model schema version " + j.at("schema_version").dump());
    const int rank = j.at("rank").get<int>();
    std::vector<Pattern> patterns;
    for (const auto& s : j.at("patterns")) patterns.push_back(Pattern::parse(s.get<std::string>(), rank));
    std::optional<double> theta;
    if (j.contains("theta_override") && !j.at("theta_override").is_null()) theta = j.at("theta_override").get<double>();
    return Pipeline{FeatureMap(j.at("feature_map").get<std::string>(), rank, std::move(patterns)), model_from_json(j),
                    theta};
  } catch (const json::exception& e) {
    throw ModelError(std::string("malformed model document: ") + e.what());
  } catch (const DataError& e) {
    throw ModelError(std::string("malformed model document: ") + e.what());
  } catch (const std::invalid_argument& e) {
    throw ModelError(std::string("malformed model document: ") + e.what());
  }
}

inline std::string pipeline_to_string(const Pipeline& p) { return pipeline_to_json(p).dump(2); }

}  // namespace whpr
