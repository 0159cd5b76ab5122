#pragma once

// The trained-model variant, prediction, and the versioned JSON form.

#include <nlohmann/json.hpp>

#include <variant>

#include "whpr/classifiers/distance.hpp"
#include "whpr/classifiers/linear.hpp"
#include "whpr/classifiers/quantizer.hpp"
#include "whpr/classifiers/tree.hpp"

namespace whpr {

using Model = std::variant<LinearModel, DistanceModel, TreeModel>;

struct Prediction {
  int label = 1;
  double score = 0.0;
};

namespace detail {

template <class M>
Prediction predict_thresholded(const M& model, std::span<const double> x) {
  const double s = model.score(x);
  return {model.quantizer ? model.quantizer->classify(s) : model.rule.classify(s), s};
}

}  // namespace detail

/// Score is the discriminant value; the label comes from the quantizer when
/// one is attached, otherwise from the threshold rule.
inline Prediction predict(const Model& model, std::span<const double> x) {
  return std::visit(
      [&](const auto& m) -> Prediction {
        using T = std::decay_t<decltype(m)>;
        if constexpr (std::is_same_v<T, TreeModel>) {
          return {m.classify(x), m.score(x)};
        } else {
          return detail::predict_thresholded(m, x);
        }
      },
      model);
}

inline double model_score(const Model& model, std::span<const double> x) {
  return std::visit([&](const auto& m) { return m.score(x); }, model);
}

inline std::string method_tag(const Model& model) {
  if (const auto* l = std::get_if<LinearModel>(&model)) return to_string(l->method);
  if (const auto* d = std::get_if<DistanceModel>(&model))
    return std::holds_alternative<FlatDiscriminant>(d->discriminant) ? "distance_flat" : "distance_mahalanobis";
  return "tree";
}

// ---- JSON -----------------------------------------------------------------

using nlohmann::json;

inline constexpr int kModelSchemaVersion = 1;

namespace detail {

inline json matrix_to_json(const Matrix& m) {
  json rows = json::array();
  for (std::size_t i = 0; i < m.rows(); ++i) rows.push_back(Vector(m.row(i).begin(), m.row(i).end()));
  return json{{"rows", m.rows()}, {"cols", m.cols()}, {"data", rows}};
}

inline Matrix matrix_from_json(const json& j) {
  Matrix m(j.at("rows").get<std::size_t>(), j.at("cols").get<std::size_t>());
  const auto& data = j.at("data");
  if (data.size() != m.rows()) throw ModelError("matrix row count mismatch");
  for (std::size_t i = 0; i < m.rows(); ++i) {
    const auto row = data[i].get<Vector>();
    if (row.size() != m.cols()) throw ModelError("matrix column count mismatch");
    std::copy(row.begin(), row.end(), m.row(i).begin());
  }
  return m;
}

inline json rule_to_json(const ThresholdRule& r) {
  return json{{"theta", r.theta}, {"orientation", to_string(r.orientation)}, {"training_error", r.training_error}};
}

inline ThresholdRule rule_from_json(const json& j) {
  return {j.at("theta").get<double>(), parse_orientation(j.at("orientation").get<std::string>()),
          j.at("training_error").get<double>()};
}

inline json quantizer_to_json(const std::optional<Quantizer>& q) {
  if (!q) return nullptr;
  return json{{"kind", to_string(q->kind)}, {"lo", q->lo},           {"hi", q->hi},
              {"boundaries", q->boundaries}, {"labels", q->labels}, {"degenerate", q->degenerate}};
}

inline std::optional<Quantizer> quantizer_from_json(const json& j) {
  if (j.is_null()) return std::nullopt;
  Quantizer q;
  q.kind = parse_quantizer_kind(j.at("kind").get<std::string>());
  q.lo = j.at("lo").get<double>();
  q.hi = j.at("hi").get<double>();
  q.boundaries = j.at("boundaries").get<std::vector<double>>();
  q.labels = j.at("labels").get<std::vector<int>>();
  q.degenerate = j.at("degenerate").get<bool>();
  if (q.labels.size() != q.boundaries.size() + 1) throw ModelError("quantizer needs one label per interval");
  return q;
}

inline json flat_to_json(const FlatModel& f) {
  return json{{"mean", f.mean}, {"normals", matrix_to_json(f.normals)}, {"tol", f.tol}};
}

inline FlatModel flat_from_json(const json& j) {
  return {j.at("mean").get<Vector>(), matrix_from_json(j.at("normals")), j.at("tol").get<double>()};
}

inline json node_to_json(const TreeNode& n) {
  json j{{"label", n.label}, {"class_counts", n.class_counts}};
  if (!n.is_leaf()) {
    j["feature"] = n.feature;
    j["threshold"] = n.threshold;
    j["left"] = node_to_json(*n.left);
    j["right"] = node_to_json(*n.right);
  }
  return j;
}

inline std::unique_ptr<TreeNode> node_from_json(const json& j) {
  auto n = std::make_unique<TreeNode>();
  n->label = j.at("label").get<int>();
  n->class_counts = j.at("class_counts").get<std::vector<std::size_t>>();
  if (j.contains("left")) {
    n->feature = j.at("feature").get<std::size_t>();
    n->threshold = j.at("threshold").get<double>();
    n->left = node_from_json(j.at("left"));
    n->right = node_from_json(j.at("right"));
  }
  return n;
}

}  // namespace detail

inline json model_to_json(const Model& model) {
  json j{{"method", method_tag(model)}};
  if (const auto* l = std::get_if<LinearModel>(&model)) {
    j["weights"] = l->weights;
    j["rule"] = detail::rule_to_json(l->rule);
    j["theta"] = l->rule.theta;
    j["orientation"] = to_string(l->rule.orientation);
    j["quantizer"] = detail::quantizer_to_json(l->quantizer);
  } else if (const auto* d = std::get_if<DistanceModel>(&model)) {
    j["rule"] = detail::rule_to_json(d->rule);
    j["theta"] = d->rule.theta;
    j["orientation"] = to_string(d->rule.orientation);
    j["quantizer"] = detail::quantizer_to_json(d->quantizer);
    j["ridge_repaired"] = d->ridge_repaired;
    if (const auto* f = std::get_if<FlatDiscriminant>(&d->discriminant)) {
      j["flat1"] = detail::flat_to_json(f->class1);
      j["flat2"] = detail::flat_to_json(f->class2);
    } else {
      const auto& m = std::get<MahalanobisDiscriminant>(d->discriminant);
      j["mean1"] = m.mean1;
      j["inverse1"] = detail::matrix_to_json(m.inverse1);
      j["mean2"] = m.mean2;
      j["inverse2"] = detail::matrix_to_json(m.inverse2);
    }
  } else {
    const auto& t = std::get<TreeModel>(model);
    j["classes"] = t.classes;
    j["max_depth"] = t.max_depth;
    j["min_node"] = t.min_node;
    j["chi2_cutoff"] = t.chi2_cutoff;
    j["criterion"] = t.criterion == SplitCriterion::Purity ? "purity" : "misclassification";
    j["eps_type1"] = t.eps_type1;
    j["eps_type2"] = t.eps_type2;
    j["tree"] = detail::node_to_json(*t.root);
  }
  return j;
}

inline Model model_from_json(const json& j) {
  try {
    const std::string method = j.at("method").get<std::string>();
    if (method == "regression" || method == "fisher" || method == "svm") {
      LinearModel l;
      l.method = method == "regression" ? LinearMethod::Regression
                 : method == "fisher"   ? LinearMethod::Fisher
                                        : LinearMethod::Svm;
      l.weights = j.at("weights").get<Vector>();
      l.rule = detail::rule_from_json(j.at("rule"));
      l.quantizer = detail::quantizer_from_json(j.at("quantizer"));
      return l;
    }
    if (method == "distance_flat" || method == "distance_mahalanobis") {
      DistanceModel d;
      d.rule = detail::rule_from_json(j.at("rule"));
      d.quantizer = detail::quantizer_from_json(j.at("quantizer"));
      d.ridge_repaired = j.at("ridge_repaired").get<bool>();
      if (method == "distance_flat") {
        d.discriminant = FlatDiscriminant{detail::flat_from_json(j.at("flat1")), detail::flat_from_json(j.at("flat2"))};
      } else {
        d.discriminant = MahalanobisDiscriminant{j.at("mean1").get<Vector>(), detail::matrix_from_json(j.at("inverse1")),
                                                 j.at("mean2").get<Vector>(), detail::matrix_from_json(j.at("inverse2"))};
      }
      return d;
    }
    if (method == "tree") {
      TreeModel t;
      t.classes = j.at("classes").get<int>();
      t.max_depth = j.at("max_depth").get<std::size_t>();
      t.min_node = j.at("min_node").get<std::size_t>();
      t.chi2_cutoff = j.at("chi2_cutoff").get<double>();
      t.criterion = j.at("criterion").get<std::string>() == "purity" ? SplitCriterion::Purity
                                                                     : SplitCriterion::Misclassification;
      t.eps_type1 = j.at("eps_type1").get<double>();
      t.eps_type2 = j.at("eps_type2").get<double>();
      t.root = detail::node_from_json(j.at("tree"));
      return t;
    }
    throw ModelError("unknown model method '" + method + "'");
  } catch (const json::exception& e) {
    throw ModelError(std::string("malformed model document: ") + e.what());
  }
}

}  // namespace whpr
