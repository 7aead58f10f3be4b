#include "nsad/serialization.h"

#include <fstream>

#include "nsad/common.h"

namespace nsad {
namespace {

using nlohmann::json;

void CheckVersion(const json& j, int expected, const char* what) {
  const int version = j.at("format_version").get<int>();
  if (version != expected) {
    throw FormatError(std::string(what) + " format_version " + std::to_string(version) +
                      " is not supported (expected " + std::to_string(expected) + ")");
  }
}

template <typename Fn>
auto Guarded(const char* what, Fn&& fn) -> decltype(fn()) {
  try {
    return fn();
  } catch (const json::exception& e) {
    throw FormatError(std::string("malformed ") + what + ": " + e.what());
  }
}

json ToJson(const DenseLayer& layer) {
  json weights = json::array();
  for (Eigen::Index r = 0; r < layer.weights.rows(); ++r) {
    json row = json::array();
    for (Eigen::Index c = 0; c < layer.weights.cols(); ++c) row.push_back(layer.weights(r, c));
    weights.push_back(std::move(row));
  }
  return {{"weights", std::move(weights)},
          {"bias", std::vector<double>(layer.bias.data(), layer.bias.data() + layer.bias.size())}};
}

DenseLayer DenseLayerFromJson(const json& j) {
  const auto rows = j.at("weights").get<std::vector<std::vector<double>>>();
  const auto bias = j.at("bias").get<std::vector<double>>();
  if (rows.empty() || rows.front().empty()) throw FormatError("layer weights are empty");
  DenseLayer layer{Eigen::MatrixXd(rows.size(), rows.front().size()),
                   Eigen::VectorXd(static_cast<Eigen::Index>(bias.size()))};
  for (std::size_t r = 0; r < rows.size(); ++r) {
    if (rows[r].size() != rows.front().size()) throw FormatError("ragged layer weights");
    for (std::size_t c = 0; c < rows[r].size(); ++c) layer.weights(r, c) = rows[r][c];
  }
  for (std::size_t i = 0; i < bias.size(); ++i) layer.bias(i) = bias[i];
  return layer;
}

json OptionalInt(const std::optional<int>& value) {
  return value ? json(*value) : json(nullptr);
}

std::optional<int> OptionalIntFromJson(const json& j) {
  if (j.is_null()) return std::nullopt;
  return j.get<int>();
}

}  // namespace

json ToJson(const NnConfig& config) {
  return {{"num_hidden_layers", config.num_hidden_layers},
          {"layer_width", config.layer_width},
          {"dropout", config.dropout},
          {"batch_size", config.batch_size},
          {"epochs", config.epochs},
          {"steps_per_epoch", OptionalInt(config.steps_per_epoch)},
          {"learning_rate", config.learning_rate},
          {"momentum", config.momentum},
          {"seed", config.seed}};
}

NnConfig NnConfigFromJson(const json& j) {
  return Guarded("network config", [&] {
    NnConfig config;
    config.num_hidden_layers = j.at("num_hidden_layers").get<int>();
    config.layer_width = j.at("layer_width").get<int>();
    config.dropout = j.at("dropout").get<double>();
    config.batch_size = j.at("batch_size").get<int>();
    config.epochs = j.at("epochs").get<int>();
    config.steps_per_epoch = OptionalIntFromJson(j.at("steps_per_epoch"));
    config.learning_rate = j.at("learning_rate").get<double>();
    config.momentum = j.at("momentum").get<double>();
    config.seed = j.at("seed").get<std::uint64_t>();
    config.Validate();
    return config;
  });
}

json ToJson(const RfConfig& config) {
  return {{"num_estimators", config.num_estimators},
          {"criterion", CriterionName(config.criterion)},
          {"max_depth", OptionalInt(config.max_depth)},
          {"min_samples_split", config.min_samples_split},
          {"min_samples_leaf", config.min_samples_leaf},
          {"max_features", config.max_features ? json(*config.max_features) : json("sqrt")},
          {"bootstrap", config.bootstrap},
          {"seed", config.seed}};
}

RfConfig RfConfigFromJson(const json& j) {
  return Guarded("forest config", [&] {
    RfConfig config;
    config.num_estimators = j.at("num_estimators").get<int>();
    config.criterion = ParseCriterion(j.at("criterion").get<std::string>());
    config.max_depth = OptionalIntFromJson(j.at("max_depth"));
    config.min_samples_split = j.at("min_samples_split").get<int>();
    config.min_samples_leaf = j.at("min_samples_leaf").get<int>();
    const json& features = j.at("max_features");
    if (features.is_string()) {
      if (features.get<std::string>() != "sqrt") throw FormatError("max_features must be an integer or \"sqrt\"");
    } else {
      config.max_features = features.get<int>();
    }
    config.bootstrap = j.at("bootstrap").get<bool>();
    config.seed = j.at("seed").get<std::uint64_t>();
    config.Validate();
    return config;
  });
}

json ToJson(const Normalizer& normalizer) {
  return {{"min", normalizer.mins()}, {"max", normalizer.maxs()}};
}

Normalizer NormalizerFromJson(const json& j) {
  return Guarded("normalizer", [&] {
    return Normalizer(j.at("min").get<std::vector<double>>(), j.at("max").get<std::vector<double>>());
  });
}

json ToJson(const NnModel& model) {
  json layers = json::array();
  for (const auto& layer : model.layers()) layers.push_back(ToJson(layer));
  return {{"format_version", kModelFormatVersion},
          {"config", ToJson(model.config())},
          {"layers", std::move(layers)},
          {"loss_history", model.loss_history()}};
}

NnModel NnModelFromJson(const json& j) {
  return Guarded("network", [&] {
    CheckVersion(j, kModelFormatVersion, "network");
    std::vector<DenseLayer> layers;
    for (const auto& layer : j.at("layers")) layers.push_back(DenseLayerFromJson(layer));
    return NnModel(NnConfigFromJson(j.at("config")), std::move(layers),
                   j.value("loss_history", std::vector<double>{}));
  });
}

json ToJson(const RfModel& model) {
  json trees = json::array();
  for (const auto& tree : model.trees()) {
    json nodes = json::array();
    for (const auto& node : tree.nodes()) {
      nodes.push_back({{"feature", node.feature},
                       {"threshold", node.threshold},
                       {"left", node.left},
                       {"right", node.right},
                       {"positive_fraction", node.positive_fraction},
                       {"sample_count", node.sample_count}});
    }
    trees.push_back(std::move(nodes));
  }
  return {{"format_version", kModelFormatVersion},
          {"config", ToJson(model.config())},
          {"input_dims", model.input_dims()},
          {"trees", std::move(trees)}};
}

RfModel RfModelFromJson(const json& j) {
  return Guarded("forest", [&] {
    CheckVersion(j, kModelFormatVersion, "forest");
    std::vector<DecisionTree> trees;
    for (const auto& tree : j.at("trees")) {
      std::vector<TreeNode> nodes;
      for (const auto& n : tree) {
        nodes.push_back(TreeNode{n.at("feature").get<int>(), n.at("threshold").get<double>(),
                                 n.at("left").get<int>(), n.at("right").get<int>(),
                                 n.at("positive_fraction").get<double>(),
                                 n.at("sample_count").get<int>()});
      }
      trees.emplace_back(std::move(nodes));
    }
    return RfModel(RfConfigFromJson(j.at("config")), j.at("input_dims").get<std::size_t>(),
                   std::move(trees));
  });
}

json DetectorToJson(const Detector& detector, const json& run_config) {
  json out = {{"format_version", kModelFormatVersion},
              {"detector", DetectorName(detector.kind())},
              {"dim_names", detector.dim_names()},
              {"normalizer", ToJson(detector.normalizer())},
              {"sample_ratio", detector.sample_ratio()},
              {"delta", detector.delta()},
              {"run_config", run_config}};
  if (const auto* nn = std::get_if<NnModel>(&detector.model())) {
    out["network"] = ToJson(*nn);
  } else {
    out["forest"] = ToJson(std::get<RfModel>(detector.model()));
  }
  return out;
}

Detector DetectorFromJson(const json& j) {
  return Guarded("model file", [&] {
    CheckVersion(j, kModelFormatVersion, "model file");
    const DetectorKind kind = ParseDetectorKind(j.at("detector").get<std::string>());
    std::variant<NnModel, RfModel> model =
        kind == DetectorKind::kNeuralNetwork
            ? std::variant<NnModel, RfModel>(NnModelFromJson(j.at("network")))
            : std::variant<NnModel, RfModel>(RfModelFromJson(j.at("forest")));
    return Detector(j.at("dim_names").get<std::vector<std::string>>(),
                    NormalizerFromJson(j.at("normalizer")), std::move(model),
                    j.at("sample_ratio").get<double>(), j.at("delta").get<double>());
  });
}

json ToJson(const BaselineSet& baselines) {
  json points = json::array();
  for (std::size_t i = 0; i < baselines.points.size(); ++i) {
    const auto row = baselines.points.Row(i);
    points.push_back(std::vector<double>(row.begin(), row.end()));
  }
  return {{"format_version", kBaselineFormatVersion},
          {"epsilon", baselines.epsilon},
          {"dim_names", baselines.points.dim_names()},
          {"source_indices", baselines.source_indices},
          {"scores", baselines.scores},
          {"points", std::move(points)}};
}

BaselineSet BaselineSetFromJson(const json& j) {
  return Guarded("baseline file", [&] {
    CheckVersion(j, kBaselineFormatVersion, "baseline file");
    std::vector<double> values;
    for (const auto& p : j.at("points")) {
      const auto row = p.get<std::vector<double>>();
      values.insert(values.end(), row.begin(), row.end());
    }
    BaselineSet set{Dataset(j.at("dim_names").get<std::vector<std::string>>(), std::move(values)),
                    j.at("scores").get<std::vector<double>>(),
                    j.at("source_indices").get<std::vector<std::size_t>>(),
                    j.at("epsilon").get<double>()};
    if (set.points.empty() || set.scores.size() != set.points.size() ||
        set.source_indices.size() != set.points.size()) {
      throw FormatError("baseline file must hold a non-empty, aligned point/score list");
    }
    return set;
  });
}

nlohmann::ordered_json InterpretationToJson(const AnomalyInterpretation& interpretation,
                                            std::span<const std::string> dim_names) {
  if (dim_names.size() != interpretation.blames.size()) {
    throw ShapeError("dimension names do not match the interpretation");
  }
  nlohmann::ordered_json expected = nlohmann::ordered_json::object();
  nlohmann::ordered_json observed = nlohmann::ordered_json::object();
  nlohmann::ordered_json blame = nlohmann::ordered_json::object();
  for (std::size_t d = 0; d < dim_names.size(); ++d) {
    expected[dim_names[d]] = interpretation.baseline_raw[d];
    observed[dim_names[d]] = interpretation.observed_raw[d];
  }
  for (const std::size_t d : interpretation.RankedDimensions()) {
    blame[dim_names[d]] = interpretation.blames[d];
  }
  nlohmann::ordered_json out;
  out["score"] = interpretation.score;
  out["baseline_score"] = interpretation.baseline_score;
  out["expected_normal"] = std::move(expected);
  out["observed"] = std::move(observed);
  out["blame"] = std::move(blame);
  out["blame_sum"] = interpretation.BlameSum();
  out["completeness_residual"] = interpretation.completeness_residual;
  out["distance"] = interpretation.distance;
  out["baseline_index"] = interpretation.baseline_index;
  out["steps"] = interpretation.steps;
  return out;
}

nlohmann::ordered_json ToJson(const EvalReport& report) {
  nlohmann::ordered_json out;
  out["detector"] = report.detector;
  out["dataset"] = report.dataset;
  out["trials"] = report.trials;
  out["folds"] = report.folds;
  out["aucs"] = report.aucs;
  out["mean_percent"] = report.mean_percent;
  out["std_percent"] = report.std_percent;
  out["seconds"] = report.seconds;
  return out;
}

json ReadJsonFile(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open '" + path + "'");
  try {
    return json::parse(in);
  } catch (const json::exception& e) {
    throw ParseError("'" + path + "' is not valid JSON: " + e.what());
  }
}

}  // namespace nsad
