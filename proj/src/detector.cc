#include "nsad/detector.h"

#include <cmath>

#include "nsad/common.h"

namespace nsad {

std::string DetectorName(DetectorKind kind) {
  return kind == DetectorKind::kNeuralNetwork ? "ns-nn" : "ns-rf";
}

DetectorKind ParseDetectorKind(const std::string& name) {
  if (name == "ns-nn") return DetectorKind::kNeuralNetwork;
  if (name == "ns-rf") return DetectorKind::kRandomForest;
  throw PreconditionError("unknown detector '" + name + "' (expected ns-nn or ns-rf)");
}

void DetectorConfig::Validate() const {
  Require(std::isfinite(sample_ratio) && sample_ratio > 0.0, "sample ratio must be > 0");
  Require(std::isfinite(delta) && delta >= 0.0, "delta must be >= 0");
  if (kind == DetectorKind::kNeuralNetwork) {
    nn.Validate();
  } else {
    rf.Validate();
  }
}

Detector::Detector(std::vector<std::string> dim_names, Normalizer normalizer,
                   std::variant<NnModel, RfModel> model, double sample_ratio, double delta)
    : dim_names_(std::move(dim_names)),
      normalizer_(std::move(normalizer)),
      model_(std::move(model)),
      sample_ratio_(sample_ratio),
      delta_(delta) {
  const std::size_t model_dims =
      std::visit([](const auto& m) { return m.input_dims(); }, model_);
  Require(dim_names_.size() == normalizer_.dims() && model_dims == normalizer_.dims(),
          "detector dimension names, normalizer and model disagree on dimensionality");
}

DetectorKind Detector::kind() const {
  return std::holds_alternative<NnModel>(model_) ? DetectorKind::kNeuralNetwork
                                                 : DetectorKind::kRandomForest;
}

double Detector::ScoreUnit(std::span<const double> unit) const {
  return std::visit([&](const auto& m) { return m.Predict(unit); }, model_);
}

double Detector::Score(std::span<const double> raw) const {
  return ScoreUnit(normalizer_.NormalizePoint(raw));
}

std::vector<double> Detector::ScoreAll(const Dataset& raw) const {
  if (raw.dims() != normalizer_.dims()) {
    throw ShapeError("detector expects " + std::to_string(normalizer_.dims()) +
                     " dimensions, data has " + std::to_string(raw.dims()));
  }
  std::vector<double> scores(raw.size());
  for (std::size_t i = 0; i < raw.size(); ++i) scores[i] = Score(raw.Row(i));
  return scores;
}

const NnModel& Detector::network() const {
  if (const auto* nn = std::get_if<NnModel>(&model_)) return *nn;
  throw UnsupportedError(
      "attribution needs a differentiable ns-nn model; ns-rf forests have no input gradient");
}

Detector TrainDetector(const Dataset& raw_positive, const DetectorConfig& config) {
  config.Validate();
  Normalizer normalizer = FitNormalizer(raw_positive);
  const Dataset unit = Normalize(normalizer, raw_positive.WithoutLabels());
  const TrainingSet training =
      BuildTrainingSet(unit, config.sample_ratio, config.delta, DeriveSeed(config.seed, 0));
  std::variant<NnModel, RfModel> model = [&]() -> std::variant<NnModel, RfModel> {
    if (config.kind == DetectorKind::kNeuralNetwork) {
      NnConfig nn = config.nn;
      nn.seed = DeriveSeed(config.seed, 1);
      return TrainNn(training, nn);
    }
    RfConfig rf = config.rf;
    rf.seed = DeriveSeed(config.seed, 1);
    return TrainRf(training, rf);
  }();
  return Detector(raw_positive.dim_names(), std::move(normalizer), std::move(model),
                  config.sample_ratio, config.delta);
}

BaselineSet SelectDetectorBaselines(const Detector& detector, const Dataset& raw_positive,
                                    double epsilon) {
  const NnModel& network = detector.network();
  return SelectBaselines(network, Normalize(detector.normalizer(), raw_positive.WithoutLabels()),
                         epsilon);
}

AnomalyInterpretation InterpretPoint(const Detector& detector, const BaselineSet& baselines,
                                     std::span<const double> x_raw, int steps) {
  return Interpret(detector.network(), baselines, x_raw, steps, detector.normalizer());
}

}  // namespace nsad
