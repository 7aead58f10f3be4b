// End-to-end negative-sampling detector: fit the normalizer on the raw
// positive sample, build the two-class training set in unit space and train
// either classifier.

#ifndef NSAD_DETECTOR_H_
#define NSAD_DETECTOR_H_

#include <cstdint>
#include <span>
#include <string>
#include <variant>
#include <vector>

#include "nsad/attribution.h"
#include "nsad/dataset.h"
#include "nsad/negative_sampling.h"
#include "nsad/neural_network.h"
#include "nsad/random_forest.h"

namespace nsad {

enum class DetectorKind { kNeuralNetwork, kRandomForest };

// "ns-nn" / "ns-rf".
std::string DetectorName(DetectorKind kind);
DetectorKind ParseDetectorKind(const std::string& name);

struct DetectorConfig {
  DetectorKind kind = DetectorKind::kNeuralNetwork;
  NnConfig nn;
  RfConfig rf;
  double sample_ratio = 2.0;
  double delta = kDefaultDelta;
  // Fanned out to the sampling and classifier seeds; overrides nn.seed/rf.seed.
  std::uint64_t seed = 0;

  void Validate() const;
};

class Detector {
 public:
  Detector(std::vector<std::string> dim_names, Normalizer normalizer,
           std::variant<NnModel, RfModel> model, double sample_ratio, double delta);

  DetectorKind kind() const;
  const std::vector<std::string>& dim_names() const { return dim_names_; }
  const Normalizer& normalizer() const { return normalizer_; }
  const std::variant<NnModel, RfModel>& model() const { return model_; }
  double sample_ratio() const { return sample_ratio_; }
  double delta() const { return delta_; }

  // Score of a point already in unit space.
  double ScoreUnit(std::span<const double> unit) const;
  // Score of a raw point; near 1 = normal.
  double Score(std::span<const double> raw) const;
  std::vector<double> ScoreAll(const Dataset& raw) const;

  // Throws UnsupportedError for forests, which have no input gradient.
  const NnModel& network() const;

 private:
  std::vector<std::string> dim_names_;
  Normalizer normalizer_;
  std::variant<NnModel, RfModel> model_;
  double sample_ratio_;
  double delta_;
};

// Trains on every row of `raw_positive`; its labels, if any, are ignored.
Detector TrainDetector(const Dataset& raw_positive, const DetectorConfig& config);

// Baselines from the detector's own (normalized) positive sample.
BaselineSet SelectDetectorBaselines(const Detector& detector, const Dataset& raw_positive,
                                    double epsilon);

AnomalyInterpretation InterpretPoint(const Detector& detector, const BaselineSet& baselines,
                                     std::span<const double> x_raw, int steps);

}  // namespace nsad

#endif  // NSAD_DETECTOR_H_
