// JSON documents for models, baseline sets, interpretation reports and
// evaluation reports. Doubles are written in shortest round-trip form, so a
// reloaded model reproduces predictions bit for bit.

#ifndef NSAD_SERIALIZATION_H_
#define NSAD_SERIALIZATION_H_

#include <span>
#include <string>
#include <vector>

#include "json.hpp"
#include "nsad/attribution.h"
#include "nsad/dataset.h"
#include "nsad/detector.h"
#include "nsad/evaluation.h"
#include "nsad/neural_network.h"
#include "nsad/random_forest.h"

namespace nsad {

inline constexpr int kModelFormatVersion = 1;
inline constexpr int kBaselineFormatVersion = 1;

nlohmann::json ToJson(const NnConfig& config);
NnConfig NnConfigFromJson(const nlohmann::json& j);
nlohmann::json ToJson(const RfConfig& config);
RfConfig RfConfigFromJson(const nlohmann::json& j);
nlohmann::json ToJson(const Normalizer& normalizer);
Normalizer NormalizerFromJson(const nlohmann::json& j);

// {format_version, config, layers: [{weights: [[...]], bias: [...]}], loss_history}
nlohmann::json ToJson(const NnModel& model);
NnModel NnModelFromJson(const nlohmann::json& j);

// {format_version, config, input_dims, trees: [[{feature, threshold, left,
// right, positive_fraction, sample_count}, ...], ...]}
nlohmann::json ToJson(const RfModel& model);
RfModel RfModelFromJson(const nlohmann::json& j);

// Model file: {format_version, detector, dim_names, normalizer, sample_ratio,
// delta, network|forest, run_config}. `run_config` is stored verbatim.
nlohmann::json DetectorToJson(const Detector& detector,
                              const nlohmann::json& run_config = nlohmann::json::object());
Detector DetectorFromJson(const nlohmann::json& j);

nlohmann::json ToJson(const BaselineSet& baselines);
BaselineSet BaselineSetFromJson(const nlohmann::json& j);

// {score, expected_normal, observed, blame, completeness_residual, distance,
// ...}; blame keys are ordered by descending |B_d|.
nlohmann::ordered_json InterpretationToJson(const AnomalyInterpretation& interpretation,
                                            std::span<const std::string> dim_names);

nlohmann::ordered_json ToJson(const EvalReport& report);

// Parses JSON from a file, wrapping failures in IoError/ParseError.
nlohmann::json ReadJsonFile(const std::string& path);

}  // namespace nsad

#endif  // NSAD_SERIALIZATION_H_
