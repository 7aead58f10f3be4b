// Feed-forward binary classifier: dense ReLU + dropout hidden layers and a
// sigmoid output, trained with binary cross-entropy by mini-batch SGD.
// Exposes the analytic gradient of the output with respect to the input.

#ifndef NSAD_NEURAL_NETWORK_H_
#define NSAD_NEURAL_NETWORK_H_

#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>
#include <vector>

#include <Eigen/Dense>

#include "nsad/common.h"
#include "nsad/dataset.h"
#include "nsad/negative_sampling.h"

namespace nsad {

struct NnConfig {
  int num_hidden_layers = 2;
  int layer_width = 64;
  double dropout = 0.1;
  int batch_size = 32;
  int epochs = 100;
  // Mini-batches per epoch. Unset means one full pass over the training set,
  // i.e. ceil(size / batch_size).
  std::optional<int> steps_per_epoch;
  double learning_rate = 1e-3;
  // Classical momentum coefficient; 0 gives plain SGD.
  double momentum = 0.9;
  std::uint64_t seed = 0;

  // Throws PreconditionError on out-of-range fields.
  void Validate() const;
};

// weights is (outputs x inputs).
struct DenseLayer {
  Eigen::MatrixXd weights;
  Eigen::VectorXd bias;
};

// A trained (or hand-built) network. Layers chain D -> width -> ... -> 1; every
// layer but the last is followed by ReLU, the last by a sigmoid. Inference
// never applies dropout, so the model is immutable and thread-safe to query.
class NnModel {
 public:
  NnModel(NnConfig config, std::vector<DenseLayer> layers,
          std::vector<double> loss_history = {});

  std::size_t input_dims() const { return static_cast<std::size_t>(layers_.front().weights.cols()); }
  const NnConfig& config() const { return config_; }
  const std::vector<DenseLayer>& layers() const { return layers_; }
  // Mean training loss of each epoch (dropout active).
  const std::vector<double>& loss_history() const { return loss_history_; }

  // Output pre-activation.
  double Logit(std::span<const double> x) const;
  // Score in (0, 1); near 1 means normal.
  double Predict(std::span<const double> x) const;
  // dPredict/dx_d for every d. ReLU'(0) is taken as 0.
  std::vector<double> InputGradient(std::span<const double> x) const;
  // One training-mode forward pass (inverted dropout drawn from `rng`).
  double DropoutLogit(std::span<const double> x, Rng& rng) const;

 private:
  void CheckInput(std::span<const double> x) const;

  NnConfig config_;
  std::vector<DenseLayer> layers_;
  std::vector<double> loss_history_;
};

// He-initialized network for `input_dims` inputs; biases start at zero.
NnModel InitializeNn(std::size_t input_dims, const NnConfig& config);

// Trains from InitializeNn(config) on `data`. Deterministic given config.seed.
// Throws PreconditionError if a class is missing and TrainingError if the loss
// becomes non-finite.
NnModel TrainNn(const TrainingSet& data, const NnConfig& config);

// Mean binary cross-entropy of the deterministic network on a labeled dataset.
double MeanBinaryCrossEntropy(const NnModel& model, const Dataset& labeled);

double Sigmoid(double z);

}  // namespace nsad

#endif  // NSAD_NEURAL_NETWORK_H_
