#include "nsad/neural_network.h"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <random>
#include <string>

namespace nsad {
namespace {

// Predictions are kept strictly inside (0, 1) even when the logit saturates
// the double-precision sigmoid.
const double kMinScore = std::numeric_limits<double>::min();
const double kMaxScore = std::nextafter(1.0, 0.0);

// log(1 + exp(-|z|)) + max(z, 0) - z * y, the numerically stable BCE on logits.
double BceFromLogit(double z, double y) {
  return std::max(z, 0.0) - z * y + std::log1p(std::exp(-std::abs(z)));
}

Eigen::Map<const Eigen::VectorXd> AsVector(std::span<const double> x) {
  return {x.data(), static_cast<Eigen::Index>(x.size())};
}

}  // namespace

double Sigmoid(double z) {
  if (z >= 0.0) return 1.0 / (1.0 + std::exp(-z));
  const double e = std::exp(z);
  return e / (1.0 + e);
}

void NnConfig::Validate() const {
  Require(num_hidden_layers >= 1, "num_hidden_layers must be >= 1");
  Require(layer_width >= 1, "layer_width must be >= 1");
  Require(dropout >= 0.0 && dropout < 1.0, "dropout must lie in [0, 1)");
  Require(batch_size >= 1, "batch_size must be >= 1");
  Require(epochs >= 1, "epochs must be >= 1");
  Require(!steps_per_epoch || *steps_per_epoch >= 1, "steps_per_epoch must be >= 1");
  Require(std::isfinite(learning_rate) && learning_rate > 0.0, "learning_rate must be > 0");
  Require(momentum >= 0.0 && momentum < 1.0, "momentum must lie in [0, 1)");
}

NnModel::NnModel(NnConfig config, std::vector<DenseLayer> layers,
                 std::vector<double> loss_history)
    : config_(std::move(config)),
      layers_(std::move(layers)),
      loss_history_(std::move(loss_history)) {
  Require(layers_.size() >= 1, "a network needs at least an output layer");
  Require(layers_.front().weights.cols() >= 1, "network input dimensionality must be >= 1");
  for (std::size_t l = 0; l < layers_.size(); ++l) {
    const auto& layer = layers_[l];
    Require(layer.bias.size() == layer.weights.rows(),
            "layer " + std::to_string(l) + " bias size does not match its weights");
    if (l > 0) {
      Require(layer.weights.cols() == layers_[l - 1].weights.rows(),
              "layer " + std::to_string(l) + " input size does not chain");
    }
    Require(layer.weights.allFinite() && layer.bias.allFinite(),
            "layer " + std::to_string(l) + " has non-finite parameters");
  }
  Require(layers_.back().weights.rows() == 1, "the output layer must have width 1");
}

void NnModel::CheckInput(std::span<const double> x) const {
  if (x.size() != input_dims()) {
    throw ShapeError("network expects " + std::to_string(input_dims()) +
                     " inputs, got " + std::to_string(x.size()));
  }
}

double NnModel::Logit(std::span<const double> x) const {
  CheckInput(x);
  Eigen::VectorXd a = AsVector(x);
  for (std::size_t l = 0; l + 1 < layers_.size(); ++l) {
    a = (layers_[l].weights * a + layers_[l].bias).cwiseMax(0.0);
  }
  return (layers_.back().weights * a + layers_.back().bias)(0);
}

double NnModel::Predict(std::span<const double> x) const {
  return std::clamp(Sigmoid(Logit(x)), kMinScore, kMaxScore);
}

std::vector<double> NnModel::InputGradient(std::span<const double> x) const {
  CheckInput(x);
  std::vector<Eigen::VectorXd> pre_activations;
  pre_activations.reserve(layers_.size() - 1);
  Eigen::VectorXd a = AsVector(x);
  for (std::size_t l = 0; l + 1 < layers_.size(); ++l) {
    pre_activations.push_back(layers_[l].weights * a + layers_[l].bias);
    a = pre_activations.back().cwiseMax(0.0);
  }
  const double p = Sigmoid((layers_.back().weights * a + layers_.back().bias)(0));

  Eigen::VectorXd grad = layers_.back().weights.row(0).transpose() * (p * (1.0 - p));
  for (std::size_t l = layers_.size() - 1; l-- > 0;) {
    grad = grad.cwiseProduct((pre_activations[l].array() > 0.0).cast<double>().matrix());
    grad = layers_[l].weights.transpose() * grad;
  }
  return {grad.data(), grad.data() + grad.size()};
}

double NnModel::DropoutLogit(std::span<const double> x, Rng& rng) const {
  CheckInput(x);
  const double keep = 1.0 - config_.dropout;
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  Eigen::VectorXd a = AsVector(x);
  for (std::size_t l = 0; l + 1 < layers_.size(); ++l) {
    a = (layers_[l].weights * a + layers_[l].bias).cwiseMax(0.0);
    for (Eigen::Index i = 0; i < a.size(); ++i) {
      a(i) = unit(rng) < config_.dropout ? 0.0 : a(i) / keep;
    }
  }
  return (layers_.back().weights * a + layers_.back().bias)(0);
}

NnModel InitializeNn(std::size_t input_dims, const NnConfig& config) {
  config.Validate();
  Require(input_dims >= 1, "network input dimensionality must be >= 1");
  Rng rng(DeriveSeed(config.seed, 0));
  std::vector<DenseLayer> layers;
  Eigen::Index fan_in = static_cast<Eigen::Index>(input_dims);
  for (int l = 0; l <= config.num_hidden_layers; ++l) {
    const bool output = l == config.num_hidden_layers;
    const Eigen::Index fan_out = output ? 1 : config.layer_width;
    // He scaling for ReLU layers; the sigmoid output uses 1/fan_in.
    const double stddev = std::sqrt((output ? 1.0 : 2.0) / static_cast<double>(fan_in));
    std::normal_distribution<double> normal(0.0, stddev);
    DenseLayer layer{Eigen::MatrixXd(fan_out, fan_in), Eigen::VectorXd::Zero(fan_out)};
    for (Eigen::Index r = 0; r < fan_out; ++r) {
      for (Eigen::Index c = 0; c < fan_in; ++c) layer.weights(r, c) = normal(rng);
    }
    layers.push_back(std::move(layer));
    fan_in = fan_out;
  }
  return NnModel(config, std::move(layers));
}

NnModel TrainNn(const TrainingSet& data, const NnConfig& config) {
  config.Validate();
  const Dataset& points = data.points;
  Require(points.size() >= 1, "training set is empty");
  Require(points.CountLabel(kNormalLabel) > 0 && points.CountLabel(kAnomalousLabel) > 0,
          "training data must contain both classes");

  NnModel initial = InitializeNn(points.dims(), config);
  std::vector<DenseLayer> layers = initial.layers();
  std::vector<DenseLayer> velocity;
  for (const auto& layer : layers) {
    velocity.push_back({Eigen::MatrixXd::Zero(layer.weights.rows(), layer.weights.cols()),
                        Eigen::VectorXd::Zero(layer.bias.size())});
  }

  const std::size_t n = points.size();
  const std::size_t dims = points.dims();
  const std::size_t batch = std::min<std::size_t>(config.batch_size, n);
  const int steps = config.steps_per_epoch.value_or(
      static_cast<int>((n + config.batch_size - 1) / config.batch_size));
  const std::size_t hidden = layers.size() - 1;
  const double keep = 1.0 - config.dropout;

  Rng rng(DeriveSeed(config.seed, 1));
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), 0);
  std::shuffle(order.begin(), order.end(), rng);
  std::size_t cursor = 0;

  Eigen::MatrixXd x(dims, batch);
  Eigen::RowVectorXd y(batch);
  std::vector<Eigen::MatrixXd> activations(hidden + 1);
  std::vector<Eigen::MatrixXd> pre(hidden);
  std::vector<Eigen::MatrixXd> masks(hidden);
  std::vector<double> history;
  history.reserve(config.epochs);

  for (int epoch = 0; epoch < config.epochs; ++epoch) {
    double epoch_loss = 0.0;
    for (int step = 0; step < steps; ++step) {
      for (std::size_t b = 0; b < batch; ++b) {
        if (cursor == n) {
          std::shuffle(order.begin(), order.end(), rng);
          cursor = 0;
        }
        const std::size_t i = order[cursor++];
        x.col(static_cast<Eigen::Index>(b)) = AsVector(points.Row(i));
        y(static_cast<Eigen::Index>(b)) = points.labels()[i];
      }

      activations[0] = x;
      for (std::size_t l = 0; l < hidden; ++l) {
        pre[l] = (layers[l].weights * activations[l]).colwise() + layers[l].bias;
        masks[l].resize(pre[l].rows(), pre[l].cols());
        for (Eigen::Index k = 0; k < masks[l].size(); ++k) {
          masks[l](k) = unit(rng) < config.dropout ? 0.0 : 1.0 / keep;
        }
        activations[l + 1] = pre[l].cwiseMax(0.0).cwiseProduct(masks[l]);
      }
      const Eigen::RowVectorXd logits =
          (layers[hidden].weights * activations[hidden]).array() + layers[hidden].bias(0);

      double loss = 0.0;
      Eigen::RowVectorXd d_logits(batch);
      for (Eigen::Index b = 0; b < logits.size(); ++b) {
        loss += BceFromLogit(logits(b), y(b));
        d_logits(b) = (Sigmoid(logits(b)) - y(b)) / static_cast<double>(batch);
      }
      loss /= static_cast<double>(batch);
      if (!std::isfinite(loss)) {
        throw TrainingError("training diverged (non-finite loss) at epoch " +
                            std::to_string(epoch + 1));
      }
      epoch_loss += loss;

      Eigen::MatrixXd upstream = d_logits;
      for (std::size_t l = hidden + 1; l-- > 0;) {
        const Eigen::MatrixXd grad_w = upstream * activations[l].transpose();
        const Eigen::VectorXd grad_b = upstream.rowwise().sum();
        if (l > 0) {
          upstream = (layers[l].weights.transpose() * upstream)
                         .cwiseProduct(masks[l - 1])
                         .cwiseProduct((pre[l - 1].array() > 0.0).cast<double>().matrix());
        }
        velocity[l].weights = config.momentum * velocity[l].weights - config.learning_rate * grad_w;
        velocity[l].bias = config.momentum * velocity[l].bias - config.learning_rate * grad_b;
        layers[l].weights += velocity[l].weights;
        layers[l].bias += velocity[l].bias;
      }
    }
    history.push_back(epoch_loss / steps);
  }

  for (std::size_t l = 0; l < layers.size(); ++l) {
    if (!layers[l].weights.allFinite() || !layers[l].bias.allFinite()) {
      throw TrainingError("training produced non-finite parameters in layer " +
                          std::to_string(l) + " after epoch " + std::to_string(config.epochs));
    }
  }
  return NnModel(config, std::move(layers), std::move(history));
}

double MeanBinaryCrossEntropy(const NnModel& model, const Dataset& labeled) {
  Require(labeled.size() > 0, "cannot average loss over an empty dataset");
  double total = 0.0;
  for (std::size_t i = 0; i < labeled.size(); ++i) {
    total += BceFromLogit(model.Logit(labeled.Row(i)), labeled.labels()[i]);
  }
  return total / static_cast<double>(labeled.size());
}

}  // namespace nsad
