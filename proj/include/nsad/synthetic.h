// Seeded multimodal Gaussian datasets with uniform anomalies and optional
// uniform-noise dimensions.

#ifndef NSAD_SYNTHETIC_H_
#define NSAD_SYNTHETIC_H_

#include <cmath>
#include <cstddef>
#include <cstdint>
#include <vector>

#include "nsad/dataset.h"

namespace nsad {

struct SynthConfig {
  int dims = 16;
  // 1: origin. 2: +m and -m on every axis. 3: +m, -m and the origin.
  int num_modes = 2;
  double mode_magnitude = 2.4;
  // Per-dimension standard deviation; covariance 0.5 * I by default.
  double sigma = std::sqrt(0.5);
  int n_normal = 2500;
  // round(anomaly_fraction * n_normal) uniform anomalies are appended.
  double anomaly_fraction = 0.05;
  double noise_dim_fraction = 0.0;
  std::uint64_t seed = 0;

  void Validate() const;
  std::size_t NumAnomalies() const;
};

// Mode centers in the order points are generated.
std::vector<std::vector<double>> ModeCenters(const SynthConfig& config);

// n_normal Gaussian points (label 1) split evenly across the modes, mode by
// mode, followed by the anomalies (label 0) drawn uniformly over the bounding
// box of the normal points. Dimensions are named x000, x001, ...
Dataset GenerateMultimodal(const SynthConfig& config);

// The round(fraction * D) dimension indices that InjectNoiseDims replaces for
// this seed, ascending.
std::vector<std::size_t> ChooseNoiseDims(std::size_t dims, double fraction, std::uint64_t seed);

// Replaces the chosen dimensions with i.i.d. uniform values over each
// dimension's original range. Labels are unchanged.
Dataset InjectNoiseDims(const Dataset& data, double fraction, std::uint64_t seed);

}  // namespace nsad

#endif  // NSAD_SYNTHETIC_H_
