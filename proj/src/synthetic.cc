#include "nsad/synthetic.h"

#include <algorithm>
#include <cstdio>
#include <numeric>
#include <random>
#include <string>

#include "nsad/common.h"

namespace nsad {
namespace {

std::string DimName(std::size_t d) {
  char name[16];
  std::snprintf(name, sizeof(name), "x%03zu", d);
  return name;
}

}  // namespace

void SynthConfig::Validate() const {
  Require(dims >= 1, "dims must be >= 1");
  Require(num_modes >= 1 && num_modes <= 3, "num_modes must be 1, 2 or 3");
  Require(std::isfinite(mode_magnitude), "mode_magnitude must be finite");
  Require(std::isfinite(sigma) && sigma > 0.0, "sigma must be > 0");
  Require(n_normal >= num_modes, "n_normal must be at least num_modes");
  Require(anomaly_fraction >= 0.0 && anomaly_fraction < 1.0,
          "anomaly_fraction must lie in [0, 1)");
  Require(noise_dim_fraction >= 0.0 && noise_dim_fraction < 1.0,
          "noise_dim_fraction must lie in [0, 1)");
}

std::size_t SynthConfig::NumAnomalies() const {
  return static_cast<std::size_t>(std::llround(anomaly_fraction * n_normal));
}

std::vector<std::vector<double>> ModeCenters(const SynthConfig& config) {
  config.Validate();
  const auto d = static_cast<std::size_t>(config.dims);
  const double m = config.mode_magnitude;
  switch (config.num_modes) {
    case 1:
      return {std::vector<double>(d, 0.0)};
    case 2:
      return {std::vector<double>(d, m), std::vector<double>(d, -m)};
    default:
      return {std::vector<double>(d, m), std::vector<double>(d, -m),
              std::vector<double>(d, 0.0)};
  }
}

Dataset GenerateMultimodal(const SynthConfig& config) {
  const auto centers = ModeCenters(config);
  const auto dims = static_cast<std::size_t>(config.dims);
  const auto n_normal = static_cast<std::size_t>(config.n_normal);
  const std::size_t n_anomalous = config.NumAnomalies();

  std::vector<double> values;
  values.reserve((n_normal + n_anomalous) * dims);
  Rng normal_rng(DeriveSeed(config.seed, 0));
  std::normal_distribution<double> gaussian(0.0, config.sigma);
  for (std::size_t mode = 0; mode < centers.size(); ++mode) {
    // The first n_normal % modes modes take one extra point.
    const std::size_t count =
        n_normal / centers.size() + (mode < n_normal % centers.size() ? 1 : 0);
    for (std::size_t i = 0; i < count; ++i) {
      for (std::size_t d = 0; d < dims; ++d) values.push_back(centers[mode][d] + gaussian(normal_rng));
    }
  }

  std::vector<double> lo(dims), hi(dims);
  for (std::size_t d = 0; d < dims; ++d) lo[d] = hi[d] = values[d];
  for (std::size_t i = 0; i < n_normal; ++i) {
    for (std::size_t d = 0; d < dims; ++d) {
      lo[d] = std::min(lo[d], values[i * dims + d]);
      hi[d] = std::max(hi[d], values[i * dims + d]);
    }
  }
  Rng anomaly_rng(DeriveSeed(config.seed, 1));
  for (std::size_t i = 0; i < n_anomalous; ++i) {
    for (std::size_t d = 0; d < dims; ++d) {
      values.push_back(std::uniform_real_distribution<double>(lo[d], hi[d])(anomaly_rng));
    }
  }

  std::vector<std::string> names;
  for (std::size_t d = 0; d < dims; ++d) names.push_back(DimName(d));
  std::vector<int> labels(n_normal, kNormalLabel);
  labels.resize(n_normal + n_anomalous, kAnomalousLabel);
  Dataset data(std::move(names), std::move(values), std::move(labels));
  if (config.noise_dim_fraction > 0.0) {
    return InjectNoiseDims(data, config.noise_dim_fraction, DeriveSeed(config.seed, 2));
  }
  return data;
}

std::vector<std::size_t> ChooseNoiseDims(std::size_t dims, double fraction, std::uint64_t seed) {
  Require(fraction >= 0.0 && fraction < 1.0, "noise fraction must lie in [0, 1)");
  const auto count = static_cast<std::size_t>(std::llround(fraction * static_cast<double>(dims)));
  std::vector<std::size_t> all(dims);
  std::iota(all.begin(), all.end(), 0);
  Rng rng(seed);
  std::shuffle(all.begin(), all.end(), rng);
  all.resize(count);
  std::sort(all.begin(), all.end());
  return all;
}

Dataset InjectNoiseDims(const Dataset& data, double fraction, std::uint64_t seed) {
  const auto replaced = ChooseNoiseDims(data.dims(), fraction, seed);
  if (replaced.empty() || data.empty()) return data;
  std::vector<double> values = data.values();
  const std::size_t dims = data.dims();
  Rng rng(DeriveSeed(seed, 1));
  for (const std::size_t d : replaced) {
    double lo = data.at(0, d), hi = lo;
    for (std::size_t i = 1; i < data.size(); ++i) {
      lo = std::min(lo, data.at(i, d));
      hi = std::max(hi, data.at(i, d));
    }
    std::uniform_real_distribution<double> uniform(lo, hi);
    for (std::size_t i = 0; i < data.size(); ++i) {
      values[i * dims + d] = lo < hi ? uniform(rng) : lo;
    }
  }
  return Dataset(data.dim_names(), std::move(values),
                 data.has_labels() ? std::optional(data.labels()) : std::nullopt);
}

}  // namespace nsad
