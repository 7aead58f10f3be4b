#include "nsad/negative_sampling.h"

#include <algorithm>
#include <cmath>
#include <random>

#include "nsad/common.h"

namespace nsad {

SamplingBounds::SamplingBounds(std::vector<double> positive_min,
                               std::vector<double> positive_max, double delta,
                               std::vector<std::string> dim_names)
    : positive_min_(std::move(positive_min)),
      positive_max_(std::move(positive_max)),
      delta_(delta),
      dim_names_(std::move(dim_names)) {
  Require(!positive_min_.empty() && positive_min_.size() == positive_max_.size(),
          "sampling bounds need paired, non-empty extrema");
  Require(std::isfinite(delta_) && delta_ >= 0.0, "delta must be a finite value >= 0");
  for (std::size_t d = 0; d < dims(); ++d) {
    Require(positive_min_[d] <= positive_max_[d], "sampling bounds need min <= max");
  }
  if (dim_names_.empty()) {
    for (std::size_t d = 0; d < dims(); ++d) dim_names_.push_back("x" + std::to_string(d));
  }
  Require(dim_names_.size() == dims(), "sampling bounds dimension names mismatch");
}

bool SamplingBounds::Contains(std::span<const double> point) const {
  if (point.size() != dims()) return false;
  for (std::size_t d = 0; d < dims(); ++d) {
    if (point[d] < lower(d) || point[d] > upper(d)) return false;
  }
  return true;
}

SamplingBounds ComputeBounds(const Dataset& positive, double delta) {
  Require(!positive.empty(), "cannot compute sampling bounds of an empty dataset");
  std::vector<double> mins(positive.dims()), maxs(positive.dims());
  for (std::size_t d = 0; d < positive.dims(); ++d) mins[d] = maxs[d] = positive.at(0, d);
  for (std::size_t i = 1; i < positive.size(); ++i) {
    for (std::size_t d = 0; d < positive.dims(); ++d) {
      mins[d] = std::min(mins[d], positive.at(i, d));
      maxs[d] = std::max(maxs[d], positive.at(i, d));
    }
  }
  return SamplingBounds(std::move(mins), std::move(maxs), delta, positive.dim_names());
}

Dataset SampleNegative(const SamplingBounds& bounds, std::size_t n, std::uint64_t seed) {
  Require(n >= 1, "negative sample size must be at least 1");
  Rng rng(seed);
  std::vector<std::uniform_real_distribution<double>> uniform;
  uniform.reserve(bounds.dims());
  for (std::size_t d = 0; d < bounds.dims(); ++d) {
    uniform.emplace_back(bounds.lower(d), bounds.upper(d));
  }
  std::vector<double> values(n * bounds.dims());
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t d = 0; d < bounds.dims(); ++d) {
      // A zero-width box has lower == upper; uniform_real_distribution needs a < b.
      values[i * bounds.dims() + d] =
          bounds.lower(d) < bounds.upper(d) ? uniform[d](rng) : bounds.lower(d);
    }
  }
  return Dataset(bounds.dim_names(), std::move(values));
}

TrainingSet BuildTrainingSet(const Dataset& positive, double sample_ratio, double delta,
                             std::uint64_t seed) {
  Require(std::isfinite(sample_ratio) && sample_ratio > 0.0, "sample ratio must be > 0");
  SamplingBounds bounds = ComputeBounds(positive, delta);
  const std::size_t m = positive.size();
  const auto n = static_cast<std::size_t>(std::llround(sample_ratio * static_cast<double>(m)));
  const Dataset negative = SampleNegative(bounds, n, seed);

  std::vector<double> values = positive.values();
  values.insert(values.end(), negative.values().begin(), negative.values().end());
  std::vector<int> labels(m, kNormalLabel);
  labels.resize(m + n, kAnomalousLabel);
  return TrainingSet{
      .points = Dataset(positive.dim_names(), std::move(values), std::move(labels)),
      .num_positive = m,
      .num_negative = n,
      .sample_ratio = sample_ratio,
      .bounds = std::move(bounds),
      .seed = seed,
  };
}

double FalseNegativeBound(const SamplingBounds& bounds) {
  double bound = 1.0;
  for (std::size_t d = 0; d < bounds.dims(); ++d) {
    Require(bounds.outer_length(d) > 0.0,
            "false-negative bound undefined: zero-length sampling interval on dimension " +
                std::to_string(d));
    bound *= bounds.inner_length(d) / bounds.outer_length(d);
  }
  return bound;
}

}  // namespace nsad
