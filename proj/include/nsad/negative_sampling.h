// Uniform negative sampling over the delta-expanded bounding box of the
// positive sample, and assembly of the two-class training set.

#ifndef NSAD_NEGATIVE_SAMPLING_H_
#define NSAD_NEGATIVE_SAMPLING_H_

#include <cstddef>
#include <cstdint>
#include <string>
#include <vector>

#include "nsad/dataset.h"

namespace nsad {

inline constexpr double kDefaultDelta = 0.05;

// Sampling box lim_d = [min(U_d) - delta, max(U_d) + delta], in normalized
// units. The positive extrema are kept so that the box lengths satisfy
// outer_length(d) == inner_length(d) + 2 * delta exactly.
class SamplingBounds {
 public:
  SamplingBounds(std::vector<double> positive_min, std::vector<double> positive_max,
                 double delta, std::vector<std::string> dim_names = {});

  std::size_t dims() const { return positive_min_.size(); }
  double delta() const { return delta_; }
  double lower(std::size_t d) const { return positive_min_[d] - delta_; }
  double upper(std::size_t d) const { return positive_max_[d] + delta_; }
  // Delta-u: extent of the positive sample along d.
  double inner_length(std::size_t d) const { return positive_max_[d] - positive_min_[d]; }
  // Delta-v: extent of the sampling box along d.
  double outer_length(std::size_t d) const { return inner_length(d) + 2.0 * delta_; }
  bool Contains(std::span<const double> point) const;

  const std::vector<double>& positive_min() const { return positive_min_; }
  const std::vector<double>& positive_max() const { return positive_max_; }
  const std::vector<std::string>& dim_names() const { return dim_names_; }

 private:
  std::vector<double> positive_min_;
  std::vector<double> positive_max_;
  double delta_;
  std::vector<std::string> dim_names_;
};

// Positive points (label 1) followed by uniform negatives (label 0).
struct TrainingSet {
  Dataset points;
  std::size_t num_positive = 0;
  std::size_t num_negative = 0;
  double sample_ratio = 0.0;
  SamplingBounds bounds;
  std::uint64_t seed = 0;
};

SamplingBounds ComputeBounds(const Dataset& positive, double delta);

// `n` points drawn i.i.d. uniformly from the sampling box; deterministic given
// `seed`.
Dataset SampleNegative(const SamplingBounds& bounds, std::size_t n, std::uint64_t seed);

// Labels the whole (already normalized) positive sample 1 and appends
// round(sample_ratio * M) uniform negatives labeled 0. Any labels carried by
// `positive` are ignored.
TrainingSet BuildTrainingSet(const Dataset& positive, double sample_ratio, double delta,
                             std::uint64_t seed);

// Upper bound on the probability that a uniform negative lands in the normal
// region: prod_d inner_length(d) / outer_length(d).
double FalseNegativeBound(const SamplingBounds& bounds);

}  // namespace nsad

#endif  // NSAD_NEGATIVE_SAMPLING_H_
