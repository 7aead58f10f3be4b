// Anomaly interpretation with Integrated Gradients against the nearest
// high-confidence normal point.
//
// The baseline set holds training positives the network scores at least
// 1 - epsilon. For a query x (normalized), the baseline u* is the member
// closest to x in Euclidean distance, and the blame of dimension d is
//
//   B_d = (u*_d - x_d) * integral_0^1 dF(x + a (u* - x)) / dx_d da,
//
// approximated with a k-step midpoint rule. By completeness, sum_d B_d should
// match F(u*) - F(x); the gap is reported as the completeness residual.

#ifndef NSAD_ATTRIBUTION_H_
#define NSAD_ATTRIBUTION_H_

#include <cstddef>
#include <functional>
#include <span>
#include <vector>

#include "nsad/dataset.h"
#include "nsad/neural_network.h"

namespace nsad {

inline constexpr double kDefaultEpsilon = 0.01;
inline constexpr int kDefaultIgSteps = 2000;

struct BaselineSet {
  // Normalized coordinates of the selected positives, in input order.
  Dataset points;
  std::vector<double> scores;
  // Row index of each member in the positive sample it was selected from.
  std::vector<std::size_t> source_indices;
  double epsilon = kDefaultEpsilon;
};

// Keeps the rows of `positive` whose score is >= 1 - epsilon. Throws
// PreconditionError if none qualify.
BaselineSet SelectBaselines(const Dataset& positive, std::span<const double> scores,
                            double epsilon);
BaselineSet SelectBaselines(const NnModel& model, const Dataset& positive, double epsilon);

struct NearestBaseline {
  std::size_t index = 0;
  std::vector<double> point;
  double distance = 0.0;
};

// Ties go to the lowest index.
NearestBaseline FindNearestBaseline(std::span<const double> x, const BaselineSet& baselines);

using GradientFunction = std::function<std::vector<double>(std::span<const double>)>;

// Midpoint-rule Integrated Gradients of any differentiable function given by
// its gradient.
std::vector<double> IntegratedGradients(const GradientFunction& gradient,
                                        std::span<const double> x,
                                        std::span<const double> baseline, int steps);
std::vector<double> IntegratedGradients(const NnModel& model, std::span<const double> x,
                                        std::span<const double> baseline, int steps);

struct AnomalyInterpretation {
  double score = 0.0;           // F(x)
  double baseline_score = 0.0;  // F(u*)
  std::vector<double> observed_raw;
  std::vector<double> observed_unit;
  std::vector<double> baseline_raw;  // expected values of the nearest normal
  std::vector<double> baseline_unit;
  std::size_t baseline_index = 0;
  std::vector<double> blames;
  double completeness_residual = 0.0;  // |sum(blames) - (F(u*) - F(x))|
  double distance = 0.0;               // in normalized units
  int steps = 0;

  double BlameSum() const;
  // Dimension indices sorted by descending |blame|, ties by index.
  std::vector<std::size_t> RankedDimensions() const;
};

// Normalizes `x_raw`, finds u*, runs IG and reports everything in both unit
// and raw coordinates.
AnomalyInterpretation Interpret(const NnModel& model, const BaselineSet& baselines,
                                std::span<const double> x_raw, int steps,
                                const Normalizer& normalizer);

}  // namespace nsad

#endif  // NSAD_ATTRIBUTION_H_
