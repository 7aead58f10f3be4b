#include "nsad/attribution.h"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <string>

#include "nsad/common.h"

namespace nsad {
namespace {

void CheckSameSize(std::span<const double> a, std::span<const double> b) {
  if (a.size() != b.size()) {
    throw ShapeError("point has " + std::to_string(a.size()) + " dimensions, expected " +
                     std::to_string(b.size()));
  }
}

}  // namespace

BaselineSet SelectBaselines(const Dataset& positive, std::span<const double> scores,
                            double epsilon) {
  Require(epsilon > 0.0 && epsilon < 1.0, "epsilon must lie in (0, 1)");
  Require(scores.size() == positive.size(), "one score per positive point is required");
  std::vector<std::size_t> keep;
  std::vector<double> kept_scores;
  for (std::size_t i = 0; i < scores.size(); ++i) {
    if (scores[i] >= 1.0 - epsilon) {
      keep.push_back(i);
      kept_scores.push_back(scores[i]);
    }
  }
  if (keep.empty()) {
    throw PreconditionError(
        "no positive point scores >= 1 - epsilon (epsilon = " + FormatDouble(epsilon) +
        "); increase epsilon so the baseline set covers the high-confidence normal regions");
  }
  return BaselineSet{positive.Subset(keep).WithoutLabels(), std::move(kept_scores),
                     std::move(keep), epsilon};
}

BaselineSet SelectBaselines(const NnModel& model, const Dataset& positive, double epsilon) {
  std::vector<double> scores(positive.size());
  for (std::size_t i = 0; i < positive.size(); ++i) scores[i] = model.Predict(positive.Row(i));
  return SelectBaselines(positive, scores, epsilon);
}

NearestBaseline FindNearestBaseline(std::span<const double> x, const BaselineSet& baselines) {
  const Dataset& points = baselines.points;
  Require(!points.empty(), "baseline set is empty");
  if (x.size() != points.dims()) {
    throw ShapeError("point has " + std::to_string(x.size()) + " dimensions, baselines have " +
                     std::to_string(points.dims()));
  }
  std::size_t best = 0;
  double best_squared = std::numeric_limits<double>::infinity();
  for (std::size_t i = 0; i < points.size(); ++i) {
    double squared = 0.0;
    for (std::size_t d = 0; d < x.size(); ++d) {
      const double diff = points.at(i, d) - x[d];
      squared += diff * diff;
    }
    if (squared < best_squared) {
      best_squared = squared;
      best = i;
    }
  }
  const auto row = points.Row(best);
  return {best, std::vector<double>(row.begin(), row.end()), std::sqrt(best_squared)};
}

std::vector<double> IntegratedGradients(const GradientFunction& gradient,
                                        std::span<const double> x,
                                        std::span<const double> baseline, int steps) {
  Require(steps >= 1, "integrated gradients needs at least one step");
  CheckSameSize(x, baseline);
  const std::size_t dims = x.size();
  std::vector<double> accumulated(dims, 0.0);
  std::vector<double> point(dims);
  for (int j = 1; j <= steps; ++j) {
    const double alpha = (static_cast<double>(j) - 0.5) / static_cast<double>(steps);
    for (std::size_t d = 0; d < dims; ++d) point[d] = x[d] + alpha * (baseline[d] - x[d]);
    const std::vector<double> g = gradient(point);
    if (g.size() != dims) throw ShapeError("gradient dimensionality mismatch");
    for (std::size_t d = 0; d < dims; ++d) accumulated[d] += g[d];
  }
  std::vector<double> blames(dims);
  for (std::size_t d = 0; d < dims; ++d) {
    blames[d] = (baseline[d] - x[d]) * accumulated[d] / static_cast<double>(steps);
  }
  return blames;
}

std::vector<double> IntegratedGradients(const NnModel& model, std::span<const double> x,
                                        std::span<const double> baseline, int steps) {
  if (x.size() != model.input_dims()) {
    throw ShapeError("point has " + std::to_string(x.size()) + " dimensions, network expects " +
                     std::to_string(model.input_dims()));
  }
  return IntegratedGradients(
      [&model](std::span<const double> p) { return model.InputGradient(p); }, x, baseline,
      steps);
}

double AnomalyInterpretation::BlameSum() const {
  return std::accumulate(blames.begin(), blames.end(), 0.0);
}

std::vector<std::size_t> AnomalyInterpretation::RankedDimensions() const {
  std::vector<std::size_t> order(blames.size());
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(), [this](std::size_t a, std::size_t b) {
    return std::abs(blames[a]) > std::abs(blames[b]);
  });
  return order;
}

AnomalyInterpretation Interpret(const NnModel& model, const BaselineSet& baselines,
                                std::span<const double> x_raw, int steps,
                                const Normalizer& normalizer) {
  Require(steps >= 1, "integrated gradients needs at least one step");
  AnomalyInterpretation out;
  out.observed_raw.assign(x_raw.begin(), x_raw.end());
  out.observed_unit = normalizer.NormalizePoint(x_raw);
  NearestBaseline nearest = FindNearestBaseline(out.observed_unit, baselines);
  out.baseline_index = nearest.index;
  out.distance = nearest.distance;
  out.baseline_unit = std::move(nearest.point);
  out.baseline_raw = normalizer.DenormalizePoint(out.baseline_unit);
  out.score = model.Predict(out.observed_unit);
  out.baseline_score = model.Predict(out.baseline_unit);
  out.blames = IntegratedGradients(model, out.observed_unit, out.baseline_unit, steps);
  out.steps = steps;
  out.completeness_residual = std::abs(out.BlameSum() - (out.baseline_score - out.score));
  return out;
}

}  // namespace nsad
