#include "nsad/negative_sampling.h"

#include <cmath>
#include <numeric>

#include "gtest/gtest.h"
#include "nsad/common.h"
#include "test_util.h"

namespace nsad {
namespace {

using ::nsad::testing::Names;

SamplingBounds UnitCube(std::size_t dims, double delta) {
  return SamplingBounds(std::vector<double>(dims, 0.0), std::vector<double>(dims, 1.0), delta);
}

TEST(ComputeBoundsTest, ExpandsExtremaByDelta) {
  const SamplingBounds bounds = ComputeBounds(Dataset({"a"}, {0.2, 0.8}), 0.05);
  EXPECT_DOUBLE_EQ(bounds.lower(0), 0.15);
  EXPECT_DOUBLE_EQ(bounds.upper(0), 0.85);
}

TEST(ComputeBoundsTest, NormalizedSampleSpanningUnitCube) {
  const SamplingBounds bounds = ComputeBounds(Dataset({"a", "b"}, {0, 1, 1, 0, 0.5, 0.5}), 0.05);
  for (std::size_t d = 0; d < 2; ++d) {
    EXPECT_DOUBLE_EQ(bounds.lower(d), -0.05);
    EXPECT_DOUBLE_EQ(bounds.upper(d), 1.05);
    EXPECT_EQ(bounds.outer_length(d), bounds.inner_length(d) + 2 * bounds.delta());
  }
}

TEST(ComputeBoundsTest, ZeroDeltaGivesExactExtrema) {
  const SamplingBounds bounds = ComputeBounds(Dataset({"a"}, {0.3, 0.7, 0.4}), 0.0);
  EXPECT_EQ(bounds.lower(0), 0.3);
  EXPECT_EQ(bounds.upper(0), 0.7);
}

TEST(ComputeBoundsTest, Errors) {
  EXPECT_THROW(ComputeBounds(Dataset({"a"}, {}), 0.05), PreconditionError);
  EXPECT_THROW(ComputeBounds(Dataset({"a"}, {1.0}), -0.1), PreconditionError);
}

TEST(SampleNegativeTest, UniformMomentsAndContainment) {
  const SamplingBounds bounds = UnitCube(3, 0.0);
  const Dataset v = SampleNegative(bounds, 1000, 42);
  ASSERT_EQ(v.size(), 1000u);
  std::vector<double> mean(3, 0.0);
  for (std::size_t i = 0; i < v.size(); ++i) {
    EXPECT_TRUE(bounds.Contains(v.Row(i)));
    for (std::size_t d = 0; d < 3; ++d) mean[d] += v.at(i, d) / 1000.0;
  }
  // Standard error of a U(0,1) mean at n=1000 is ~0.009.
  for (const double m : mean) EXPECT_NEAR(m, 0.5, 0.05);
}

TEST(SampleNegativeTest, DeterministicPerSeed) {
  const SamplingBounds bounds = UnitCube(4, 0.05);
  EXPECT_EQ(SampleNegative(bounds, 50, 9).values(), SampleNegative(bounds, 50, 9).values());
  EXPECT_NE(SampleNegative(bounds, 50, 9).values(), SampleNegative(bounds, 50, 10).values());
}

TEST(SampleNegativeTest, ZeroCountIsAnError) {
  EXPECT_THROW(SampleNegative(UnitCube(2, 0.05), 0, 1), PreconditionError);
}

TEST(BuildTrainingSetTest, SizesFollowSampleRatio) {
  const auto positive = [](std::size_t m) { return testing::UniformDataset(m, 2, 0, 1, m); };
  const TrainingSet a = BuildTrainingSet(positive(2500), 2.0, 0.05, 1);
  EXPECT_EQ(a.num_negative, 5000u);
  EXPECT_EQ(a.points.size(), 7500u);
  EXPECT_EQ(BuildTrainingSet(positive(100), 30.0, 0.05, 1).num_negative, 3000u);
  EXPECT_EQ(BuildTrainingSet(positive(10), 0.1, 0.05, 1).num_negative, 1u);
  EXPECT_THROW(BuildTrainingSet(positive(10), 0.0, 0.05, 1), PreconditionError);
}

TEST(BuildTrainingSetTest, LabelsAndContainment) {
  // Carried labels are ignored: every positive becomes label 1.
  const Dataset raw = testing::UniformDataset(200, 3, 0.1, 0.9, 4);
  const Dataset positive = raw.WithLabels(std::vector<int>(200, 0));
  const TrainingSet set = BuildTrainingSet(positive, 3.0, 0.05, 8);
  ASSERT_EQ(set.num_positive, 200u);
  ASSERT_EQ(set.num_negative, 600u);
  const auto& labels = set.points.labels();
  for (std::size_t i = 0; i < labels.size(); ++i) {
    EXPECT_EQ(labels[i], i < 200 ? kNormalLabel : kAnomalousLabel);
    if (i >= 200) EXPECT_TRUE(set.bounds.Contains(set.points.Row(i)));
  }
  const TrainingSet again = BuildTrainingSet(positive, 3.0, 0.05, 8);
  EXPECT_EQ(again.points.values(), set.points.values());
}

TEST(FalseNegativeBoundTest, ProductOfLengthRatios) {
  // (1 / 1.1)^10 and (1 / 1.1)^100 evaluated directly.
  EXPECT_NEAR(FalseNegativeBound(UnitCube(10, 0.05)), std::pow(1.0 / 1.1, 10), 1e-15);
  EXPECT_NEAR(FalseNegativeBound(UnitCube(10, 0.05)), 0.38554, 5e-6);
  EXPECT_NEAR(FalseNegativeBound(UnitCube(100, 0.05)), 7.2565e-5, 1e-8);
  EXPECT_EQ(FalseNegativeBound(UnitCube(10, 0.0)), 1.0);
}

TEST(FalseNegativeBoundTest, ZeroLengthIntervalIsAnError) {
  EXPECT_THROW(FalseNegativeBound(SamplingBounds({0.5}, {0.5}, 0.0)), PreconditionError);
}

TEST(FalseNegativeBoundTest, DecaysMonotonicallyWithDimension) {
  double previous = 1.0;
  for (std::size_t dims = 1; dims <= 64; ++dims) {
    const double bound = FalseNegativeBound(UnitCube(dims, 0.05));
    EXPECT_LT(bound, previous);
    previous = bound;
  }
}

// Empirical in-cube fraction of uniform negatives matches the bound within 3
// binomial standard deviations.
TEST(FalseNegativeBoundTest, MatchesEmpiricalFractionForCubeRegion) {
  for (const std::size_t dims : {2u, 4u, 10u}) {
    const SamplingBounds bounds = UnitCube(dims, 0.05);
    const std::size_t n = 10000;
    const Dataset v = SampleNegative(bounds, n, 100 + dims);
    std::size_t inside = 0;
    for (std::size_t i = 0; i < n; ++i) {
      bool in = true;
      for (std::size_t d = 0; d < dims; ++d) in = in && v.at(i, d) >= 0.0 && v.at(i, d) <= 1.0;
      inside += in;
    }
    const double p = FalseNegativeBound(bounds);
    const double sigma = std::sqrt(p * (1 - p) / n);
    EXPECT_NEAR(static_cast<double>(inside) / n, p, 3 * sigma) << "dims " << dims;
  }
}

}  // namespace
}  // namespace nsad
