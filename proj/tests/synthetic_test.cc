#include "nsad/synthetic.h"

#include <cmath>
#include <set>

#include "gtest/gtest.h"
#include "nsad/common.h"

namespace nsad {
namespace {

TEST(SynthConfigTest, Validation) {
  SynthConfig config;
  EXPECT_NO_THROW(config.Validate());
  EXPECT_EQ(config.NumAnomalies(), 125u);
  config.num_modes = 4;
  EXPECT_THROW(config.Validate(), PreconditionError);
  config = SynthConfig{};
  config.anomaly_fraction = -0.1;
  EXPECT_THROW(config.Validate(), PreconditionError);
}

TEST(GenerateMultimodalTest, CountsLabelsAndNames) {
  const Dataset data = GenerateMultimodal(SynthConfig{});
  EXPECT_EQ(data.size(), 2625u);
  EXPECT_EQ(data.dims(), 16u);
  EXPECT_EQ(data.CountLabel(kNormalLabel), 2500u);
  EXPECT_EQ(data.CountLabel(kAnomalousLabel), 125u);
  EXPECT_EQ(data.dim_names()[0], "x000");
  EXPECT_EQ(data.dim_names()[15], "x015");
  for (std::size_t i = 0; i < 2500; ++i) ASSERT_EQ(data.labels()[i], kNormalLabel);
}

TEST(GenerateMultimodalTest, ModeMeansAndSpread) {
  SynthConfig config;
  config.anomaly_fraction = 0.0;
  config.seed = 3;
  const Dataset data = GenerateMultimodal(config);
  // Normals are generated mode by mode: first half at +m, second at -m.
  for (const auto& [begin, center] : {std::pair<std::size_t, double>{0, 2.4}, {1250, -2.4}}) {
    for (std::size_t d = 0; d < 16; ++d) {
      double mean = 0.0, sq = 0.0;
      for (std::size_t i = begin; i < begin + 1250; ++i) mean += data.at(i, d) / 1250.0;
      for (std::size_t i = begin; i < begin + 1250; ++i) sq += std::pow(data.at(i, d) - mean, 2) / 1250.0;
      // Standard error of the mean is sqrt(0.5 / 1250) = 0.02.
      EXPECT_NEAR(mean, center, 0.1);
      EXPECT_NEAR(sq, 0.5, 0.06);
    }
  }
}

TEST(GenerateMultimodalTest, SingleModeAtOrigin) {
  SynthConfig config;
  config.num_modes = 1;
  config.dims = 4;
  EXPECT_EQ(ModeCenters(config), (std::vector<std::vector<double>>{{0, 0, 0, 0}}));
  const Dataset data = GenerateMultimodal(config);
  for (std::size_t d = 0; d < 4; ++d) {
    double mean = 0.0;
    for (std::size_t i = 0; i < 2500; ++i) mean += data.at(i, d) / 2500.0;
    EXPECT_NEAR(mean, 0.0, 0.07);
  }
}

TEST(GenerateMultimodalTest, ThreeModesAreSeparated) {
  SynthConfig config;
  config.num_modes = 3;
  config.n_normal = 3000;
  config.anomaly_fraction = 0.0;
  const auto centers = ModeCenters(config);
  ASSERT_EQ(centers.size(), 3u);
  const Dataset data = GenerateMultimodal(config);
  for (std::size_t i = 0; i < data.size(); ++i) {
    std::size_t nearest = 0;
    double best = 1e300;
    for (std::size_t c = 0; c < 3; ++c) {
      double d2 = 0.0;
      for (std::size_t d = 0; d < 16; ++d) d2 += std::pow(data.at(i, d) - centers[c][d], 2);
      if (d2 < best) {
        best = d2;
        nearest = c;
      }
    }
    ASSERT_EQ(nearest, i / 1000) << "row " << i;
  }
}

TEST(GenerateMultimodalTest, AnomaliesLieInNormalBoundingBox) {
  const Dataset data = GenerateMultimodal(SynthConfig{});
  for (std::size_t d = 0; d < 16; ++d) {
    double lo = 1e300, hi = -1e300;
    for (std::size_t i = 0; i < 2500; ++i) {
      lo = std::min(lo, data.at(i, d));
      hi = std::max(hi, data.at(i, d));
    }
    for (std::size_t i = 2500; i < data.size(); ++i) {
      EXPECT_GE(data.at(i, d), lo);
      EXPECT_LE(data.at(i, d), hi);
    }
  }
}

TEST(GenerateMultimodalTest, DeterministicPerSeed) {
  SynthConfig config;
  config.seed = 9;
  EXPECT_EQ(GenerateMultimodal(config).values(), GenerateMultimodal(config).values());
  SynthConfig other = config;
  other.seed = 10;
  EXPECT_NE(GenerateMultimodal(config).values(), GenerateMultimodal(other).values());
}

TEST(NoiseDimsTest, ChoosesRoundedFraction) {
  const auto dims = ChooseNoiseDims(16, 0.25, 1);
  EXPECT_EQ(dims.size(), 4u);
  EXPECT_TRUE(std::is_sorted(dims.begin(), dims.end()));
  EXPECT_EQ(std::set<std::size_t>(dims.begin(), dims.end()).size(), 4u);
  EXPECT_TRUE(ChooseNoiseDims(16, 0.0, 1).empty());
}

TEST(NoiseDimsTest, ZeroFractionIsIdentity) {
  const Dataset data = GenerateMultimodal(SynthConfig{});
  const Dataset same = InjectNoiseDims(data, 0.0, 5);
  EXPECT_EQ(same.values(), data.values());
  EXPECT_EQ(same.labels(), data.labels());
}

// Replaced dimensions carry no label information: the point-biserial
// correlation with the label is near zero, and untouched dimensions survive.
TEST(NoiseDimsTest, ReplacedDimensionsAreUninformative) {
  const Dataset data = GenerateMultimodal(SynthConfig{});
  const Dataset noisy = InjectNoiseDims(data, 0.25, 5);
  const auto chosen = ChooseNoiseDims(16, 0.25, 5);
  const std::set<std::size_t> chosen_set(chosen.begin(), chosen.end());
  EXPECT_EQ(noisy.labels(), data.labels());
  for (std::size_t d = 0; d < 16; ++d) {
    if (!chosen_set.contains(d)) {
      for (std::size_t i = 0; i < data.size(); ++i) ASSERT_EQ(noisy.at(i, d), data.at(i, d));
      continue;
    }
    const double n = static_cast<double>(noisy.size());
    double mx = 0, my = 0;
    for (std::size_t i = 0; i < noisy.size(); ++i) {
      mx += noisy.at(i, d) / n;
      my += noisy.labels()[i] / n;
    }
    double sxy = 0, sxx = 0, syy = 0;
    for (std::size_t i = 0; i < noisy.size(); ++i) {
      const double dx = noisy.at(i, d) - mx, dy = noisy.labels()[i] - my;
      sxy += dx * dy;
      sxx += dx * dx;
      syy += dy * dy;
    }
    EXPECT_LT(std::abs(sxy / std::sqrt(sxx * syy)), 0.05) << "dim " << d;
    double lo = 1e300, hi = -1e300;
    for (std::size_t i = 0; i < data.size(); ++i) {
      lo = std::min(lo, data.at(i, d));
      hi = std::max(hi, data.at(i, d));
    }
    for (std::size_t i = 0; i < noisy.size(); ++i) {
      EXPECT_GE(noisy.at(i, d), lo);
      EXPECT_LE(noisy.at(i, d), hi);
    }
  }
}

}  // namespace
}  // namespace nsad
