#include "nsad/random_forest.h"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <random>

#include "gtest/gtest.h"
#include "nsad/common.h"
#include "rf_oracle.h"
#include "test_util.h"

namespace nsad {
namespace {

using ::nsad::testing::ExhaustiveBestWeightedImpurity;
using ::nsad::testing::Names;
using ::nsad::testing::TraverseForestOracle;

TrainingSet MakeSet(Dataset points) {
  const std::size_t positives = points.CountLabel(kNormalLabel);
  const std::size_t total = points.size();
  const std::size_t dims = points.dims();
  return TrainingSet{std::move(points), positives, total - positives, 1.0,
                     SamplingBounds(std::vector<double>(dims, 0.0), std::vector<double>(dims, 1.0), 0.0),
                     0};
}

TrainingSet RandomLabeled(std::size_t n, std::size_t dims, std::uint64_t seed, int value_levels = 0) {
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  std::vector<double> values(n * dims);
  std::vector<int> labels(n);
  for (std::size_t i = 0; i < n; ++i) {
    double sum = 0.0;
    for (std::size_t d = 0; d < dims; ++d) {
      double v = u(rng);
      // Coarse levels create repeated feature values (ties).
      if (value_levels > 0) v = std::floor(v * value_levels) / value_levels;
      values[i * dims + d] = v;
      sum += v;
    }
    labels[i] = (sum + 0.3 * u(rng)) > 0.5 * dims ? 1 : 0;
  }
  labels[0] = 0;
  labels[1] = 1;
  return MakeSet(Dataset(Names(dims), values, labels));
}

TEST(ImpurityTest, KnownValues) {
  const std::vector<int> half{0, 1, 0, 1};
  const std::vector<int> pure{1, 1, 1};
  const std::vector<int> quarter{1, 0, 0, 0};
  EXPECT_DOUBLE_EQ(Impurity(half, SplitCriterion::kGini), 0.5);
  EXPECT_DOUBLE_EQ(Impurity(half, SplitCriterion::kEntropy), 1.0);
  EXPECT_EQ(Impurity(pure, SplitCriterion::kGini), 0.0);
  EXPECT_EQ(Impurity(pure, SplitCriterion::kEntropy), 0.0);
  // 1 - 0.0625 - 0.5625
  EXPECT_DOUBLE_EQ(Impurity(quarter, SplitCriterion::kGini), 0.375);
  EXPECT_NEAR(Impurity(quarter, SplitCriterion::kEntropy),
              -0.25 * std::log2(0.25) - 0.75 * std::log2(0.75), 1e-15);
  EXPECT_THROW(Impurity(std::vector<int>{}, SplitCriterion::kGini), PreconditionError);
}

TEST(RfConfigTest, Validation) {
  RfConfig config;
  EXPECT_NO_THROW(config.Validate());
  EXPECT_EQ(config.FeaturesPerNode(16), 4);
  EXPECT_EQ(config.FeaturesPerNode(2), 1);
  config.min_samples_split = 1;
  EXPECT_THROW(config.Validate(), PreconditionError);
  config = RfConfig{};
  config.max_depth = 0;
  EXPECT_THROW(config.Validate(), PreconditionError);
  EXPECT_THROW(ParseCriterion("mse"), PreconditionError);
}

TEST(PredictRfTest, ConstantTreeAndMeanOverTrees) {
  const DecisionTree constant({TreeNode{-1, 0.0, -1, -1, 0.75, 4}});
  const RfModel one(RfConfig{}, 2, {constant});
  EXPECT_EQ(one.Predict(std::vector<double>{3.0, -1.0}), 0.75);
  const RfModel two(RfConfig{}, 1, {DecisionTree({TreeNode{-1, 0, -1, -1, 1.0, 1}}),
                                    DecisionTree({TreeNode{-1, 0, -1, -1, 0.0, 1}})});
  EXPECT_EQ(two.Predict(std::vector<double>{0.0}), 0.5);
  EXPECT_THROW(two.Predict(std::vector<double>{0.0, 1.0}), ShapeError);
}

TEST(PredictRfTest, RoutesLeftOnEquality) {
  const DecisionTree tree({TreeNode{0, 0.5, 1, 2, 0.5, 2}, TreeNode{-1, 0, -1, -1, 0.0, 1},
                           TreeNode{-1, 0, -1, -1, 1.0, 1}});
  EXPECT_EQ(tree.Predict(std::vector<double>{0.5}), 0.0);
  EXPECT_EQ(tree.Predict(std::vector<double>{0.5000001}), 1.0);
}

TEST(TrainRfTest, SeparableOneDimensionalData) {
  std::vector<double> values;
  std::vector<int> labels;
  for (int i = 0; i < 30; ++i) {
    values.push_back(-1.0 - 0.1 * i);
    labels.push_back(0);
    values.push_back(1.5 + 0.1 * i);
    labels.push_back(1);
  }
  const TrainingSet set = MakeSet(Dataset({"x"}, values, labels));
  RfConfig config;
  config.num_estimators = 10;
  config.max_depth = 3;
  config.seed = 2;
  const RfModel model = TrainRf(set, config);
  EXPECT_EQ(model.trees().size(), 10u);
  for (std::size_t i = 0; i < set.points.size(); ++i) {
    const int predicted = model.Predict(set.points.Row(i)) >= 0.5 ? 1 : 0;
    EXPECT_EQ(predicted, set.points.labels()[i]);
  }
}

TEST(TrainRfTest, PureDataBecomesSingleLeaf) {
  Dataset points(Names(2), {0.1, 0.2, 0.3, 0.4, 0.5, 0.6, 0.7, 0.8}, std::vector<int>{1, 1, 1, 1});
  DecisionTree tree = detail::GrowTree(points, {0, 1, 2, 3}, RfConfig{}, 1);
  ASSERT_EQ(tree.nodes().size(), 1u);
  EXPECT_TRUE(tree.nodes()[0].is_leaf());
  EXPECT_EQ(tree.nodes()[0].positive_fraction, 1.0);
}

TEST(TrainRfTest, SingleClassIsAPreconditionError) {
  const TrainingSet set = MakeSet(Dataset(Names(1), {0.1, 0.2}, std::vector<int>{0, 0}));
  EXPECT_THROW(TrainRf(set, RfConfig{}), PreconditionError);
}

TEST(TrainRfTest, StructuralInvariantsAndDepthBound) {
  const TrainingSet set = RandomLabeled(400, 5, 9);
  for (const auto criterion : {SplitCriterion::kGini, SplitCriterion::kEntropy}) {
    RfConfig config;
    config.num_estimators = 8;
    config.criterion = criterion;
    config.max_depth = 4;
    config.min_samples_leaf = 3;
    config.seed = 4;
    const RfModel model = TrainRf(set, config);
    for (const auto& tree : model.trees()) {
      EXPECT_LE(tree.Depth(), 4);
      for (const auto& node : tree.nodes()) {
        EXPECT_GE(node.positive_fraction, 0.0);
        EXPECT_LE(node.positive_fraction, 1.0);
        if (node.is_leaf()) {
          EXPECT_GE(node.sample_count, 3);
        } else {
          const auto& left = tree.nodes()[node.left];
          const auto& right = tree.nodes()[node.right];
          EXPECT_EQ(left.sample_count + right.sample_count, node.sample_count);
          // Weighted child impurity strictly below the parent's.
          const auto impurity = [&](const TreeNode& n) {
            const auto pos = static_cast<std::size_t>(std::llround(n.positive_fraction * n.sample_count));
            return Impurity(pos, n.sample_count, criterion);
          };
          const double weighted = (left.sample_count * impurity(left) +
                                   right.sample_count * impurity(right)) / node.sample_count;
          EXPECT_LT(weighted, impurity(node));
        }
      }
    }
  }
}

TEST(TrainRfTest, DeterministicPerSeed) {
  const TrainingSet set = RandomLabeled(300, 4, 12);
  RfConfig config;
  config.num_estimators = 5;
  config.seed = 77;
  const RfModel a = TrainRf(set, config);
  const RfModel b = TrainRf(set, config);
  std::mt19937_64 rng(1);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  for (int i = 0; i < 100; ++i) {
    const std::vector<double> x{u(rng), u(rng), u(rng), u(rng)};
    EXPECT_EQ(a.Predict(x), b.Predict(x));
  }
}

TEST(TrainRfTest, PredictEqualsIndependentTraversalMean) {
  const TrainingSet set = RandomLabeled(500, 6, 21);
  RfConfig config;
  config.num_estimators = 25;
  config.seed = 8;
  const RfModel model = TrainRf(set, config);
  std::mt19937_64 rng(5);
  std::uniform_real_distribution<double> u(-0.1, 1.1);
  for (int i = 0; i < 1000; ++i) {
    std::vector<double> x(6);
    for (auto& v : x) v = u(rng);
    EXPECT_EQ(model.Predict(x), TraverseForestOracle(model, x));
  }
}

TEST(FindBestSplitTest, MatchesExhaustiveOptimumOnSmallNodes) {
  for (std::uint64_t seed = 0; seed < 200; ++seed) {
    const std::size_t n = 2 + seed % 19;
    const std::size_t dims = 1 + seed % 4;
    const TrainingSet set = RandomLabeled(n, dims, 1000 + seed, seed % 3 == 0 ? 4 : 0);
    std::vector<std::size_t> samples(n);
    std::iota(samples.begin(), samples.end(), 0);
    std::vector<int> features(dims);
    std::iota(features.begin(), features.end(), 0);
    const auto criterion = seed % 2 ? SplitCriterion::kGini : SplitCriterion::kEntropy;
    const int min_leaf = 1 + static_cast<int>(seed % 3);
    const auto split = detail::FindBestSplit(set.points, samples, features, criterion, min_leaf);
    const double oracle = ExhaustiveBestWeightedImpurity(set.points, samples, criterion, min_leaf);
    if (std::isinf(oracle)) {
      EXPECT_FALSE(split.has_value()) << "seed " << seed;
    } else {
      ASSERT_TRUE(split.has_value()) << "seed " << seed;
      EXPECT_NEAR(split->weighted_impurity, oracle, 1e-12) << "seed " << seed;
    }
  }
}

// Every node of fully grown trees (no bootstrap, all features) on tiny data
// splits at the exhaustive optimum.
TEST(FindBestSplitTest, GrownTreesUseOptimalSplits) {
  for (std::uint64_t seed = 0; seed < 30; ++seed) {
    const TrainingSet set = RandomLabeled(20, 3, 500 + seed);
    RfConfig config;
    config.num_estimators = 1;
    config.bootstrap = false;
    config.max_features = 3;
    config.seed = seed;
    const RfModel model = TrainRf(set, config);
    const auto& nodes = model.trees()[0].nodes();
    // Recover each node's samples by routing the training rows.
    std::vector<std::vector<std::size_t>> at(nodes.size());
    for (std::size_t i = 0; i < set.points.size(); ++i) {
      int index = 0;
      while (true) {
        at[index].push_back(i);
        if (nodes[index].is_leaf()) break;
        index = set.points.at(i, nodes[index].feature) <= nodes[index].threshold ? nodes[index].left
                                                                                : nodes[index].right;
      }
    }
    for (std::size_t k = 0; k < nodes.size(); ++k) {
      if (nodes[k].is_leaf()) continue;
      const auto& left = at[nodes[k].left];
      const auto& right = at[nodes[k].right];
      std::vector<int> l, r;
      for (const std::size_t i : left) l.push_back(set.points.labels()[i]);
      for (const std::size_t i : right) r.push_back(set.points.labels()[i]);
      const double n = static_cast<double>(at[k].size());
      const double chosen = (l.size() * Impurity(l, config.criterion) +
                             r.size() * Impurity(r, config.criterion)) / n;
      EXPECT_NEAR(chosen, ExhaustiveBestWeightedImpurity(set.points, at[k], config.criterion, 1), 1e-12);
    }
  }
}

TEST(FindBestSplitTest, TiesPreferLowestFeatureThenThreshold) {
  // Features 0 and 1 are identical; the split on feature 0 must win.
  const Dataset points(Names(2), {0, 0, 1, 1, 2, 2, 3, 3}, std::vector<int>{0, 0, 1, 1});
  const std::vector<std::size_t> samples{0, 1, 2, 3};
  const std::vector<int> features{1, 0};
  const auto split = detail::FindBestSplit(points, samples, features, SplitCriterion::kGini, 1);
  ASSERT_TRUE(split);
  EXPECT_EQ(split->feature, 0);
  EXPECT_EQ(split->threshold, 1.5);
  EXPECT_EQ(split->weighted_impurity, 0.0);
}

}  // namespace
}  // namespace nsad
