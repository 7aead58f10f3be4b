#include "nsad/random_forest.h"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <exception>
#include <mutex>
#include <numeric>
#include <random>
#include <thread>
#include <utility>

#include "nsad/common.h"

namespace nsad {
namespace {

// Splits whose impurity decrease is below this are treated as no improvement.
constexpr double kMinImpurityDecrease = 1e-12;

double Plogp(double p) { return p > 0.0 ? p * std::log2(p) : 0.0; }

struct PendingNode {
  int index;
  std::vector<std::size_t> samples;
  int depth;
};

}  // namespace

std::string CriterionName(SplitCriterion criterion) {
  return criterion == SplitCriterion::kGini ? "gini" : "entropy";
}

SplitCriterion ParseCriterion(const std::string& name) {
  if (name == "gini") return SplitCriterion::kGini;
  if (name == "entropy") return SplitCriterion::kEntropy;
  throw PreconditionError("unknown split criterion '" + name + "' (expected gini or entropy)");
}

void RfConfig::Validate() const {
  Require(num_estimators >= 1, "num_estimators must be >= 1");
  Require(!max_depth || *max_depth >= 1, "max_depth must be >= 1");
  Require(min_samples_split >= 2, "min_samples_split must be >= 2");
  Require(min_samples_leaf >= 1, "min_samples_leaf must be >= 1");
  Require(!max_features || *max_features >= 1, "max_features must be >= 1");
}

int RfConfig::FeaturesPerNode(std::size_t dims) const {
  const int d = static_cast<int>(dims);
  if (max_features) return std::min(*max_features, d);
  return std::max(1, static_cast<int>(std::floor(std::sqrt(static_cast<double>(d)))));
}

double Impurity(std::size_t positives, std::size_t total, SplitCriterion criterion) {
  Require(total > 0, "impurity of an empty node is undefined");
  const double p = static_cast<double>(positives) / static_cast<double>(total);
  if (criterion == SplitCriterion::kGini) return 1.0 - p * p - (1.0 - p) * (1.0 - p);
  return -Plogp(p) - Plogp(1.0 - p);
}

double Impurity(std::span<const int> labels, SplitCriterion criterion) {
  const auto positives = static_cast<std::size_t>(
      std::count(labels.begin(), labels.end(), kNormalLabel));
  return Impurity(positives, labels.size(), criterion);
}

DecisionTree::DecisionTree(std::vector<TreeNode> nodes) : nodes_(std::move(nodes)) {
  Require(!nodes_.empty(), "a tree needs at least one node");
  const int count = static_cast<int>(nodes_.size());
  for (const auto& node : nodes_) {
    Require(node.positive_fraction >= 0.0 && node.positive_fraction <= 1.0,
            "leaf fractions must lie in [0, 1]");
    if (!node.is_leaf()) {
      Require(node.left > 0 && node.left < count && node.right > 0 && node.right < count,
              "tree child index out of range");
    }
  }
}

const TreeNode& DecisionTree::Leaf(std::span<const double> x) const {
  const TreeNode* node = &nodes_[0];
  while (!node->is_leaf()) {
    node = &nodes_[x[node->feature] <= node->threshold ? node->left : node->right];
  }
  return *node;
}

int DecisionTree::Depth() const {
  std::vector<int> depth(nodes_.size(), 0);
  int deepest = 0;
  // Children are always created after their parent.
  for (std::size_t i = 0; i < nodes_.size(); ++i) {
    deepest = std::max(deepest, depth[i]);
    if (!nodes_[i].is_leaf()) {
      depth[nodes_[i].left] = depth[nodes_[i].right] = depth[i] + 1;
    }
  }
  return deepest;
}

RfModel::RfModel(RfConfig config, std::size_t input_dims, std::vector<DecisionTree> trees)
    : config_(std::move(config)), input_dims_(input_dims), trees_(std::move(trees)) {
  Require(input_dims_ >= 1, "forest input dimensionality must be >= 1");
  Require(!trees_.empty(), "a forest needs at least one tree");
  for (const auto& tree : trees_) {
    for (const auto& node : tree.nodes()) {
      Require(node.is_leaf() || node.feature < static_cast<int>(input_dims_),
              "tree split feature out of range");
    }
  }
}

double RfModel::Predict(std::span<const double> x) const {
  if (x.size() != input_dims_) {
    throw ShapeError("forest expects " + std::to_string(input_dims_) + " inputs, got " +
                     std::to_string(x.size()));
  }
  double total = 0.0;
  for (const auto& tree : trees_) total += tree.Predict(x);
  return total / static_cast<double>(trees_.size());
}

namespace detail {

std::optional<Split> FindBestSplit(const Dataset& data, std::span<const std::size_t> samples,
                                   std::span<const int> features, SplitCriterion criterion,
                                   int min_samples_leaf) {
  const std::size_t n = samples.size();
  const auto min_leaf = static_cast<std::size_t>(min_samples_leaf);
  if (n < 2 * min_leaf) return std::nullopt;
  const auto& labels = data.labels();
  std::size_t total_positive = 0;
  for (const std::size_t i : samples) total_positive += labels[i] == kNormalLabel;

  std::optional<Split> best;
  std::vector<std::pair<double, int>> column(n);
  for (const int feature : features) {
    for (std::size_t j = 0; j < n; ++j) {
      column[j] = {data.at(samples[j], feature), labels[samples[j]]};
    }
    std::sort(column.begin(), column.end());
    std::size_t left_positive = 0;
    for (std::size_t j = 0; j + 1 < n; ++j) {
      left_positive += column[j].second == kNormalLabel;
      const std::size_t left_n = j + 1;
      const std::size_t right_n = n - left_n;
      if (column[j].first == column[j + 1].first) continue;
      if (left_n < min_leaf) continue;
      if (right_n < min_leaf) break;
      const double weighted =
          (static_cast<double>(left_n) * Impurity(left_positive, left_n, criterion) +
           static_cast<double>(right_n) *
               Impurity(total_positive - left_positive, right_n, criterion)) /
          static_cast<double>(n);
      double threshold = column[j].first + (column[j + 1].first - column[j].first) / 2.0;
      // Adjacent doubles: the midpoint can round up onto the right value.
      if (threshold >= column[j + 1].first) threshold = column[j].first;
      const bool better =
          !best || weighted < best->weighted_impurity ||
          (weighted == best->weighted_impurity &&
           (feature < best->feature ||
            (feature == best->feature && threshold < best->threshold)));
      if (better) best = Split{feature, threshold, weighted};
    }
  }
  return best;
}

DecisionTree GrowTree(const Dataset& data, std::vector<std::size_t> samples,
                      const RfConfig& config, std::uint64_t seed) {
  Rng rng(seed);
  const auto& labels = data.labels();
  const int dims = static_cast<int>(data.dims());
  const int per_node = config.FeaturesPerNode(data.dims());
  std::vector<int> feature_pool(dims);
  std::iota(feature_pool.begin(), feature_pool.end(), 0);

  std::vector<TreeNode> nodes(1);
  std::vector<PendingNode> stack;
  stack.push_back({0, std::move(samples), 0});
  while (!stack.empty()) {
    PendingNode pending = std::move(stack.back());
    stack.pop_back();
    const std::size_t n = pending.samples.size();
    std::size_t positives = 0;
    for (const std::size_t i : pending.samples) positives += labels[i] == kNormalLabel;
    {
      TreeNode& node = nodes[pending.index];
      node.sample_count = static_cast<int>(n);
      node.positive_fraction = static_cast<double>(positives) / static_cast<double>(n);
    }

    const bool pure = positives == 0 || positives == n;
    const bool too_deep = config.max_depth && pending.depth >= *config.max_depth;
    if (pure || too_deep || n < static_cast<std::size_t>(config.min_samples_split)) continue;

    // Partial Fisher-Yates: the first per_node entries are a uniform draw
    // without replacement.
    for (int f = 0; f < per_node; ++f) {
      std::uniform_int_distribution<int> pick(f, dims - 1);
      std::swap(feature_pool[f], feature_pool[pick(rng)]);
    }
    const auto split = FindBestSplit(data, pending.samples,
                                     std::span<const int>(feature_pool.data(), per_node),
                                     config.criterion, config.min_samples_leaf);
    if (!split) continue;
    const double parent = Impurity(positives, n, config.criterion);
    if (parent - split->weighted_impurity <= kMinImpurityDecrease) continue;

    std::vector<std::size_t> left, right;
    for (const std::size_t i : pending.samples) {
      (data.at(i, split->feature) <= split->threshold ? left : right).push_back(i);
    }
    const int left_index = static_cast<int>(nodes.size());
    nodes.emplace_back();
    nodes.emplace_back();
    TreeNode& node = nodes[pending.index];
    node.feature = split->feature;
    node.threshold = split->threshold;
    node.left = left_index;
    node.right = left_index + 1;
    stack.push_back({left_index + 1, std::move(right), pending.depth + 1});
    stack.push_back({left_index, std::move(left), pending.depth + 1});
  }
  return DecisionTree(std::move(nodes));
}

}  // namespace detail

RfModel TrainRf(const TrainingSet& data, const RfConfig& config) {
  config.Validate();
  const Dataset& points = data.points;
  Require(points.CountLabel(kNormalLabel) > 0 && points.CountLabel(kAnomalousLabel) > 0,
          "training data must contain both classes");
  const std::size_t n = points.size();
  const auto count = static_cast<std::size_t>(config.num_estimators);

  std::vector<std::optional<DecisionTree>> trees(count);
  std::atomic<std::size_t> next{0};
  std::exception_ptr failure;
  std::mutex failure_mutex;
  const auto worker = [&] {
    for (std::size_t t = next++; t < count; t = next++) {
      try {
        const std::uint64_t tree_seed = DeriveSeed(config.seed, t);
        std::vector<std::size_t> samples(n);
        if (config.bootstrap) {
          Rng rng(DeriveSeed(tree_seed, 1));
          std::uniform_int_distribution<std::size_t> pick(0, n - 1);
          for (auto& s : samples) s = pick(rng);
        } else {
          std::iota(samples.begin(), samples.end(), 0);
        }
        trees[t] = detail::GrowTree(points, std::move(samples), config, DeriveSeed(tree_seed, 2));
      } catch (...) {
        std::lock_guard<std::mutex> lock(failure_mutex);
        if (!failure) failure = std::current_exception();
      }
    }
  };
  const std::size_t threads =
      std::min<std::size_t>(count, std::max(1u, std::thread::hardware_concurrency()));
  if (threads <= 1) {
    worker();
  } else {
    std::vector<std::jthread> pool;
    for (std::size_t i = 0; i < threads; ++i) pool.emplace_back(worker);
  }
  if (failure) std::rethrow_exception(failure);

  std::vector<DecisionTree> grown;
  grown.reserve(count);
  for (auto& tree : trees) grown.push_back(std::move(*tree));
  return RfModel(config, points.dims(), std::move(grown));
}

}  // namespace nsad
