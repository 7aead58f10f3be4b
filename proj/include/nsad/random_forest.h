// CART random forest for the two-class negative-sampling problem. Scores are
// the mean over trees of the positive-class fraction at the reached leaf.

#ifndef NSAD_RANDOM_FOREST_H_
#define NSAD_RANDOM_FOREST_H_

#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "nsad/dataset.h"
#include "nsad/negative_sampling.h"

namespace nsad {

enum class SplitCriterion { kGini, kEntropy };

std::string CriterionName(SplitCriterion criterion);
// Accepts "gini" or "entropy".
SplitCriterion ParseCriterion(const std::string& name);

struct RfConfig {
  int num_estimators = 100;
  SplitCriterion criterion = SplitCriterion::kGini;
  // Unset: grow until the other stopping rules apply.
  std::optional<int> max_depth;
  int min_samples_split = 2;
  int min_samples_leaf = 1;
  // Candidate features per node. Unset: max(1, floor(sqrt(D))).
  std::optional<int> max_features;
  bool bootstrap = true;
  std::uint64_t seed = 0;

  void Validate() const;
  int FeaturesPerNode(std::size_t dims) const;
};

struct TreeNode {
  // -1 marks a leaf.
  int feature = -1;
  double threshold = 0.0;
  int left = -1;
  int right = -1;
  // Fraction of label-1 samples that reached this node during training.
  double positive_fraction = 0.0;
  int sample_count = 0;

  bool is_leaf() const { return feature < 0; }
};

// Nodes are stored in creation order; nodes[0] is the root.
class DecisionTree {
 public:
  explicit DecisionTree(std::vector<TreeNode> nodes);

  const std::vector<TreeNode>& nodes() const { return nodes_; }
  // Routes left iff x[feature] <= threshold.
  const TreeNode& Leaf(std::span<const double> x) const;
  double Predict(std::span<const double> x) const { return Leaf(x).positive_fraction; }
  // Edges on the longest root-to-leaf path.
  int Depth() const;

 private:
  std::vector<TreeNode> nodes_;
};

class RfModel {
 public:
  RfModel(RfConfig config, std::size_t input_dims, std::vector<DecisionTree> trees);

  const RfConfig& config() const { return config_; }
  std::size_t input_dims() const { return input_dims_; }
  const std::vector<DecisionTree>& trees() const { return trees_; }

  // Mean leaf positive fraction over trees, in [0, 1].
  double Predict(std::span<const double> x) const;

 private:
  RfConfig config_;
  std::size_t input_dims_;
  std::vector<DecisionTree> trees_;
};

// Gini (1 - p^2 - (1-p)^2) or entropy in bits, p the label-1 fraction.
double Impurity(std::span<const int> labels, SplitCriterion criterion);
double Impurity(std::size_t positives, std::size_t total, SplitCriterion criterion);

// Grows config.num_estimators trees. Trees are seeded independently from
// config.seed, so the result does not depend on the thread count.
RfModel TrainRf(const TrainingSet& data, const RfConfig& config);

namespace detail {

struct Split {
  int feature = -1;
  double threshold = 0.0;
  // (n_left * impurity(left) + n_right * impurity(right)) / n
  double weighted_impurity = 0.0;
};

// Best midpoint split of `samples` over `features`, honoring min_samples_leaf.
// Ties go to the lowest feature index, then the lowest threshold. Returns
// nullopt when no feature has two distinct values with a legal partition.
std::optional<Split> FindBestSplit(const Dataset& data, std::span<const std::size_t> samples,
                                   std::span<const int> features, SplitCriterion criterion,
                                   int min_samples_leaf);

// Grows a single tree on `samples` (indices into `data`, repeats allowed).
DecisionTree GrowTree(const Dataset& data, std::vector<std::size_t> samples,
                      const RfConfig& config, std::uint64_t seed);

}  // namespace detail
}  // namespace nsad

#endif  // NSAD_RANDOM_FOREST_H_
