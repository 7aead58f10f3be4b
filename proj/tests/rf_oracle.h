// Brute-force references for forest prediction and split search.

#ifndef NSAD_TESTS_RF_ORACLE_H_
#define NSAD_TESTS_RF_ORACLE_H_

#include <algorithm>
#include <iterator>
#include <limits>
#include <set>
#include <span>
#include <vector>

#include "nsad/random_forest.h"

namespace nsad::testing {

// Recursive traversal over the node records.
inline double TraverseOracle(const std::vector<TreeNode>& nodes, int index, std::span<const double> x) {
  const TreeNode& node = nodes[index];
  if (node.feature < 0) return node.positive_fraction;
  if (x[node.feature] <= node.threshold) return TraverseOracle(nodes, node.left, x);
  return TraverseOracle(nodes, node.right, x);
}

inline double TraverseForestOracle(const RfModel& model, std::span<const double> x) {
  double sum = 0.0;
  for (const auto& tree : model.trees()) sum += TraverseOracle(tree.nodes(), 0, x);
  return sum / static_cast<double>(model.trees().size());
}

// Every feature, every midpoint between distinct sorted values, honoring
// min_leaf; impurities recomputed from label lists. Infinity if no split is
// admissible.
inline double ExhaustiveBestWeightedImpurity(const Dataset& data, const std::vector<std::size_t>& samples,
                                             SplitCriterion criterion, int min_leaf) {
  double best = std::numeric_limits<double>::infinity();
  for (std::size_t f = 0; f < data.dims(); ++f) {
    std::set<double> distinct;
    for (const std::size_t i : samples) distinct.insert(data.at(i, f));
    for (auto it = distinct.begin(); std::next(it) != distinct.end(); ++it) {
      const double threshold = (*it + *std::next(it)) / 2.0;
      std::vector<int> left, right;
      for (const std::size_t i : samples) {
        (data.at(i, f) <= threshold ? left : right).push_back(data.labels()[i]);
      }
      if (static_cast<int>(left.size()) < min_leaf || static_cast<int>(right.size()) < min_leaf) continue;
      const double n = static_cast<double>(samples.size());
      const double weighted = (left.size() * Impurity(left, criterion) +
                               right.size() * Impurity(right, criterion)) / n;
      best = std::min(best, weighted);
    }
  }
  return best;
}

}  // namespace nsad::testing

#endif  // NSAD_TESTS_RF_ORACLE_H_
