// ROC AUC, stratified k-fold cross-validation of detectors and the Wilcoxon
// rank-sum test used to compare AUC samples.

#ifndef NSAD_EVALUATION_H_
#define NSAD_EVALUATION_H_

#include <cstddef>
#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "nsad/dataset.h"
#include "nsad/detector.h"

namespace nsad {

// Mann-Whitney AUC with label 1 (normal) as the positive class: the
// probability that a random normal point outscores a random anomaly, ties
// counting one half. Throws PreconditionError unless both classes occur.
double RocAuc(std::span<const double> scores, std::span<const int> labels);

struct EvalReport {
  std::string detector;
  std::string dataset;
  int trials = 0;
  int folds = 0;
  // Trial-major: aucs[trial * folds + fold].
  std::vector<double> aucs;
  double mean_percent = 0.0;
  // Population standard deviation, in percent.
  double std_percent = 0.0;
  double seconds = 0.0;
};

// Row indices of each fold. Each class is shuffled and dealt round-robin, so
// every fold holds its class share to within one point.
std::vector<std::vector<std::size_t>> StratifiedFolds(std::span<const int> labels, int folds,
                                                      std::uint64_t seed);

// For each trial and fold: train on the other folds' points with their labels
// discarded, score the held-out fold and compute AUC against its labels.
EvalReport KFoldCv(const Dataset& labeled, const DetectorConfig& config, int folds, int trials,
                   std::uint64_t seed, const std::string& dataset_name = "");

// Two-sided Wilcoxon rank-sum p-value, normal approximation with tie
// correction and no continuity correction.
double RankSumTest(std::span<const double> a, std::span<const double> b);

// Aligned table of "mean±std" percentages, one row per dataset and one
// column per detector, in first-seen order.
std::string FormatReportTable(std::span<const EvalReport> reports);

}  // namespace nsad

#endif  // NSAD_EVALUATION_H_
