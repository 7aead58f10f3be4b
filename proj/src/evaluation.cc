#include "nsad/evaluation.h"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <iomanip>
#include <numeric>
#include <sstream>

#include "nsad/common.h"

namespace nsad {
namespace {

// 1-based ranks with ties averaged; also accumulates sum(t^3 - t) over tie
// groups.
std::vector<double> AverageRanks(std::span<const double> values, double* tie_term = nullptr) {
  std::vector<std::size_t> order(values.size());
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(),
                   [&](std::size_t a, std::size_t b) { return values[a] < values[b]; });
  std::vector<double> ranks(values.size());
  double ties = 0.0;
  for (std::size_t start = 0; start < order.size();) {
    std::size_t end = start + 1;
    while (end < order.size() && values[order[end]] == values[order[start]]) ++end;
    const double rank = (static_cast<double>(start + 1) + static_cast<double>(end)) / 2.0;
    for (std::size_t j = start; j < end; ++j) ranks[order[j]] = rank;
    const double t = static_cast<double>(end - start);
    ties += t * t * t - t;
    start = end;
  }
  if (tie_term) *tie_term = ties;
  return ranks;
}

}  // namespace

double RocAuc(std::span<const double> scores, std::span<const int> labels) {
  Require(scores.size() == labels.size(), "scores and labels must have equal length");
  double positives = 0.0;
  double positive_rank_sum = 0.0;
  const std::vector<double> ranks = AverageRanks(scores);
  for (std::size_t i = 0; i < labels.size(); ++i) {
    Require(labels[i] == 0 || labels[i] == 1, "labels must be 0 or 1");
    Require(std::isfinite(scores[i]), "scores must be finite");
    if (labels[i] == kNormalLabel) {
      positives += 1.0;
      positive_rank_sum += ranks[i];
    }
  }
  const double negatives = static_cast<double>(labels.size()) - positives;
  Require(positives > 0.0 && negatives > 0.0, "AUC is undefined unless both classes are present");
  const double u = positive_rank_sum - positives * (positives + 1.0) / 2.0;
  return u / (positives * negatives);
}

std::vector<std::vector<std::size_t>> StratifiedFolds(std::span<const int> labels, int folds,
                                                      std::uint64_t seed) {
  Require(folds >= 2, "cross-validation needs at least 2 folds");
  std::vector<std::vector<std::size_t>> by_class(2);
  for (std::size_t i = 0; i < labels.size(); ++i) {
    Require(labels[i] == 0 || labels[i] == 1, "labels must be 0 or 1");
    by_class[labels[i]].push_back(i);
  }
  for (const auto& members : by_class) {
    Require(members.size() >= static_cast<std::size_t>(folds),
            "each class needs at least one point per fold (" + std::to_string(folds) +
                " folds requested, a class has " + std::to_string(members.size()) + ")");
  }
  Rng rng(seed);
  std::vector<std::vector<std::size_t>> out(folds);
  std::size_t next = 0;
  for (auto& members : by_class) {
    std::shuffle(members.begin(), members.end(), rng);
    for (const std::size_t i : members) out[next++ % folds].push_back(i);
  }
  for (auto& fold : out) std::sort(fold.begin(), fold.end());
  return out;
}

EvalReport KFoldCv(const Dataset& labeled, const DetectorConfig& config, int folds, int trials,
                   std::uint64_t seed, const std::string& dataset_name) {
  Require(trials >= 1, "at least one trial is required");
  config.Validate();
  const auto& labels = labeled.labels();
  const auto start = std::chrono::steady_clock::now();

  EvalReport report;
  report.detector = DetectorName(config.kind);
  report.dataset = dataset_name;
  report.trials = trials;
  report.folds = folds;
  for (int trial = 0; trial < trials; ++trial) {
    const std::uint64_t trial_seed = DeriveSeed(seed, static_cast<std::uint64_t>(trial));
    const auto fold_rows = StratifiedFolds(labels, folds, trial_seed);
    for (int fold = 0; fold < folds; ++fold) {
      std::vector<std::size_t> train;
      for (int other = 0; other < folds; ++other) {
        if (other != fold) train.insert(train.end(), fold_rows[other].begin(), fold_rows[other].end());
      }
      std::sort(train.begin(), train.end());
      DetectorConfig fold_config = config;
      fold_config.seed = DeriveSeed(trial_seed, 1000 + static_cast<std::uint64_t>(fold));
      const Detector detector = TrainDetector(labeled.Subset(train).WithoutLabels(), fold_config);
      const Dataset held_out = labeled.Subset(fold_rows[fold]);
      report.aucs.push_back(RocAuc(detector.ScoreAll(held_out), held_out.labels()));
    }
  }

  const double n = static_cast<double>(report.aucs.size());
  const double mean = std::accumulate(report.aucs.begin(), report.aucs.end(), 0.0) / n;
  double squares = 0.0;
  for (const double auc : report.aucs) squares += (auc - mean) * (auc - mean);
  report.mean_percent = 100.0 * mean;
  report.std_percent = 100.0 * std::sqrt(squares / n);
  report.seconds =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  return report;
}

double RankSumTest(std::span<const double> a, std::span<const double> b) {
  Require(!a.empty() && !b.empty(), "rank-sum test needs two non-empty samples");
  std::vector<double> pooled(a.begin(), a.end());
  pooled.insert(pooled.end(), b.begin(), b.end());
  double tie_term = 0.0;
  const std::vector<double> ranks = AverageRanks(pooled, &tie_term);
  const double n1 = static_cast<double>(a.size());
  const double n2 = static_cast<double>(b.size());
  const double n = n1 + n2;
  const double rank_sum = std::accumulate(ranks.begin(), ranks.begin() + a.size(), 0.0);
  const double u = rank_sum - n1 * (n1 + 1.0) / 2.0;
  const double variance = n1 * n2 / 12.0 * ((n + 1.0) - tie_term / (n * (n - 1.0)));
  if (!(variance > 0.0)) return 1.0;
  const double z = (u - n1 * n2 / 2.0) / std::sqrt(variance);
  return std::clamp(std::erfc(std::abs(z) / std::sqrt(2.0)), 0.0, 1.0);
}

std::string FormatReportTable(std::span<const EvalReport> reports) {
  std::vector<std::string> datasets, detectors;
  const auto add_unique = [](std::vector<std::string>& list, const std::string& value) {
    if (std::find(list.begin(), list.end(), value) == list.end()) list.push_back(value);
  };
  for (const auto& r : reports) {
    add_unique(datasets, r.dataset);
    add_unique(detectors, r.detector);
  }
  const auto cell = [&](const std::string& dataset, const std::string& detector) {
    for (const auto& r : reports) {
      if (r.dataset == dataset && r.detector == detector) {
        std::ostringstream out;
        out << std::fixed << std::setprecision(0) << r.mean_percent << "±" << r.std_percent;
        return out.str();
      }
    }
    return std::string("-");
  };

  std::size_t first_width = 7;
  for (const auto& d : datasets) first_width = std::max(first_width, d.size());
  std::size_t column_width = 9;
  for (const auto& d : detectors) column_width = std::max(column_width, d.size() + 2);

  std::ostringstream out;
  out << std::left << std::setw(static_cast<int>(first_width)) << "dataset";
  for (const auto& d : detectors) out << std::right << std::setw(static_cast<int>(column_width)) << d;
  out << '\n';
  for (const auto& dataset : datasets) {
    out << std::left << std::setw(static_cast<int>(first_width)) << dataset;
    for (const auto& d : detectors) {
      // setw counts bytes and "±" is two bytes in UTF-8.
      const std::string text = cell(dataset, d);
      const int extra = text == "-" ? 0 : 1;
      out << std::right << std::setw(static_cast<int>(column_width) + extra) << text;
    }
    out << '\n';
  }
  return out.str();
}

}  // namespace nsad
