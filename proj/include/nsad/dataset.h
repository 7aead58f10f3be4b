// Dataset model, CSV ingestion and min-max normalization.

#ifndef NSAD_DATASET_H_
#define NSAD_DATASET_H_

#include <cstddef>
#include <optional>
#include <span>
#include <string>
#include <vector>

namespace nsad {

inline constexpr int kAnomalousLabel = 0;
inline constexpr int kNormalLabel = 1;
inline constexpr char kDefaultLabelColumn[] = "class_label";

// An ordered collection of D-dimensional finite points, stored row-major, with
// optional 0/1 labels (1 = normal/positive, 0 = anomalous/negative).
//
// Immutable after construction; the constructor validates every invariant.
class Dataset {
 public:
  Dataset(std::vector<std::string> dim_names, std::vector<double> values,
          std::optional<std::vector<int>> labels = std::nullopt);

  std::size_t size() const { return dims() == 0 ? 0 : values_.size() / dims(); }
  std::size_t dims() const { return dim_names_.size(); }
  bool empty() const { return values_.empty(); }

  std::span<const double> Row(std::size_t i) const {
    return {values_.data() + i * dims(), dims()};
  }
  double at(std::size_t i, std::size_t d) const { return values_[i * dims() + d]; }

  const std::vector<double>& values() const { return values_; }
  const std::vector<std::string>& dim_names() const { return dim_names_; }

  bool has_labels() const { return labels_.has_value(); }
  // Throws PreconditionError when the dataset is unlabeled.
  const std::vector<int>& labels() const;
  std::size_t CountLabel(int label) const;

  // Rows at `indices`, in that order, with their labels if present.
  Dataset Subset(std::span<const std::size_t> indices) const;
  Dataset WithoutLabels() const;
  Dataset WithLabels(std::vector<int> labels) const;

 private:
  std::vector<std::string> dim_names_;
  std::vector<double> values_;
  std::optional<std::vector<int>> labels_;
};

// Per-dimension affine map between raw units and unit space, fitted on the
// positive sample. Zero-range dimensions are flagged degenerate: they
// normalize to 0 and denormalize to their constant value.
class Normalizer {
 public:
  Normalizer(std::vector<double> mins, std::vector<double> maxs);

  std::size_t dims() const { return mins_.size(); }
  double min(std::size_t d) const { return mins_[d]; }
  double max(std::size_t d) const { return maxs_[d]; }
  bool degenerate(std::size_t d) const { return mins_[d] == maxs_[d]; }
  const std::vector<double>& mins() const { return mins_; }
  const std::vector<double>& maxs() const { return maxs_; }

  std::vector<double> NormalizePoint(std::span<const double> raw) const;
  std::vector<double> DenormalizePoint(std::span<const double> unit) const;

 private:
  std::vector<double> mins_;
  std::vector<double> maxs_;
};

// Reads a numeric CSV with a header row. When `label_column` is set, that
// column must exist and hold 0/1 values; it becomes the label vector.
Dataset LoadCsv(const std::string& path,
                const std::optional<std::string>& label_column = std::nullopt);

// Column names from the header row of `path`.
std::vector<std::string> ReadCsvHeader(const std::string& path);

// Writes `data` (labels last, under `label_column`) using shortest round-trip
// number formatting, so reloading reproduces every value exactly.
void WriteCsv(const Dataset& data, const std::string& path,
              const std::string& label_column = kDefaultLabelColumn);

Normalizer FitNormalizer(const Dataset& positive);
Dataset Normalize(const Normalizer& norm, const Dataset& data);
Dataset Denormalize(const Normalizer& norm, const Dataset& data);

// Writes `contents` to a temporary sibling of `path` and renames it into place.
void WriteFileAtomically(const std::string& path, const std::string& contents);

// Shortest decimal text that parses back to exactly `value`.
std::string FormatDouble(double value);

}  // namespace nsad

#endif  // NSAD_DATASET_H_
