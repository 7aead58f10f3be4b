#include "nsad/dataset.h"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <set>
#include <sstream>
#include <string_view>
#include <system_error>

#include "nsad/common.h"

namespace nsad {
namespace {

std::string_view Trim(std::string_view s) {
  const auto is_space = [](char c) {
    return c == ' ' || c == '\t' || c == '\r' || c == '\n';
  };
  while (!s.empty() && is_space(s.front())) s.remove_prefix(1);
  while (!s.empty() && is_space(s.back())) s.remove_suffix(1);
  return s;
}

std::vector<std::string_view> SplitCommas(std::string_view line) {
  std::vector<std::string_view> cells;
  std::size_t start = 0;
  while (true) {
    const std::size_t comma = line.find(',', start);
    if (comma == std::string_view::npos) {
      cells.push_back(Trim(line.substr(start)));
      return cells;
    }
    cells.push_back(Trim(line.substr(start, comma - start)));
    start = comma + 1;
  }
}

bool ParseDouble(std::string_view cell, double& out) {
  if (cell.empty()) return false;
  if (cell.front() == '+') cell.remove_prefix(1);
  const auto [ptr, ec] = std::from_chars(cell.data(), cell.data() + cell.size(), out);
  return ec == std::errc() && ptr == cell.data() + cell.size() && std::isfinite(out);
}

void CheckSameDims(const Normalizer& norm, const Dataset& data) {
  if (norm.dims() != data.dims()) {
    throw ShapeError("normalizer has " + std::to_string(norm.dims()) +
                     " dimensions but data has " + std::to_string(data.dims()));
  }
}

}  // namespace

Dataset::Dataset(std::vector<std::string> dim_names, std::vector<double> values,
                 std::optional<std::vector<int>> labels)
    : dim_names_(std::move(dim_names)),
      values_(std::move(values)),
      labels_(std::move(labels)) {
  if (dim_names_.empty()) throw FormatError("dataset needs at least one dimension");
  std::set<std::string> unique(dim_names_.begin(), dim_names_.end());
  if (unique.size() != dim_names_.size()) {
    throw FormatError("dimension names must be unique");
  }
  if (values_.size() % dim_names_.size() != 0) {
    throw FormatError("value count is not a multiple of the dimensionality");
  }
  for (const double v : values_) {
    if (!std::isfinite(v)) throw FormatError("dataset values must be finite");
  }
  if (labels_) {
    if (labels_->size() != size()) {
      throw FormatError("label count " + std::to_string(labels_->size()) +
                        " does not match point count " + std::to_string(size()));
    }
    for (const int label : *labels_) {
      if (label != kAnomalousLabel && label != kNormalLabel) {
        throw FormatError("labels must be 0 or 1");
      }
    }
  }
}

const std::vector<int>& Dataset::labels() const {
  Require(labels_.has_value(), "dataset has no labels");
  return *labels_;
}

std::size_t Dataset::CountLabel(int label) const {
  const auto& l = labels();
  return static_cast<std::size_t>(std::count(l.begin(), l.end(), label));
}

Dataset Dataset::Subset(std::span<const std::size_t> indices) const {
  std::vector<double> values;
  values.reserve(indices.size() * dims());
  std::optional<std::vector<int>> labels;
  if (labels_) labels.emplace().reserve(indices.size());
  for (const std::size_t i : indices) {
    if (i >= size()) throw PreconditionError("subset index out of range");
    const auto row = Row(i);
    values.insert(values.end(), row.begin(), row.end());
    if (labels) labels->push_back((*labels_)[i]);
  }
  return Dataset(dim_names_, std::move(values), std::move(labels));
}

Dataset Dataset::WithoutLabels() const { return Dataset(dim_names_, values_); }

Dataset Dataset::WithLabels(std::vector<int> labels) const {
  return Dataset(dim_names_, values_, std::move(labels));
}

Normalizer::Normalizer(std::vector<double> mins, std::vector<double> maxs)
    : mins_(std::move(mins)), maxs_(std::move(maxs)) {
  if (mins_.size() != maxs_.size() || mins_.empty()) {
    throw FormatError("normalizer bounds must be non-empty and paired");
  }
  for (std::size_t d = 0; d < mins_.size(); ++d) {
    if (!std::isfinite(mins_[d]) || !std::isfinite(maxs_[d]) || mins_[d] > maxs_[d]) {
      throw FormatError("normalizer bounds must be finite with min <= max");
    }
  }
}

std::vector<double> Normalizer::NormalizePoint(std::span<const double> raw) const {
  if (raw.size() != dims()) throw ShapeError("point dimensionality mismatch");
  std::vector<double> out(raw.size());
  for (std::size_t d = 0; d < raw.size(); ++d) {
    out[d] = degenerate(d) ? 0.0 : (raw[d] - mins_[d]) / (maxs_[d] - mins_[d]);
  }
  return out;
}

std::vector<double> Normalizer::DenormalizePoint(std::span<const double> unit) const {
  if (unit.size() != dims()) throw ShapeError("point dimensionality mismatch");
  std::vector<double> out(unit.size());
  for (std::size_t d = 0; d < unit.size(); ++d) {
    out[d] = degenerate(d) ? mins_[d] : mins_[d] + unit[d] * (maxs_[d] - mins_[d]);
  }
  return out;
}

std::vector<std::string> ReadCsvHeader(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open '" + path + "'");
  std::string line;
  if (!std::getline(in, line)) throw FormatError("'" + path + "' has no header row");
  std::vector<std::string> names;
  for (const auto cell : SplitCommas(line)) names.emplace_back(cell);
  return names;
}

Dataset LoadCsv(const std::string& path, const std::optional<std::string>& label_column) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open '" + path + "'");
  std::string line;
  if (!std::getline(in, line)) throw FormatError("'" + path + "' has no header row");

  std::vector<std::string> header;
  for (const auto cell : SplitCommas(line)) header.emplace_back(cell);
  std::optional<std::size_t> label_index;
  std::vector<std::string> dim_names;
  for (std::size_t c = 0; c < header.size(); ++c) {
    if (label_column && header[c] == *label_column) {
      label_index = c;
    } else {
      dim_names.emplace_back(header[c]);
    }
  }
  if (label_column && !label_index) {
    throw FormatError("'" + path + "' has no label column '" + *label_column + "'");
  }

  std::vector<double> values;
  std::optional<std::vector<int>> labels;
  if (label_index) labels.emplace();
  std::size_t row = 0;
  while (std::getline(in, line)) {
    ++row;
    if (Trim(line).empty()) continue;
    const auto cells = SplitCommas(line);
    if (cells.size() != header.size()) {
      throw FormatError("'" + path + "' row " + std::to_string(row) + " has " +
                        std::to_string(cells.size()) + " cells, header has " +
                        std::to_string(header.size()));
    }
    for (std::size_t c = 0; c < cells.size(); ++c) {
      double value = 0.0;
      if (!ParseDouble(cells[c], value)) {
        throw ParseError("'" + path + "' row " + std::to_string(row) + " column '" +
                         header[c] + "': cannot parse '" +
                         std::string(cells[c]) + "' as a finite number");
      }
      if (label_index && c == *label_index) {
        if (value != 0.0 && value != 1.0) {
          throw ParseError("'" + path + "' row " + std::to_string(row) + " column '" +
                           header[c] + "': label must be 0 or 1");
        }
        labels->push_back(static_cast<int>(value));
      } else {
        values.push_back(value);
      }
    }
  }
  return Dataset(std::move(dim_names), std::move(values), std::move(labels));
}

std::string FormatDouble(double value) {
  char buffer[64];
  const auto [ptr, ec] = std::to_chars(buffer, buffer + sizeof(buffer), value);
  return std::string(buffer, ptr);
}

void WriteFileAtomically(const std::string& path, const std::string& contents) {
  const std::string tmp = path + ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw IoError("cannot write '" + tmp + "'");
    out << contents;
    if (!out) throw IoError("failed writing '" + tmp + "'");
  }
  std::error_code ec;
  std::filesystem::rename(tmp, path, ec);
  if (ec) throw IoError("cannot rename '" + tmp + "' to '" + path + "': " + ec.message());
}

void WriteCsv(const Dataset& data, const std::string& path, const std::string& label_column) {
  std::ostringstream out;
  for (std::size_t d = 0; d < data.dims(); ++d) {
    if (d > 0) out << ',';
    out << data.dim_names()[d];
  }
  if (data.has_labels()) out << ',' << label_column;
  out << '\n';
  for (std::size_t i = 0; i < data.size(); ++i) {
    for (std::size_t d = 0; d < data.dims(); ++d) {
      if (d > 0) out << ',';
      out << FormatDouble(data.at(i, d));
    }
    if (data.has_labels()) out << ',' << data.labels()[i];
    out << '\n';
  }
  WriteFileAtomically(path, out.str());
}

Normalizer FitNormalizer(const Dataset& positive) {
  Require(positive.size() >= 2, "fitting a normalizer needs at least 2 points");
  std::vector<double> mins(positive.dims()), maxs(positive.dims());
  for (std::size_t d = 0; d < positive.dims(); ++d) {
    mins[d] = maxs[d] = positive.at(0, d);
  }
  for (std::size_t i = 1; i < positive.size(); ++i) {
    for (std::size_t d = 0; d < positive.dims(); ++d) {
      mins[d] = std::min(mins[d], positive.at(i, d));
      maxs[d] = std::max(maxs[d], positive.at(i, d));
    }
  }
  return Normalizer(std::move(mins), std::move(maxs));
}

Dataset Normalize(const Normalizer& norm, const Dataset& data) {
  CheckSameDims(norm, data);
  std::vector<double> values;
  values.reserve(data.values().size());
  for (std::size_t i = 0; i < data.size(); ++i) {
    const auto unit = norm.NormalizePoint(data.Row(i));
    values.insert(values.end(), unit.begin(), unit.end());
  }
  return Dataset(data.dim_names(), std::move(values),
                 data.has_labels() ? std::optional(data.labels()) : std::nullopt);
}

Dataset Denormalize(const Normalizer& norm, const Dataset& data) {
  CheckSameDims(norm, data);
  std::vector<double> values;
  values.reserve(data.values().size());
  for (std::size_t i = 0; i < data.size(); ++i) {
    const auto raw = norm.DenormalizePoint(data.Row(i));
    values.insert(values.end(), raw.begin(), raw.end());
  }
  return Dataset(data.dim_names(), std::move(values),
                 data.has_labels() ? std::optional(data.labels()) : std::nullopt);
}

}  // namespace nsad
