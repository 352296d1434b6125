#ifndef AFTBOOST_DATA_HPP_
#define AFTBOOST_DATA_HPP_

#include <cstddef>
#include <limits>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "aftboost/loss.hpp"

namespace aftboost {

// Raised for malformed input files or invalid labels (CLI exit code 2).
class DataError : public std::runtime_error {
 public:
  explicit DataError(const std::string& what) : std::runtime_error(what) {}
};

// Missing feature values are stored as quiet NaN.
inline double missing_value() {
  return std::numeric_limits<double>::quiet_NaN();
}

// Dense row-major dataset with ranged survival-time labels.
class Dataset {
 public:
  Dataset() = default;
  Dataset(std::size_t num_features, std::vector<std::string> column_names)
      : num_features_(num_features), column_names_(std::move(column_names)) {}

  void add_row(const std::vector<double>& features, LabelRange label);

  std::size_t num_rows() const { return labels_.size(); }
  std::size_t num_features() const { return num_features_; }

  const double* row(std::size_t i) const {
    return features_.data() + i * num_features_;
  }
  double feature(std::size_t i, std::size_t j) const {
    return features_[i * num_features_ + j];
  }
  const LabelRange& label(std::size_t i) const { return labels_[i]; }
  const std::vector<LabelRange>& labels() const { return labels_; }
  const std::vector<std::string>& column_names() const { return column_names_; }

  std::optional<std::vector<int>>& fold_assignment() { return fold_assignment_; }
  const std::optional<std::vector<int>>& fold_assignment() const {
    return fold_assignment_;
  }

  // Subset by row indices (fold assignment is carried over).
  Dataset subset(const std::vector<std::size_t>& rows) const;

 private:
  std::size_t num_features_ = 0;
  std::vector<double> features_;  // row-major
  std::vector<LabelRange> labels_;
  std::vector<std::string> column_names_;
  std::optional<std::vector<int>> fold_assignment_;
};

struct CsvSchema {
  std::string lower_column = "label_lower_bound";
  std::string upper_column = "label_upper_bound";
  // Empty means "all remaining columns are features".
  std::vector<std::string> feature_columns;
};

Dataset read_csv(const std::string& path, const CsvSchema& schema = {});
void write_csv(const Dataset& dataset, const std::string& path,
               const CsvSchema& schema = {});

struct PreprocessOptions {
  bool drop_missing_columns = false;
  bool drop_zero_variance = false;
  bool exponentiate_labels = false;
};

struct PreprocessReport {
  std::vector<std::string> dropped_missing;
  std::vector<std::string> dropped_zero_variance;
  bool labels_exponentiated = false;
};

Dataset preprocess(const Dataset& dataset, const PreprocessOptions& options,
                   PreprocessReport* report = nullptr);

// Shortest decimal representation that round-trips the double exactly.
std::string format_double(double v);

}  // namespace aftboost

#endif  // AFTBOOST_DATA_HPP_
