#include "aftboost/data.hpp"

#include <algorithm>
#include <cctype>
#include <charconv>
#include <cmath>
#include <fstream>
#include <sstream>

namespace aftboost {

namespace {

std::string trim(const std::string& s) {
  std::size_t a = 0, b = s.size();
  while (a < b && std::isspace(static_cast<unsigned char>(s[a]))) ++a;
  while (b > a && std::isspace(static_cast<unsigned char>(s[b - 1]))) --b;
  return s.substr(a, b - a);
}

std::vector<std::string> split_line(const std::string& line) {
  std::vector<std::string> cells;
  std::string cell;
  std::stringstream ss(line);
  while (std::getline(ss, cell, ',')) cells.push_back(trim(cell));
  if (!line.empty() && line.back() == ',') cells.emplace_back();
  return cells;
}

bool is_inf_token(std::string t) {
  std::transform(t.begin(), t.end(), t.begin(),
                 [](unsigned char c) { return std::tolower(c); });
  return t == "inf" || t == "+inf" || t == "infinity";
}

double parse_number(const std::string& cell, std::size_t line_no,
                    const std::string& column) {
  if (is_inf_token(cell)) return std::numeric_limits<double>::infinity();
  double v;
  const char* begin = cell.data();
  const char* end = begin + cell.size();
  auto [ptr, ec] = std::from_chars(begin, end, v);
  if (ec != std::errc() || ptr != end) {
    throw DataError("line " + std::to_string(line_no) + ": malformed number '" +
                    cell + "' in column '" + column + "'");
  }
  return v;
}

}  // namespace

void Dataset::add_row(const std::vector<double>& features, LabelRange label) {
  if (features.size() != num_features_) {
    throw DataError("feature width mismatch: expected " +
                    std::to_string(num_features_) + ", got " +
                    std::to_string(features.size()));
  }
  if (!label.valid()) {
    throw DataError("invalid label range [" + format_double(label.lower) +
                    ", " + format_double(label.upper) + "]");
  }
  features_.insert(features_.end(), features.begin(), features.end());
  labels_.push_back(label);
}

Dataset Dataset::subset(const std::vector<std::size_t>& rows) const {
  Dataset out(num_features_, column_names_);
  std::vector<int> folds;
  std::vector<double> buf(num_features_);
  for (std::size_t i : rows) {
    const double* r = row(i);
    buf.assign(r, r + num_features_);
    out.add_row(buf, labels_[i]);
    if (fold_assignment_) folds.push_back((*fold_assignment_)[i]);
  }
  if (fold_assignment_) out.fold_assignment_ = std::move(folds);
  return out;
}

Dataset read_csv(const std::string& path, const CsvSchema& schema) {
  std::ifstream in(path);
  if (!in) throw DataError("cannot open '" + path + "'");

  std::string line;
  if (!std::getline(in, line)) throw DataError("'" + path + "': empty file");
  if (!line.empty() && line.back() == '\r') line.pop_back();
  const std::vector<std::string> header = split_line(line);

  auto find_col = [&](const std::string& name) {
    auto it = std::find(header.begin(), header.end(), name);
    if (it == header.end()) {
      throw DataError("'" + path + "': missing column '" + name + "'");
    }
    return static_cast<std::size_t>(it - header.begin());
  };

  const std::size_t lower_idx = find_col(schema.lower_column);
  const std::size_t upper_idx = find_col(schema.upper_column);

  std::vector<std::size_t> feature_idx;
  std::vector<std::string> feature_names;
  if (schema.feature_columns.empty()) {
    for (std::size_t j = 0; j < header.size(); ++j) {
      if (j != lower_idx && j != upper_idx) {
        feature_idx.push_back(j);
        feature_names.push_back(header[j]);
      }
    }
  } else {
    for (const std::string& name : schema.feature_columns) {
      feature_idx.push_back(find_col(name));
      feature_names.push_back(name);
    }
  }

  Dataset dataset(feature_idx.size(), feature_names);
  std::vector<double> features(feature_idx.size());
  std::size_t line_no = 1;
  while (std::getline(in, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (trim(line).empty()) continue;
    const std::vector<std::string> cells = split_line(line);
    if (cells.size() != header.size()) {
      throw DataError("line " + std::to_string(line_no) + ": expected " +
                      std::to_string(header.size()) + " cells, got " +
                      std::to_string(cells.size()));
    }
    auto label_cell = [&](std::size_t idx, const std::string& name) {
      if (cells[idx].empty()) {
        throw DataError("line " + std::to_string(line_no) +
                        ": missing label cell in column '" + name + "'");
      }
      return parse_number(cells[idx], line_no, name);
    };
    LabelRange label;
    label.lower = label_cell(lower_idx, schema.lower_column);
    label.upper = label_cell(upper_idx, schema.upper_column);
    if (label.lower < 0.0 || label.upper < 0.0) {
      throw DataError("line " + std::to_string(line_no) +
                      ": negative label bound");
    }
    if (label.lower > label.upper) {
      throw DataError("line " + std::to_string(line_no) + ": lower bound " +
                      format_double(label.lower) + " exceeds upper bound " +
                      format_double(label.upper));
    }
    if (std::isinf(label.lower)) {
      throw DataError("line " + std::to_string(line_no) +
                      ": lower bound must be finite");
    }
    for (std::size_t k = 0; k < feature_idx.size(); ++k) {
      const std::string& cell = cells[feature_idx[k]];
      features[k] = cell.empty() ? missing_value()
                                 : parse_number(cell, line_no, feature_names[k]);
    }
    dataset.add_row(features, label);
  }
  return dataset;
}

std::string format_double(double v) {
  if (std::isnan(v)) return "";
  if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
  char buf[32];
  auto [ptr, ec] = std::to_chars(buf, buf + sizeof(buf), v);
  return std::string(buf, ptr);
}

void write_csv(const Dataset& dataset, const std::string& path,
               const CsvSchema& schema) {
  std::ofstream out(path);
  if (!out) throw DataError("cannot write '" + path + "'");
  for (const std::string& name : dataset.column_names()) out << name << ',';
  out << schema.lower_column << ',' << schema.upper_column << '\n';
  for (std::size_t i = 0; i < dataset.num_rows(); ++i) {
    for (std::size_t j = 0; j < dataset.num_features(); ++j) {
      out << format_double(dataset.feature(i, j)) << ',';
    }
    const LabelRange& label = dataset.label(i);
    out << format_double(label.lower) << ',' << format_double(label.upper)
        << '\n';
  }
  if (!out) throw DataError("failed writing '" + path + "'");
}

Dataset preprocess(const Dataset& dataset, const PreprocessOptions& options,
                   PreprocessReport* report) {
  const std::size_t n = dataset.num_rows();
  const std::size_t p = dataset.num_features();
  std::vector<bool> keep(p, true);
  PreprocessReport local;

  for (std::size_t j = 0; n > 0 && j < p; ++j) {
    bool has_missing = false;
    bool constant = true;
    double first = dataset.feature(0, j);
    for (std::size_t i = 0; i < n; ++i) {
      const double v = dataset.feature(i, j);
      if (std::isnan(v)) has_missing = true;
      if (v != first) constant = false;
    }
    if (options.drop_missing_columns && has_missing) {
      keep[j] = false;
      local.dropped_missing.push_back(dataset.column_names()[j]);
    } else if (options.drop_zero_variance && constant) {
      keep[j] = false;
      local.dropped_zero_variance.push_back(dataset.column_names()[j]);
    }
  }

  std::vector<std::string> names;
  std::vector<std::size_t> cols;
  for (std::size_t j = 0; j < p; ++j) {
    if (keep[j]) {
      cols.push_back(j);
      names.push_back(dataset.column_names()[j]);
    }
  }

  Dataset out(cols.size(), names);
  std::vector<double> row(cols.size());
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t k = 0; k < cols.size(); ++k) {
      row[k] = dataset.feature(i, cols[k]);
    }
    LabelRange label = dataset.label(i);
    if (options.exponentiate_labels) {
      label.lower = std::exp(label.lower);
      label.upper = std::exp(label.upper);
      local.labels_exponentiated = true;
    }
    out.add_row(row, label);
  }
  if (dataset.fold_assignment()) out.fold_assignment() = dataset.fold_assignment();
  if (report) *report = local;
  return out;
}

}  // namespace aftboost
