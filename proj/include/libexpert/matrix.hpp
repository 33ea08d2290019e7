#pragma once

#include <array>
#include <cmath>
#include <cstdint>
#include <filesystem>
#include <limits>
#include <optional>
#include <string>
#include <vector>

#include "libexpert/features.hpp"

namespace libexpert {

// Missing cells are NaN until imputation fills them.
inline double missing_cell() { return std::numeric_limits<double>::quiet_NaN(); }
inline bool is_missing(double v) { return std::isnan(v); }

struct FeatureMatrix {
  std::vector<std::string> row_ids;  // developer account ids
  std::vector<std::string> columns;  // full original column set, fixed order
  std::vector<bool> active;          // per column; pruning clears bits
  std::vector<std::vector<double>> rows;  // row-major, full width, NaN=missing

  std::size_t n_rows() const { return rows.size(); }
  std::size_t n_cols() const { return columns.size(); }
  std::size_t column_index(std::string_view name) const;  // throws on unknown
  std::vector<std::size_t> active_indices() const;

  // Dense copy of the active columns only, in column order.
  std::vector<std::vector<double>> active_rows() const;
  std::vector<std::string> active_columns() const;

  // One column's values (full height).
  std::vector<double> column(std::size_t index) const;
};

FeatureMatrix matrix_from_vectors(const std::vector<FeatureVector>& vectors);

// Per-column preprocessing record; the full log replays the pipeline on a
// fresh raw vector (used by the centroid-distance predictor).
struct ColumnTransform {
  std::string column;
  std::string imputation;  // "", "zero", "max_observed", "imports_rule"
  double fill_value = 0;   // for max_observed
  std::int64_t imputed_cells = 0;
  bool dropped = false;
  std::string drop_reason;
  bool log_transformed = false;
  double log_shift_min = 0;  // ln(1 + x - log_shift_min)
  bool standardized = false;
  double mean = 0;
  double stddev = 0;  // population; 0 => centered only
};

struct TransformLog {
  std::vector<ColumnTransform> columns;

  ColumnTransform& entry(std::string_view column);           // creates on demand
  const ColumnTransform* find(std::string_view column) const;
};

std::string transform_log_to_json(const TransformLog& log);
TransformLog transform_log_from_json(const std::string& text);
void save_transform_log(const std::filesystem::path& path, const TransformLog& log);
TransformLog load_transform_log(const std::filesystem::path& path);

// Pushes one raw 13-feature vector through the logged pipeline: impute,
// drop pruned columns, log-transform (values below the training minimum are
// clamped to it), and standardize where the log says so. Returns the active
// columns in order.
std::vector<double> replay_row(const std::array<std::optional<double>, kFeatureCount>& raw,
                               const TransformLog& log);

// features.clean.csv: active columns plus a trailing developer column.
std::string matrix_to_csv(const FeatureMatrix& m);
FeatureMatrix matrix_from_csv(const std::string& text);
void save_matrix(const std::filesystem::path& path, const FeatureMatrix& m);
FeatureMatrix load_matrix(const std::filesystem::path& path);

}  // namespace libexpert
