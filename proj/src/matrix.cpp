#include "libexpert/matrix.hpp"

#include <algorithm>
#include <fstream>
#include <sstream>

#include <json.hpp>

#include "libexpert/csv.hpp"
#include "libexpert/errors.hpp"
#include "libexpert/numfmt.hpp"

namespace libexpert {

std::size_t FeatureMatrix::column_index(std::string_view name) const {
  for (std::size_t i = 0; i < columns.size(); ++i) {
    if (columns[i] == name) return i;
  }
  throw Error("unknown column: " + std::string(name));
}

std::vector<std::size_t> FeatureMatrix::active_indices() const {
  std::vector<std::size_t> idx;
  for (std::size_t i = 0; i < columns.size(); ++i) {
    if (active[i]) idx.push_back(i);
  }
  return idx;
}

std::vector<std::vector<double>> FeatureMatrix::active_rows() const {
  const auto idx = active_indices();
  std::vector<std::vector<double>> out(rows.size());
  for (std::size_t r = 0; r < rows.size(); ++r) {
    out[r].reserve(idx.size());
    for (const auto c : idx) out[r].push_back(rows[r][c]);
  }
  return out;
}

std::vector<std::string> FeatureMatrix::active_columns() const {
  std::vector<std::string> out;
  for (const auto c : active_indices()) out.push_back(columns[c]);
  return out;
}

std::vector<double> FeatureMatrix::column(std::size_t index) const {
  std::vector<double> out;
  out.reserve(rows.size());
  for (const auto& row : rows) out.push_back(row[index]);
  return out;
}

FeatureMatrix matrix_from_vectors(const std::vector<FeatureVector>& vectors) {
  FeatureMatrix m;
  m.columns.assign(kFeatureNames.begin(), kFeatureNames.end());
  m.active.assign(m.columns.size(), true);
  m.row_ids.reserve(vectors.size());
  m.rows.reserve(vectors.size());
  for (const auto& v : vectors) {
    m.row_ids.push_back(v.developer);
    const auto values = v.values();
    std::vector<double> row;
    row.reserve(values.size());
    for (const auto& cell : values) row.push_back(cell ? *cell : missing_cell());
    m.rows.push_back(std::move(row));
  }
  return m;
}

ColumnTransform& TransformLog::entry(std::string_view column) {
  for (auto& t : columns) {
    if (t.column == column) return t;
  }
  columns.emplace_back();
  columns.back().column = std::string(column);
  return columns.back();
}

const ColumnTransform* TransformLog::find(std::string_view column) const {
  for (const auto& t : columns) {
    if (t.column == column) return &t;
  }
  return nullptr;
}

std::string transform_log_to_json(const TransformLog& log) {
  nlohmann::json j;
  j["columns"] = nlohmann::json::array();
  for (const auto& t : log.columns) {
    j["columns"].push_back({{"column", t.column},
                            {"imputation", t.imputation},
                            {"fill_value", t.fill_value},
                            {"imputed_cells", t.imputed_cells},
                            {"dropped", t.dropped},
                            {"drop_reason", t.drop_reason},
                            {"log_transformed", t.log_transformed},
                            {"log_shift_min", t.log_shift_min},
                            {"standardized", t.standardized},
                            {"mean", t.mean},
                            {"stddev", t.stddev}});
  }
  return j.dump(2) + "\n";
}

TransformLog transform_log_from_json(const std::string& text) {
  nlohmann::json j;
  try {
    j = nlohmann::json::parse(text);
  } catch (const nlohmann::json::parse_error& e) {
    throw ParseError("transform_log.json: " + std::string(e.what()),
                     e.byte > 0 ? e.byte - 1 : 0);
  }
  TransformLog log;
  for (const auto& tj : j.at("columns")) {
    ColumnTransform t;
    t.column = tj.at("column").get<std::string>();
    t.imputation = tj.at("imputation").get<std::string>();
    t.fill_value = tj.at("fill_value").get<double>();
    t.imputed_cells = tj.at("imputed_cells").get<std::int64_t>();
    t.dropped = tj.at("dropped").get<bool>();
    t.drop_reason = tj.at("drop_reason").get<std::string>();
    t.log_transformed = tj.at("log_transformed").get<bool>();
    t.log_shift_min = tj.at("log_shift_min").get<double>();
    t.standardized = tj.at("standardized").get<bool>();
    t.mean = tj.at("mean").get<double>();
    t.stddev = tj.at("stddev").get<double>();
    log.columns.push_back(std::move(t));
  }
  return log;
}

void save_transform_log(const std::filesystem::path& path, const TransformLog& log) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error("cannot write " + path.string());
  out << transform_log_to_json(log);
}

TransformLog load_transform_log(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error("cannot read " + path.string());
  std::ostringstream buf;
  buf << in.rdbuf();
  return transform_log_from_json(buf.str());
}

std::vector<double> replay_row(const std::array<std::optional<double>, kFeatureCount>& raw,
                               const TransformLog& log) {
  const double imports = raw[feature_index("imports")].value_or(0.0);
  std::vector<double> out;
  for (std::size_t i = 0; i < kFeatureCount; ++i) {
    const ColumnTransform* t = log.find(kFeatureNames[i]);
    if (!t) throw Error(std::string("transform log lacks column ") + kFeatureNames[i]);
    if (t->dropped) continue;

    double v;
    if (raw[i]) {
      v = *raw[i];
    } else if (t->imputation == "zero") {
      v = 0.0;
    } else if (t->imputation == "max_observed") {
      v = t->fill_value;
    } else if (t->imputation == "imports_rule") {
      v = imports <= 0 ? -1.0 : 0.0;
    } else {
      throw Error(std::string("missing value with no imputation rule for ") + kFeatureNames[i]);
    }

    if (t->log_transformed) {
      v = std::log1p(std::max(v, t->log_shift_min) - t->log_shift_min);
    }
    if (t->standardized) {
      v -= t->mean;
      if (t->stddev > 0) v /= t->stddev;
    }
    out.push_back(v);
  }
  return out;
}

std::string matrix_to_csv(const FeatureMatrix& m) {
  std::vector<std::string> header = m.active_columns();
  header.push_back("developer");
  std::string out = csv_write_row(header);
  const auto idx = m.active_indices();
  for (std::size_t r = 0; r < m.n_rows(); ++r) {
    std::vector<std::string> row;
    row.reserve(idx.size() + 1);
    for (const auto c : idx) {
      row.push_back(is_missing(m.rows[r][c]) ? "" : format_double(m.rows[r][c]));
    }
    row.push_back(m.row_ids[r]);
    out += csv_write_row(row);
  }
  return out;
}

FeatureMatrix matrix_from_csv(const std::string& text) {
  const auto rows = csv_parse(text);
  if (rows.empty() || rows[0].empty() || rows[0].back() != "developer") {
    throw ParseError("matrix csv: missing header ending in 'developer'", 0);
  }
  FeatureMatrix m;
  m.columns.assign(rows[0].begin(), rows[0].end() - 1);
  m.active.assign(m.columns.size(), true);
  for (std::size_t i = 1; i < rows.size(); ++i) {
    const auto& row = rows[i];
    if (row.size() != rows[0].size()) {
      throw ParseError("matrix csv: row " + std::to_string(i + 1) + " width mismatch", 0);
    }
    std::vector<double> values;
    values.reserve(m.columns.size());
    for (std::size_t c = 0; c + 1 < row.size(); ++c) {
      values.push_back(row[c].empty() ? missing_cell() : parse_double(row[c]));
    }
    m.rows.push_back(std::move(values));
    m.row_ids.push_back(row.back());
  }
  return m;
}

void save_matrix(const std::filesystem::path& path, const FeatureMatrix& m) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error("cannot write " + path.string());
  out << matrix_to_csv(m);
}

FeatureMatrix load_matrix(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error("cannot read " + path.string());
  std::ostringstream buf;
  buf << in.rdbuf();
  return matrix_from_csv(buf.str());
}

}  // namespace libexpert
