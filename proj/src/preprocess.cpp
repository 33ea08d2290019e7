#include "libexpert/preprocess.hpp"

#include <algorithm>
#include <cmath>

#include "libexpert/errors.hpp"

namespace libexpert {

namespace {

double column_mean(const std::vector<double>& x) {
  double sum = 0;
  for (const auto v : x) sum += v;
  return sum / static_cast<double>(x.size());
}

double column_median(std::vector<double> x) {
  std::sort(x.begin(), x.end());
  const std::size_t n = x.size();
  if (n % 2 == 1) return x[n / 2];
  return (x[n / 2 - 1] + x[n / 2]) / 2.0;
}

double population_sd(const std::vector<double>& x, double mean) {
  double ss = 0;
  for (const auto v : x) ss += (v - mean) * (v - mean);
  return std::sqrt(ss / static_cast<double>(x.size()));
}

void require_no_missing(const FeatureMatrix& m, const char* op) {
  for (const auto& row : m.rows) {
    for (std::size_t c = 0; c < row.size(); ++c) {
      if (m.active[c] && is_missing(row[c])) {
        throw ContractError(std::string(op) + ": matrix still has missing cells");
      }
    }
  }
}

}  // namespace

double pearson(const std::vector<double>& x, const std::vector<double>& y) {
  if (x.size() != y.size() || x.empty()) {
    throw ContractError("pearson: length mismatch or empty input");
  }
  const double mx = column_mean(x);
  const double my = column_mean(y);
  double sxy = 0, sxx = 0, syy = 0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    sxy += (x[i] - mx) * (y[i] - my);
    sxx += (x[i] - mx) * (x[i] - mx);
    syy += (y[i] - my) * (y[i] - my);
  }
  if (sxx == 0 || syy == 0) return 0.0;
  return sxy / std::sqrt(sxx * syy);
}

void impute_missing(FeatureMatrix& m, TransformLog& log) {
  if (m.n_rows() == 0) return;
  const std::size_t c_first = m.column_index("daysSinceFirstImport");
  const std::size_t c_last = m.column_index("daysSinceLastImport");
  const std::size_t c_between = m.column_index("daysBetweenImports");
  const std::size_t c_avg_import = m.column_index("avgDaysCommitsImportLibrary");
  const std::size_t c_imports = m.column_index("imports");

  auto& t_first = log.entry("daysSinceFirstImport");
  auto& t_last = log.entry("daysSinceLastImport");
  auto& t_between = log.entry("daysBetweenImports");
  auto& t_avg = log.entry("avgDaysCommitsImportLibrary");
  t_first.imputation = "zero";
  t_last.imputation = "zero";
  t_between.imputation = "imports_rule";
  t_avg.imputation = "max_observed";

  double avg_max = -std::numeric_limits<double>::infinity();
  bool avg_seen = false;
  for (const auto& row : m.rows) {
    if (!is_missing(row[c_avg_import])) {
      avg_max = std::max(avg_max, row[c_avg_import]);
      avg_seen = true;
    }
  }

  for (auto& row : m.rows) {
    if (is_missing(row[c_first])) {
      row[c_first] = 0.0;
      ++t_first.imputed_cells;
    }
    if (is_missing(row[c_last])) {
      row[c_last] = 0.0;
      ++t_last.imputed_cells;
    }
    if (is_missing(row[c_between])) {
      row[c_between] = row[c_imports] <= 0 ? -1.0 : 0.0;
      ++t_between.imputed_cells;
    }
    if (is_missing(row[c_avg_import])) {
      if (!avg_seen) {
        throw Error(
            "cannot impute avgDaysCommitsImportLibrary: no observed value in the column");
      }
      row[c_avg_import] = avg_max;
      ++t_avg.imputed_cells;
    }
  }
  if (avg_seen) t_avg.fill_value = avg_max;

  for (std::size_t c = 0; c < m.n_cols(); ++c) {
    for (const auto& row : m.rows) {
      if (is_missing(row[c])) {
        throw ContractError("column " + m.columns[c] + " still missing after imputation");
      }
    }
  }
}

std::vector<std::pair<std::string, std::string>> prune_correlated(FeatureMatrix& m,
                                                                  TransformLog& log,
                                                                  double threshold) {
  if (m.n_rows() < 2) throw Error("correlation pruning needs at least 2 rows");
  require_no_missing(m, "prune_correlated");

  std::vector<std::pair<std::string, std::string>> dropped;
  for (;;) {
    const auto idx = m.active_indices();
    const std::size_t k = idx.size();
    if (k < 2) break;

    std::vector<std::vector<double>> cols(k);
    for (std::size_t a = 0; a < k; ++a) cols[a] = m.column(idx[a]);

    std::vector<std::vector<double>> r(k, std::vector<double>(k, 0.0));
    for (std::size_t a = 0; a < k; ++a) {
      for (std::size_t b = a + 1; b < k; ++b) {
        r[a][b] = r[b][a] = pearson(cols[a], cols[b]);
      }
    }

    // Largest |r| above threshold; ties resolved toward the earlier column
    // pair in the fixed order (idx is ascending, so the scan order does it).
    std::size_t best_a = 0, best_b = 0;
    double best = threshold;
    for (std::size_t a = 0; a < k; ++a) {
      for (std::size_t b = a + 1; b < k; ++b) {
        if (std::fabs(r[a][b]) > best) {
          best = std::fabs(r[a][b]);
          best_a = a;
          best_b = b;
        }
      }
    }
    if (best_a == best_b) break;  // nothing above threshold

    auto mean_abs = [&](std::size_t a) {
      double sum = 0;
      for (std::size_t b = 0; b < k; ++b) {
        if (b != a) sum += std::fabs(r[a][b]);
      }
      return sum / static_cast<double>(k - 1);
    };
    // Drop the column with the larger mean absolute correlation; on a tie
    // the later column in the fixed order goes.
    const std::size_t victim = mean_abs(best_a) > mean_abs(best_b) ? best_a : best_b;
    const std::size_t keeper = victim == best_a ? best_b : best_a;

    const std::string& victim_name = m.columns[idx[victim]];
    const std::string& keeper_name = m.columns[idx[keeper]];
    m.active[idx[victim]] = false;
    auto& t = log.entry(victim_name);
    t.dropped = true;
    t.drop_reason = "|r|=" + std::to_string(best) + " with " + keeper_name;
    dropped.emplace_back(victim_name, t.drop_reason);
  }
  return dropped;
}

std::vector<std::string> transform_skewed(FeatureMatrix& m, TransformLog& log) {
  require_no_missing(m, "transform_skewed");
  std::vector<std::string> transformed;
  for (const auto c : m.active_indices()) {
    const auto col = m.column(c);
    if (col.empty()) continue;
    const double mean = column_mean(col);
    const double median = column_median(col);
    const bool skewed =
        (median > 0 && mean >= 4.0 * median) || (median <= 0 && mean > 0);
    if (!skewed) continue;
    const double lo = *std::min_element(col.begin(), col.end());
    for (auto& row : m.rows) row[c] = std::log1p(row[c] - lo);
    auto& t = log.entry(m.columns[c]);
    t.log_transformed = true;
    t.log_shift_min = lo;
    transformed.push_back(m.columns[c]);
  }
  return transformed;
}

void standardize(FeatureMatrix& m, TransformLog& log) {
  if (m.n_rows() < 2) throw Error("standardization needs at least 2 rows");
  require_no_missing(m, "standardize");
  for (const auto c : m.active_indices()) {
    const auto col = m.column(c);
    const double mean = column_mean(col);
    const double sd = population_sd(col, mean);
    for (auto& row : m.rows) {
      row[c] -= mean;
      if (sd > 0) row[c] /= sd;
    }
    auto& t = log.entry(m.columns[c]);
    t.standardized = true;
    t.mean = mean;
    t.stddev = sd;
  }
}

PreprocessResult preprocess(FeatureMatrix raw, bool with_standardize,
                            double correlation_threshold) {
  PreprocessResult result;
  result.log.columns.reserve(raw.n_cols());
  for (const auto& name : raw.columns) result.log.entry(name);
  impute_missing(raw, result.log);
  prune_correlated(raw, result.log, correlation_threshold);
  transform_skewed(raw, result.log);
  if (with_standardize) standardize(raw, result.log);
  result.matrix = std::move(raw);
  return result;
}

}  // namespace libexpert
