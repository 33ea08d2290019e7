#pragma once

#include <string>
#include <utility>
#include <vector>

#include "libexpert/matrix.hpp"

namespace libexpert {

// The three cleaning steps run in a fixed order: impute -> prune ->
// log-transform. Standardization is separate because only the clustering
// track uses it.

// Fills missing cells in place: daysSinceFirstImport/daysSinceLastImport
// with 0, avgDaysCommitsImportLibrary with the maximum observed value
// (error when the whole column is missing), daysBetweenImports with 0 when
// imports = 1 and -1 when imports = 0.
void impute_missing(FeatureMatrix& m, TransformLog& log);

// Greedy pruning: while some active pair has |Pearson r| above the
// threshold, take the largest-|r| pair and deactivate the member with the
// larger mean absolute correlation against the other active columns (ties:
// the later column in the fixed order is dropped). Zero-variance columns
// correlate 0 with everything. Returns (column, reason) per drop.
std::vector<std::pair<std::string, std::string>> prune_correlated(FeatureMatrix& m,
                                                                  TransformLog& log,
                                                                  double threshold = 0.7);

// A column is skewed when mean >= 4 * median (median > 0), or when
// median <= 0 and mean > 0. Skewed columns become ln(1 + x - min(x)).
// Returns the transformed column names.
std::vector<std::string> transform_skewed(FeatureMatrix& m, TransformLog& log);

// Centers each active column to mean 0 and scales to population standard
// deviation 1; zero-variance columns are centered only.
void standardize(FeatureMatrix& m, TransformLog& log);

struct PreprocessResult {
  FeatureMatrix matrix;
  TransformLog log;
};

// impute -> prune -> transform; optionally standardize for clustering.
PreprocessResult preprocess(FeatureMatrix raw, bool with_standardize = false,
                            double correlation_threshold = 0.7);

// Pearson correlation with population moments; 0 when either side has zero
// variance. Exposed for tests and for the pruning heatmap report.
double pearson(const std::vector<double>& x, const std::vector<double>& y);

}  // namespace libexpert
