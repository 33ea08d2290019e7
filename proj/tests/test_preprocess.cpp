#include <algorithm>
#include <cmath>
#include <optional>
#include <vector>

#include "doctest.h"
#include "libexpert/errors.hpp"
#include "libexpert/features.hpp"
#include "libexpert/matrix.hpp"
#include "libexpert/preprocess.hpp"

using namespace libexpert;

namespace {

FeatureVector base_vector(const std::string& dev) {
  FeatureVector v;
  v.developer = dev;
  v.library = "react";
  v.commits = 4;
  v.commits_client_files = 3;
  v.commits_import_library = 1;
  v.code_churn = 40;
  v.code_churn_client_files = 25;
  v.imports = 1;
  v.days_since_first_import = 5;
  v.days_since_last_import = 5;
  v.days_between_imports = 0;
  v.avg_days_commits_client_files = 4.0;
  v.avg_days_commits_import_library = std::nullopt;
  v.projects = 1;
  v.projects_import = 1;
  return v;
}

FeatureMatrix small_matrix(const std::vector<std::vector<double>>& columns,
                           const std::vector<std::string>& names) {
  FeatureMatrix m;
  m.columns = names;
  m.active.assign(names.size(), true);
  const std::size_t rows = columns[0].size();
  for (std::size_t r = 0; r < rows; ++r) {
    std::vector<double> row;
    for (const auto& col : columns) row.push_back(col[r]);
    m.rows.push_back(row);
    m.row_ids.push_back("r" + std::to_string(r));
  }
  return m;
}

}  // namespace

TEST_CASE("imputation applies the four per-column rules") {
  FeatureVector a = base_vector("a");  // imports = 0: everything missing
  a.imports = 0;
  a.commits_import_library = 0;
  a.days_since_first_import = std::nullopt;
  a.days_since_last_import = std::nullopt;
  a.days_between_imports = std::nullopt;

  FeatureVector b = base_vector("b");  // imports = 1 with a hand-made gap
  b.days_between_imports = std::nullopt;

  FeatureVector c = base_vector("c");
  c.imports = 3;
  c.commits_import_library = 3;
  c.days_since_first_import = 12;
  c.days_since_last_import = 2;
  c.days_between_imports = 10;
  c.avg_days_commits_import_library = 5.0;

  FeatureVector d = base_vector("d");
  d.imports = 2;
  d.commits_import_library = 2;
  d.days_since_first_import = 9;
  d.days_since_last_import = 9;
  d.avg_days_commits_import_library = 12.0;

  FeatureMatrix m = matrix_from_vectors({a, b, c, d});
  TransformLog log;
  impute_missing(m, log);

  for (const auto& row : m.rows)
    for (const double cell : row) CHECK(!is_missing(cell));

  CHECK(m.column(m.column_index("daysSinceFirstImport")) ==
        std::vector<double>{0, 5, 12, 9});
  CHECK(m.column(m.column_index("daysSinceLastImport")) == std::vector<double>{0, 5, 2, 9});
  CHECK(m.column(m.column_index("daysBetweenImports")) == std::vector<double>{-1, 0, 10, 0});
  // Maximum observed value fills the average-gap column.
  CHECK(m.column(m.column_index("avgDaysCommitsImportLibrary")) ==
        std::vector<double>{12, 12, 5, 12});

  CHECK(log.find("daysSinceFirstImport")->imputation == "zero");
  CHECK(log.find("daysSinceFirstImport")->imputed_cells == 1);
  CHECK(log.find("daysBetweenImports")->imputation == "imports_rule");
  CHECK(log.find("daysBetweenImports")->imputed_cells == 2);
  CHECK(log.find("avgDaysCommitsImportLibrary")->imputation == "max_observed");
  CHECK(log.find("avgDaysCommitsImportLibrary")->fill_value == 12.0);
  CHECK(log.find("avgDaysCommitsImportLibrary")->imputed_cells == 2);
}

TEST_CASE("imputation is the identity on a complete matrix") {
  FeatureVector c = base_vector("c");
  c.imports = 2;
  c.commits_import_library = 2;
  c.avg_days_commits_import_library = 7.0;
  FeatureVector d = c;
  d.developer = "d";
  d.avg_days_commits_import_library = 3.0;

  FeatureMatrix m = matrix_from_vectors({c, d});
  const auto before = m.rows;
  TransformLog log;
  impute_missing(m, log);
  CHECK(m.rows == before);
}

TEST_CASE("imputation fails honestly when no average gap was ever observed") {
  FeatureVector a = base_vector("a");
  FeatureVector b = base_vector("b");
  FeatureMatrix m = matrix_from_vectors({a, b});
  TransformLog log;
  CHECK_THROWS_AS(impute_missing(m, log), Error);
}

TEST_CASE("pearson matches the hand-computed oracle") {
  CHECK(pearson({1, 2, 3}, {6, 5, 1}) == doctest::Approx(-0.944911182523068).epsilon(1e-12));
  CHECK(pearson({1, 2, 3}, {2, 4, 6}) == doctest::Approx(1.0));
  CHECK(pearson({1, 2, 3}, {5, 5, 5}) == 0.0);  // zero variance side
}

TEST_CASE("pruning drops the scaled duplicate, later column on ties") {
  // B = 2A correlates 1.0 with A; both relate to C equally (r = 0.6), so the
  // tie sends the later column away.
  FeatureMatrix m = small_matrix({{1, 2, 3, 4}, {2, 4, 6, 8}, {2, 1, 4, 3}}, {"A", "B", "C"});
  TransformLog log;
  const auto dropped = prune_correlated(m, log);
  REQUIRE(dropped.size() == 1);
  CHECK(dropped[0].first == "B");
  CHECK(m.active_columns() == std::vector<std::string>{"A", "C"});
  CHECK(log.find("B")->dropped);
  CHECK(!log.find("A")->dropped);
}

TEST_CASE("pruning removes the member with the larger mean correlation") {
  // |r(A,B)| = 0.815 is the only pair above threshold; A leans harder on C
  // (|r(A,C)| = 0.536 vs |r(B,C)| = 0.463), so A is dropped and B survives.
  FeatureMatrix m = small_matrix(
      {{0, 7, 1, 8, 8, 1}, {8, 1, 7, 4, 1, 4}, {3, 3, 3, 7, 7, 6}}, {"A", "B", "C"});
  TransformLog log;
  const auto dropped = prune_correlated(m, log);
  REQUIRE(dropped.size() == 1);
  CHECK(dropped[0].first == "A");
  CHECK(m.active_columns() == std::vector<std::string>{"B", "C"});
}

TEST_CASE("pruning leaves uncorrelated and constant columns alone") {
  FeatureMatrix quiet = small_matrix({{1, 2, 3, 4}, {2, 1, 4, 3}}, {"A", "C"});
  TransformLog log;
  CHECK(prune_correlated(quiet, log).empty());
  CHECK(quiet.active_columns() == std::vector<std::string>{"A", "C"});

  // A constant column correlates 0 with everything and is never dropped.
  FeatureMatrix with_const =
      small_matrix({{5, 5, 5, 5}, {1, 2, 3, 4}, {2, 4, 6, 8}}, {"K", "E", "F"});
  TransformLog log2;
  const auto dropped = prune_correlated(with_const, log2);
  REQUIRE(dropped.size() == 1);
  CHECK((dropped[0].first == "E" || dropped[0].first == "F"));
  auto active = with_const.active_columns();
  CHECK(std::count(active.begin(), active.end(), "K") == 1);

  FeatureMatrix tiny = small_matrix({{1}, {2}}, {"A", "B"});
  TransformLog log3;
  CHECK_THROWS_AS(prune_correlated(tiny, log3), Error);
}

TEST_CASE("post-pruning no active pair exceeds the threshold") {
  FeatureMatrix m = small_matrix({{0, 7, 1, 8, 8, 1},
                                  {8, 1, 7, 4, 1, 4},
                                  {3, 3, 3, 7, 7, 6},
                                  {0, 14, 2, 16, 16, 2},
                                  {1, 8, 2, 9, 9, 2}},
                                 {"A", "B", "C", "D", "E"});
  TransformLog log;
  prune_correlated(m, log);
  const auto idx = m.active_indices();
  for (std::size_t i = 0; i < idx.size(); ++i) {
    for (std::size_t j = i + 1; j < idx.size(); ++j) {
      CHECK(std::abs(pearson(m.column(idx[i]), m.column(idx[j]))) <= 0.7 + 1e-12);
    }
  }
}

TEST_CASE("skew transform follows the mean-median rule") {
  FeatureMatrix m = small_matrix({{1, 1, 1, 1, 100},   // mean 20.8 >= 4 * 1
                                  {5, 5, 5, 5, 5},     // mean = median
                                  {-1, -1, -1, 2, 2},  // median <= 0, mean > 0
                                  {-2, -2, -2, 2, 2},  // median <= 0, mean <= 0
                                  {3, 4, 5, 6, 7}},    // mild
                                 {"hot", "flat", "mixed", "cold", "mild"});
  TransformLog log;
  const auto transformed = transform_skewed(m, log);
  CHECK(transformed == std::vector<std::string>{"hot", "mixed"});

  const auto hot = m.column(m.column_index("hot"));
  CHECK(hot[0] == doctest::Approx(0.0));            // ln(1 + 1 - 1)
  CHECK(hot[4] == doctest::Approx(std::log(100)));  // ln(1 + 100 - 1)
  CHECK(log.find("hot")->log_transformed);
  CHECK(log.find("hot")->log_shift_min == 1.0);

  const auto mixed = m.column(m.column_index("mixed"));
  CHECK(mixed[0] == doctest::Approx(0.0));           // ln(1 + -1 - -1)
  CHECK(mixed[3] == doctest::Approx(std::log(4)));   // ln(1 + 2 - -1)
  CHECK(log.find("mixed")->log_shift_min == -1.0);

  CHECK(!log.find("flat")->log_transformed);
  CHECK(m.column(m.column_index("cold")) == std::vector<double>{-2, -2, -2, 2, 2});
}

TEST_CASE("standardize centers and scales with the population deviation") {
  FeatureMatrix m = small_matrix({{0, 10}, {7, 7}}, {"wide", "flat"});
  TransformLog log;
  standardize(m, log);
  CHECK(m.column(0) == std::vector<double>{-1, 1});
  CHECK(m.column(1) == std::vector<double>{0, 0});  // constant: centered only
  CHECK(log.find("wide")->standardized);
  CHECK(log.find("wide")->mean == 5.0);
  CHECK(log.find("wide")->stddev == 5.0);
  CHECK(log.find("flat")->stddev == 0.0);

  FeatureMatrix one_row = small_matrix({{3}}, {"x"});
  TransformLog log2;
  CHECK_THROWS_AS(standardize(one_row, log2), Error);
}

TEST_CASE("standardization round-trips algebraically") {
  FeatureMatrix m = small_matrix({{1.5, 2.5, 9.0, -4.0}}, {"x"});
  const auto original = m.column(0);
  TransformLog log;
  standardize(m, log);
  const auto* entry = log.find("x");
  REQUIRE(entry != nullptr);
  for (std::size_t r = 0; r < m.rows.size(); ++r) {
    const double restored = m.rows[r][0] * entry->stddev + entry->mean;
    CHECK(restored == doctest::Approx(original[r]).epsilon(1e-12));
  }
}

TEST_CASE("transform log survives the JSON round-trip") {
  TransformLog log;
  auto& a = log.entry("daysBetweenImports");
  a.imputation = "imports_rule";
  a.imputed_cells = 3;
  auto& b = log.entry("codeChurn");
  b.log_transformed = true;
  b.log_shift_min = -1;
  b.standardized = true;
  b.mean = 2.5;
  b.stddev = 1.25;
  auto& c = log.entry("projectsImport");
  c.dropped = true;
  c.drop_reason = "correlated 0.93 with projects";

  const auto back = transform_log_from_json(transform_log_to_json(log));
  REQUIRE(back.columns.size() == 3);
  CHECK(back.find("daysBetweenImports")->imputation == "imports_rule");
  CHECK(back.find("daysBetweenImports")->imputed_cells == 3);
  CHECK(back.find("codeChurn")->log_transformed);
  CHECK(back.find("codeChurn")->log_shift_min == -1);
  CHECK(back.find("codeChurn")->stddev == 1.25);
  CHECK(back.find("projectsImport")->dropped);
  CHECK(back.find("projectsImport")->drop_reason == "correlated 0.93 with projects");
}

namespace {

// A small population with enough spread to exercise imputation, pruning and
// the log transform at once.
std::vector<FeatureVector> mixed_population() {
  std::vector<FeatureVector> all;
  for (int i = 0; i < 8; ++i) {
    FeatureVector v = base_vector("dev" + std::to_string(i));
    v.commits = 2 + 3 * i;
    v.commits_client_files = 1 + 2 * (i % 4);
    v.commits_import_library = i % 3;
    v.code_churn = 10 + 45 * i * i;
    v.code_churn_client_files = 5 + 20 * i;
    v.imports = i % 3;
    if (i % 3 == 0) {
      v.days_since_first_import = std::nullopt;
      v.days_since_last_import = std::nullopt;
      v.days_between_imports = std::nullopt;
      v.avg_days_commits_import_library = std::nullopt;
    } else {
      v.days_since_first_import = 10 + 11 * i;
      v.days_since_last_import = 3 + 2 * i;
      v.days_between_imports = 7 + 9 * i;
      v.avg_days_commits_import_library = i % 3 == 2 ? std::optional<double>(4.0 + i)
                                                     : std::nullopt;
    }
    v.avg_days_commits_client_files = 2.0 + 0.5 * (i % 5);
    v.projects = 1 + i % 3;
    v.projects_import = i % 3 == 0 ? 0 : 1;
    all.push_back(v);
  }
  return all;
}

}  // namespace

TEST_CASE("full preprocess wires the stages in order") {
  const auto population = mixed_population();
  const auto result = preprocess(matrix_from_vectors(population), false);

  for (const auto& row : result.matrix.rows)
    for (const double cell : row) CHECK(!is_missing(cell));
  const auto idx = result.matrix.active_indices();
  for (std::size_t i = 0; i < idx.size(); ++i)
    for (std::size_t j = i + 1; j < idx.size(); ++j)
      CHECK(std::abs(pearson(result.matrix.column(idx[i]), result.matrix.column(idx[j]))) <=
            0.7 + 1e-12);
  // No standardization requested; the log says so.
  for (const auto& entry : result.log.columns) CHECK(!entry.standardized);
}

TEST_CASE("replay_row reproduces in-sample standardized rows") {
  const auto population = mixed_population();
  const auto result = preprocess(matrix_from_vectors(population), true);

  const auto active = result.matrix.active_indices();
  for (std::size_t r = 0; r < population.size(); ++r) {
    const auto replayed = replay_row(population[r].values(), result.log);
    REQUIRE(replayed.size() == active.size());
    for (std::size_t c = 0; c < active.size(); ++c) {
      CHECK(replayed[c] == doctest::Approx(result.matrix.rows[r][active[c]]).epsilon(1e-9));
    }
  }
}

TEST_CASE("replay clamps log-transformed values below the training minimum") {
  FeatureMatrix m = small_matrix({{1, 1, 1, 1, 100}}, {"codeChurn"});
  TransformLog log;
  transform_skewed(m, log);
  REQUIRE(log.find("codeChurn")->log_transformed);

  std::array<std::optional<double>, kFeatureCount> raw{};
  for (std::size_t i = 0; i < kFeatureCount; ++i) raw[i] = 0.0;
  raw[feature_index("codeChurn")] = 0.5;  // below the training minimum of 1
  TransformLog only_churn;
  for (const char* name : kFeatureNames) {
    auto& entry = only_churn.entry(name);
    if (std::string_view(name) == "codeChurn") {
      entry = *log.find("codeChurn");
    } else {
      entry.dropped = true;
      entry.drop_reason = "not under test";
    }
  }
  const auto replayed = replay_row(raw, only_churn);
  REQUIRE(replayed.size() == 1);
  CHECK(replayed[0] == doctest::Approx(0.0));  // ln(1 + 1 - 1) at the clamp
}
