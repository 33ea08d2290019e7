#include <cmath>
#include <vector>

#include "doctest.h"
#include "libexpert/errors.hpp"
#include "libexpert/forest.hpp"
#include "libexpert/rng.hpp"
#include "libexpert/svm.hpp"

using namespace libexpert;

namespace {

struct Xor {
  std::vector<std::vector<double>> rows = {{0, 0}, {1, 1}, {0, 1}, {1, 0}};
  std::vector<int> labels = {0, 0, 1, 1};
};

std::vector<std::vector<double>> blob_rows(int per_class, Rng& rng) {
  std::vector<std::vector<double>> rows;
  for (int cls = 0; cls < 3; ++cls) {
    for (int i = 0; i < per_class; ++i) {
      rows.push_back({10.0 * cls + rng.uniform01(), 10.0 * cls + rng.uniform01()});
    }
  }
  return rows;
}

std::vector<int> blob_labels(int per_class) {
  std::vector<int> labels;
  for (int cls = 0; cls < 3; ++cls) labels.insert(labels.end(), per_class, cls);
  return labels;
}

}  // namespace

TEST_CASE("forest memorizes well-separated blobs") {
  Rng data_rng(5);
  const auto rows = blob_rows(8, data_rng);
  const auto labels = blob_labels(8);

  ForestParams params;
  params.trees = 25;
  Rng rng(9);
  const auto forest = RandomForest::train(rows, labels, 3, params, rng);
  CHECK(forest.tree_count() == 25);
  CHECK(forest.n_classes() == 3);
  CHECK(forest.predict(rows) == labels);

  const auto scores = forest.predict_scores(rows);
  REQUIRE(scores.size() == rows.size());
  for (const auto& s : scores) {
    REQUIRE(s.size() == 3);
    double sum = 0;
    for (double v : s) {
      CHECK(v >= 0.0);
      sum += v;
    }
    CHECK(sum == doctest::Approx(1.0).epsilon(1e-12));
  }
}

TEST_CASE("forest training is reproducible for a fixed stream") {
  Rng data_rng(6);
  const auto rows = blob_rows(6, data_rng);
  const auto labels = blob_labels(6);
  ForestParams params;
  params.trees = 12;

  Rng a(31), b(31);
  const auto first = RandomForest::train(rows, labels, 3, params, a);
  const auto second = RandomForest::train(rows, labels, 3, params, b);
  CHECK(first.predict_scores(rows) == second.predict_scores(rows));
}

TEST_CASE("depth cap blocks the exclusive-or split that unbounded trees find") {
  // Duplicated XOR points (bootstrap still sees both classes almost surely).
  Xor base;
  std::vector<std::vector<double>> rows;
  std::vector<int> labels;
  for (int rep = 0; rep < 8; ++rep) {
    for (std::size_t i = 0; i < base.rows.size(); ++i) {
      rows.push_back(base.rows[i]);
      labels.push_back(base.labels[i]);
    }
  }

  ForestParams deep;
  deep.trees = 30;
  deep.feature_rule = ForestParams::FeatureRule::all;
  Rng rng_deep(3);
  const auto unbounded = RandomForest::train(rows, labels, 2, deep, rng_deep);
  CHECK(unbounded.predict(base.rows) == base.labels);

  ForestParams shallow = deep;
  shallow.max_depth = 1;  // one split cannot express XOR
  Rng rng_shallow(3);
  const auto stump = RandomForest::train(rows, labels, 2, shallow, rng_shallow);
  CHECK(stump.predict(base.rows) != base.labels);
}

TEST_CASE("forest rejects degenerate training sets") {
  Rng rng(1);
  ForestParams params;
  CHECK_THROWS_AS(RandomForest::train({}, {}, 2, params, rng), Error);
  CHECK_THROWS_AS(RandomForest::train({{1.0}, {2.0}}, {0, 0}, 2, params, rng), Error);
  CHECK_THROWS_AS(RandomForest::train({{1.0}, {2.0}}, {0, 5}, 2, params, rng), Error);
  params.trees = 0;
  CHECK_THROWS_AS(RandomForest::train({{1.0}, {2.0}}, {0, 1}, 2, params, rng), Error);
}

TEST_CASE("binary margin separates a linear problem") {
  const std::vector<std::vector<double>> rows = {{0, 0}, {0, 1}, {1, 0}, {4, 4}, {4, 5}, {5, 4}};
  const std::vector<int> y = {-1, -1, -1, +1, +1, +1};
  const auto svm = BinarySvm::train(rows, y, SvmParams::Kernel::linear, 10.0, 0.0);
  for (std::size_t i = 0; i < rows.size(); ++i) {
    CHECK(svm.decision(rows[i]) * y[i] > 0);
  }
  CHECK(svm.decision({-1, -1}) < 0);
  CHECK(svm.decision({6, 6}) > 0);

  CHECK_THROWS_AS(BinarySvm::train(rows, {1, 1, 1, 1, 1, 1}, SvmParams::Kernel::linear, 1, 0),
                  Error);
  CHECK_THROWS_AS(BinarySvm::train(rows, {1, 2, 1, 1, -1, -1}, SvmParams::Kernel::linear, 1, 0),
                  Error);
}

TEST_CASE("data-driven kernel width resolves per rule") {
  // Cells {0, 4}: mean 2, population variance 4.
  const std::vector<std::vector<double>> rows = {{0.0}, {4.0}};
  CHECK(resolve_gamma(rows, SvmParams::GammaRule::one_over_p) == doctest::Approx(1.0));
  CHECK(resolve_gamma(rows, SvmParams::GammaRule::one_over_p_var) == doctest::Approx(0.25));

  // Zero variance falls back to 1/p.
  const std::vector<std::vector<double>> flat = {{3.0, 3.0}, {3.0, 3.0}};
  CHECK(resolve_gamma(flat, SvmParams::GammaRule::one_over_p_var) == doctest::Approx(0.5));
  CHECK_THROWS_AS(resolve_gamma({}, SvmParams::GammaRule::one_over_p), Error);
}

TEST_CASE("radial kernel solves exclusive-or where linear cannot") {
  const Xor data;

  SvmParams rbf;
  rbf.kernel = SvmParams::Kernel::rbf;
  rbf.cost = 10.0;
  rbf.gamma_rule = SvmParams::GammaRule::one_over_p_var;
  const auto curved = MaxMarginClassifier::train(data.rows, data.labels, 2, rbf);
  // XOR cells: mean 0.5, population variance 0.25, two features.
  CHECK(curved.gamma() == doctest::Approx(2.0));
  CHECK(curved.predict(data.rows) == data.labels);

  SvmParams linear;
  linear.cost = 10.0;
  const auto straight = MaxMarginClassifier::train(data.rows, data.labels, 2, linear);
  CHECK(straight.predict(data.rows) != data.labels);
}

TEST_CASE("pairwise votes settle three classes") {
  Rng data_rng(8);
  const auto rows = blob_rows(6, data_rng);
  const auto labels = blob_labels(6);

  SvmParams params;
  params.cost = 10.0;
  const auto model = MaxMarginClassifier::train(rows, labels, 3, params);
  CHECK(model.predict(rows) == labels);

  const auto scores = model.predict_scores(rows);
  for (std::size_t i = 0; i < rows.size(); ++i) {
    REQUIRE(scores[i].size() == 3);
    double sum = 0;
    for (double v : scores[i]) sum += v;
    CHECK(sum == doctest::Approx(1.0).epsilon(1e-12));
    CHECK(scores[i][static_cast<std::size_t>(labels[i])] > 0.5);
  }

  CHECK_THROWS_AS(MaxMarginClassifier::train(rows, std::vector<int>(rows.size(), 1), 3, params),
                  Error);
  CHECK_THROWS_AS(MaxMarginClassifier::train({}, {}, 3, params), Error);
}

TEST_CASE("margin training is deterministic") {
  Rng data_rng(12);
  const auto rows = blob_rows(5, data_rng);
  const auto labels = blob_labels(5);
  SvmParams params;
  params.kernel = SvmParams::Kernel::rbf;
  params.cost = 5.0;
  const auto first = MaxMarginClassifier::train(rows, labels, 3, params);
  const auto second = MaxMarginClassifier::train(rows, labels, 3, params);
  CHECK(first.predict_scores(rows) == second.predict_scores(rows));
}
