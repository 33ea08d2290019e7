#include <vector>

#include "doctest.h"
#include "libexpert/errors.hpp"
#include "libexpert/learn.hpp"
#include "libexpert/metrics.hpp"

using namespace libexpert;

namespace {

// Truth vector from per-class counts, plus the constant modal prediction and
// its one-hot score matrix.
struct BaselineSetup {
  std::vector<int> truth;
  std::vector<int> predicted;
  std::vector<std::vector<double>> scores;
};

BaselineSetup modal_baseline(const std::vector<int>& counts) {
  BaselineSetup setup;
  for (std::size_t cls = 0; cls < counts.size(); ++cls)
    for (int i = 0; i < counts[cls]; ++i) setup.truth.push_back(static_cast<int>(cls));
  const int modal = zero_r(setup.truth);
  std::vector<double> one_hot(counts.size(), 0.0);
  one_hot[static_cast<std::size_t>(modal)] = 1.0;
  setup.predicted.assign(setup.truth.size(), modal);
  setup.scores.assign(setup.truth.size(), one_hot);
  return setup;
}

}  // namespace

TEST_CASE("perfect agreement scores perfectly") {
  const std::vector<int> labels = {0, 1, 2, 0, 1, 2};
  const auto eval = evaluate(labels, labels, 3);
  CHECK(eval.kappa == doctest::Approx(1.0));
  CHECK(eval.f_measure == doctest::Approx(1.0));
  for (const auto& cls : eval.per_class) {
    CHECK(cls.precision == 1.0);
    CHECK(cls.recall == 1.0);
  }
}

TEST_CASE("worked three-class confusion matrix") {
  const std::vector<int> truth = {0, 0, 1, 1, 2, 2};
  const std::vector<int> predicted = {0, 1, 1, 1, 2, 0};
  const auto eval = evaluate(truth, predicted, 3);
  CHECK(eval.confusion[0][0] == 1);
  CHECK(eval.confusion[0][1] == 1);
  CHECK(eval.confusion[2][0] == 1);
  CHECK(eval.per_class[0].precision == doctest::Approx(0.5));
  CHECK(eval.per_class[1].precision == doctest::Approx(2.0 / 3.0));
  CHECK(eval.per_class[2].precision == doctest::Approx(1.0));
  CHECK(eval.per_class[1].recall == doctest::Approx(1.0));
  CHECK(eval.macro_precision == doctest::Approx(13.0 / 18.0).epsilon(1e-12));
  CHECK(eval.macro_recall == doctest::Approx(2.0 / 3.0).epsilon(1e-12));
  CHECK(eval.f_measure == doctest::Approx(52.0 / 75.0).epsilon(1e-12));
  CHECK(eval.kappa == doctest::Approx(0.5).epsilon(1e-12));
}

TEST_CASE("never-predicted and never-present classes score zero") {
  const std::vector<int> truth = {0, 0, 1};
  const std::vector<int> predicted = {0, 0, 0};
  const auto eval = evaluate(truth, predicted, 3);
  CHECK(eval.per_class[1].precision == 0.0);  // never predicted
  CHECK(eval.per_class[1].recall == 0.0);
  CHECK(eval.per_class[2].precision == 0.0);  // never present at all
  CHECK(eval.per_class[2].recall == 0.0);

  CHECK_THROWS_AS(evaluate({0, 0, 0}, {0, 0, 0}, 2), Error);  // single-class truth
  CHECK_THROWS_AS(evaluate({0, 1}, {0}, 2), Error);           // length mismatch
}

TEST_CASE("modal baseline on a 54/110/254 class split") {
  const auto setup = modal_baseline({54, 110, 254});
  CHECK(setup.predicted[0] == 2);
  const auto eval = evaluate(setup.truth, setup.predicted, 3);
  CHECK(eval.per_class[2].precision == doctest::Approx(254.0 / 418.0).epsilon(1e-12));
  CHECK(eval.per_class[2].precision == doctest::Approx(0.61).epsilon(0.01));
  CHECK(eval.per_class[2].recall == 1.0);
  CHECK(eval.per_class[0].precision == 0.0);
  CHECK(eval.per_class[1].recall == 0.0);
  CHECK(eval.f_measure == doctest::Approx(254.0 / 1008.0).epsilon(1e-12));
  CHECK(eval.kappa == doctest::Approx(0.0));
  CHECK(multiclass_auc(setup.truth, setup.scores, 3) == doctest::Approx(0.5));
}

TEST_CASE("modal baseline F lands near 0.19 on the two smaller splits") {
  const auto mongo = modal_baseline({18, 23, 27});
  const auto mongo_eval = evaluate(mongo.truth, mongo.predicted, 3);
  CHECK(mongo_eval.f_measure == doctest::Approx(18.0 / 95.0).epsilon(1e-12));
  CHECK(mongo_eval.kappa == doctest::Approx(0.0));

  const auto socket = modal_baseline({36, 32, 21});
  CHECK(socket.predicted[0] == 0);  // the modal class here is the first
  const auto socket_eval = evaluate(socket.truth, socket.predicted, 3);
  CHECK(socket_eval.f_measure == doctest::Approx(0.192).epsilon(1e-12));
  CHECK(socket_eval.kappa == doctest::Approx(0.0));
  CHECK(multiclass_auc(socket.truth, socket.scores, 3) == doctest::Approx(0.5));
}

TEST_CASE("midranks average tied positions") {
  CHECK(midranks({10, 20, 30}) == std::vector<double>{1, 2, 3});
  CHECK(midranks({10, 20, 20, 30}) == std::vector<double>{1, 2.5, 2.5, 4});
  CHECK(midranks({5, 5, 5}) == std::vector<double>{2, 2, 2});
}

TEST_CASE("multiclass AUC matches the pairwise midrank oracle") {
  const std::vector<int> truth = {0, 0, 1, 1, 2, 2, 0, 1};
  const std::vector<std::vector<double>> scores = {
      {0.6, 0.3, 0.1}, {0.2, 0.5, 0.3}, {0.3, 0.4, 0.3}, {0.5, 0.4, 0.1},
      {0.1, 0.3, 0.6}, {0.4, 0.3, 0.3}, {0.4, 0.4, 0.2}, {0.3, 0.3, 0.4},
  };
  CHECK(multiclass_auc(truth, scores, 3) ==
        doctest::Approx(0.6990740740740741).epsilon(1e-12));
}

TEST_CASE("constant scores give exactly one half") {
  const std::vector<int> truth = {0, 1, 2, 0, 1, 2, 0};
  const std::vector<std::vector<double>> flat(truth.size(), {0.25, 0.5, 0.25});
  CHECK(multiclass_auc(truth, flat, 3) == 0.5);
}

TEST_CASE("absent classes drop their pairs from the AUC mean") {
  // Class 2 never occurs: only the (0,1) pair contributes.
  const std::vector<int> truth = {0, 0, 1, 1};
  const std::vector<std::vector<double>> scores = {
      {0.9, 0.1, 0.0}, {0.8, 0.2, 0.0}, {0.2, 0.8, 0.0}, {0.1, 0.9, 0.0}};
  CHECK(multiclass_auc(truth, scores, 3) == doctest::Approx(1.0));

  // No valid pair at all: fall back to one half.
  const std::vector<int> lone = {1, 1, 1};
  const std::vector<std::vector<double>> lone_scores(3, {0.5, 0.5, 0.0});
  CHECK(multiclass_auc(lone, lone_scores, 3) == 0.5);
}
