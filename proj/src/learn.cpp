#include "libexpert/learn.hpp"

#include <algorithm>
#include <fstream>
#include <map>

#include <json.hpp>

#include "libexpert/errors.hpp"
#include "libexpert/folds.hpp"
#include "libexpert/numfmt.hpp"
#include "libexpert/parallel.hpp"
#include "libexpert/smote.hpp"

namespace libexpert {

const char* classifier_kind_name(ClassifierKind kind) {
  switch (kind) {
    case ClassifierKind::random_forest: return "random_forest";
    case ClassifierKind::max_margin: return "max_margin";
    case ClassifierKind::zero_r: return "zero_r";
  }
  return "unknown";
}

ClassifierKind classifier_kind_from_name(std::string_view name) {
  if (name == "random-forest" || name == "random_forest" || name == "rf" || name == "forest") {
    return ClassifierKind::random_forest;
  }
  if (name == "max-margin" || name == "max_margin" || name == "svm") {
    return ClassifierKind::max_margin;
  }
  if (name == "zero-r" || name == "zero_r" || name == "zeror" || name == "baseline") {
    return ClassifierKind::zero_r;
  }
  throw Error("unknown classifier: " + std::string(name));
}

std::string HyperPoint::describe() const {
  switch (kind) {
    case ClassifierKind::random_forest:
      return "trees=" + std::to_string(forest.trees) +
             " depth=" + (forest.max_depth == 0 ? "unbounded" : std::to_string(forest.max_depth)) +
             " features=" + feature_rule_name(forest.feature_rule);
    case ClassifierKind::max_margin: {
      std::string out = std::string("kernel=") + kernel_name(svm.kernel) +
                        " cost=" + format_double(svm.cost);
      if (svm.kernel == SvmParams::Kernel::rbf) {
        out += std::string(" gamma=") + gamma_rule_name(svm.gamma_rule);
      }
      return out;
    }
    case ClassifierKind::zero_r:
      return "modal-class";
  }
  return "";
}

std::vector<HyperPoint> default_grid(ClassifierKind kind) {
  std::vector<HyperPoint> grid;
  switch (kind) {
    case ClassifierKind::random_forest:
      for (const int trees : {100, 300}) {
        for (const int depth : {0, 8}) {
          for (const auto rule :
               {ForestParams::FeatureRule::sqrt_p, ForestParams::FeatureRule::log2_p}) {
            HyperPoint point;
            point.kind = kind;
            point.forest.trees = trees;
            point.forest.max_depth = depth;
            point.forest.feature_rule = rule;
            grid.push_back(point);
          }
        }
      }
      break;
    case ClassifierKind::max_margin:
      for (const auto kernel : {SvmParams::Kernel::linear, SvmParams::Kernel::rbf}) {
        for (const double cost : {0.1, 1.0, 10.0, 100.0}) {
          if (kernel == SvmParams::Kernel::linear) {
            HyperPoint point;
            point.kind = kind;
            point.svm.kernel = kernel;
            point.svm.cost = cost;
            grid.push_back(point);
          } else {
            for (const auto rule :
                 {SvmParams::GammaRule::one_over_p, SvmParams::GammaRule::one_over_p_var}) {
              HyperPoint point;
              point.kind = kind;
              point.svm.kernel = kernel;
              point.svm.cost = cost;
              point.svm.gamma_rule = rule;
              grid.push_back(point);
            }
          }
        }
      }
      break;
    case ClassifierKind::zero_r: {
      HyperPoint point;
      point.kind = kind;
      grid.push_back(point);
      break;
    }
  }
  return grid;
}

int zero_r(const std::vector<int>& labels) {
  if (labels.empty()) throw Error("zero_r: empty label list");
  std::map<int, std::size_t> counts;
  for (const auto c : labels) ++counts[c];
  int best = labels[0];
  std::size_t best_count = 0;
  for (const auto& [cls, count] : counts) {  // ascending class id: ties keep the lower
    if (count > best_count) {
      best = cls;
      best_count = count;
    }
  }
  return best;
}

namespace {

struct TrainedModel {
  ClassifierKind kind;
  RandomForest forest{};
  MaxMarginClassifier svm{};
  int modal = 0;
  int n_classes = 0;

  std::vector<std::vector<double>> scores(const std::vector<std::vector<double>>& rows) const {
    switch (kind) {
      case ClassifierKind::random_forest: return forest.predict_scores(rows);
      case ClassifierKind::max_margin: return svm.predict_scores(rows);
      case ClassifierKind::zero_r: {
        std::vector<double> one_hot(n_classes, 0.0);
        one_hot[modal] = 1.0;
        return std::vector<std::vector<double>>(rows.size(), one_hot);
      }
    }
    return {};
  }
};

TrainedModel train_model(const HyperPoint& point, const std::vector<std::vector<double>>& rows,
                         const std::vector<int>& labels, int n_classes, Rng& rng) {
  TrainedModel model;
  model.kind = point.kind;
  model.n_classes = n_classes;
  switch (point.kind) {
    case ClassifierKind::random_forest:
      model.forest = RandomForest::train(rows, labels, n_classes, point.forest, rng);
      break;
    case ClassifierKind::max_margin:
      model.svm = MaxMarginClassifier::train(rows, labels, n_classes, point.svm);
      break;
    case ClassifierKind::zero_r:
      model.modal = zero_r(labels);
      break;
  }
  return model;
}

std::vector<int> argmax_labels(const std::vector<std::vector<double>>& scores) {
  std::vector<int> out;
  out.reserve(scores.size());
  for (const auto& s : scores) {
    out.push_back(static_cast<int>(std::max_element(s.begin(), s.end()) - s.begin()));
  }
  return out;
}

}  // namespace

CvOutcome cross_validate(const HyperPoint& point, const std::vector<std::vector<double>>& rows,
                         const std::vector<int>& labels, int n_classes, int k,
                         const SmoteSettings& smote_cfg, std::uint64_t seed,
                         const std::string& stream_label,
                         const std::vector<std::string>& class_names) {
  if (rows.size() != labels.size() || rows.empty()) {
    throw Error("cross_validate: empty rows or misaligned labels");
  }
  // The fold assignment depends only on the seed, so every grid point sees
  // the same folds.
  Rng fold_rng = derive_stream(seed, "folds");
  const auto fold_of = stratified_folds(labels, k, fold_rng, class_names);

  CvOutcome outcome;
  outcome.fold_of = fold_of;
  outcome.predicted.assign(rows.size(), -1);
  outcome.scores.assign(rows.size(), {});

  for (int fold = 0; fold < k; ++fold) {
    std::vector<std::vector<double>> train_rows;
    std::vector<int> train_labels;
    std::vector<std::size_t> test_index;
    for (std::size_t i = 0; i < rows.size(); ++i) {
      if (fold_of[i] == fold) {
        test_index.push_back(i);
      } else {
        train_rows.push_back(rows[i]);
        train_labels.push_back(labels[i]);
      }
    }
    if (test_index.empty()) throw Error("cross_validate: empty test fold");

    if (smote_cfg.enabled && point.kind != ClassifierKind::zero_r) {
      // Oversample every class but the largest, inside this training fold.
      std::map<int, std::vector<std::vector<double>>> per_class;
      for (std::size_t i = 0; i < train_rows.size(); ++i) {
        per_class[train_labels[i]].push_back(train_rows[i]);
      }
      std::size_t largest = 0;
      for (const auto& [cls, members] : per_class) largest = std::max(largest, members.size());
      for (const auto& [cls, members] : per_class) {
        if (members.size() == largest) continue;
        Rng smote_rng = derive_stream(
            seed, stream_label + "/smote/fold" + std::to_string(fold) + "/class" +
                      std::to_string(cls));
        auto synthetic = smote(members, smote_cfg.knn, smote_cfg.pct, smote_rng);
        for (auto& row : synthetic) {
          train_rows.push_back(std::move(row));
          train_labels.push_back(cls);
        }
      }
    }

    Rng train_rng =
        derive_stream(seed, stream_label + "/train/fold" + std::to_string(fold));
    const auto model = train_model(point, train_rows, train_labels, n_classes, train_rng);

    std::vector<std::vector<double>> test_rows;
    test_rows.reserve(test_index.size());
    for (const auto i : test_index) test_rows.push_back(rows[i]);
    const auto fold_scores = model.scores(test_rows);
    const auto fold_predicted = argmax_labels(fold_scores);

    std::vector<int> fold_truth;
    fold_truth.reserve(test_index.size());
    for (const auto i : test_index) fold_truth.push_back(labels[i]);
    const auto fold_eval = evaluate(fold_truth, fold_predicted, n_classes);
    outcome.fold_scores.push_back({fold, fold_eval.f_measure});

    for (std::size_t t = 0; t < test_index.size(); ++t) {
      outcome.predicted[test_index[t]] = fold_predicted[t];
      outcome.scores[test_index[t]] = fold_scores[t];
    }
  }

  double sum = 0;
  for (const auto& fs : outcome.fold_scores) sum += fs.f_measure;
  outcome.mean_f = sum / static_cast<double>(outcome.fold_scores.size());
  return outcome;
}

GridSearchResult grid_search(const std::vector<HyperPoint>& grid,
                             const std::vector<std::vector<double>>& rows,
                             const std::vector<int>& labels, int n_classes, int k,
                             const SmoteSettings& smote_cfg, std::uint64_t seed,
                             const std::vector<std::string>& class_names, unsigned threads) {
  if (grid.empty()) throw Error("grid_search: empty grid");
  std::vector<std::size_t> indexes(grid.size());
  for (std::size_t i = 0; i < indexes.size(); ++i) indexes[i] = i;

  const auto outcomes = parallel_map(
      indexes,
      [&](std::size_t i) {
        return cross_validate(grid[i], rows, labels, n_classes, k, smote_cfg, seed,
                              "grid" + std::to_string(i), class_names);
      },
      threads);

  GridSearchResult result;
  result.mean_f_per_point.reserve(outcomes.size());
  for (const auto& outcome : outcomes) result.mean_f_per_point.push_back(outcome.mean_f);
  std::size_t best = 0;
  for (std::size_t i = 1; i < outcomes.size(); ++i) {
    if (outcomes[i].mean_f > outcomes[best].mean_f) best = i;  // ties keep the earliest
  }
  result.best_index = best;
  result.best = grid[best];
  result.best_outcome = outcomes[best];
  return result;
}

ClassifierReport run_supervised(ClassifierKind kind, const LabelScheme& scheme,
                                const std::string& library,
                                const std::vector<std::vector<double>>& rows,
                                const std::vector<int>& labels, int k,
                                const SmoteSettings& smote_cfg, std::uint64_t seed,
                                unsigned threads) {
  ClassifierReport report;
  report.classifier = classifier_kind_name(kind);
  report.scheme = scheme.name;
  report.library = library;
  report.class_names = scheme.class_names;
  report.seed = seed;

  if (kind == ClassifierKind::zero_r) {
    // Constant-predictor baseline evaluated in place: the modal class of
    // the whole label set, predicted for every sample.
    const int modal = zero_r(labels);
    const std::vector<int> predicted(labels.size(), modal);
    report.eval = evaluate(labels, predicted, scheme.n_classes());
    std::vector<double> one_hot(scheme.n_classes(), 0.0);
    one_hot[modal] = 1.0;
    report.auc = multiclass_auc(
        labels, std::vector<std::vector<double>>(labels.size(), one_hot), scheme.n_classes());
    report.mean_fold_f = report.eval.f_measure;
    report.hyperparameters = "modal-class=" + scheme.class_names[modal];
    return report;
  }

  const auto search = grid_search(default_grid(kind), rows, labels, scheme.n_classes(), k,
                                  smote_cfg, seed, scheme.class_names, threads);
  report.eval = evaluate(labels, search.best_outcome.predicted, scheme.n_classes());
  report.auc = multiclass_auc(labels, search.best_outcome.scores, scheme.n_classes());
  report.mean_fold_f = search.best_outcome.mean_f;
  report.fold_scores = search.best_outcome.fold_scores;
  report.fold_assignment = search.best_outcome.fold_of;
  report.hyperparameters = search.best.describe();
  return report;
}

std::string reports_to_json(const std::vector<ClassifierReport>& reports) {
  nlohmann::json j;
  j["classifiers"] = nlohmann::json::array();
  for (const auto& r : reports) {
    nlohmann::json cj;
    cj["classifier"] = r.classifier;
    cj["scheme"] = r.scheme;
    cj["library"] = r.library;
    cj["hyperparameters"] = r.hyperparameters;
    cj["seed"] = r.seed;
    nlohmann::json precision, recall;
    for (std::size_t c = 0; c < r.class_names.size(); ++c) {
      precision[r.class_names[c]] = r.eval.per_class[c].precision;
      recall[r.class_names[c]] = r.eval.per_class[c].recall;
    }
    cj["precision"] = precision;
    cj["recall"] = recall;
    cj["f_measure"] = r.eval.f_measure;
    cj["kappa"] = r.eval.kappa;
    cj["auc"] = r.auc;
    cj["mean_fold_f"] = r.mean_fold_f;
    cj["fold_scores"] = nlohmann::json::array();
    for (const auto& fs : r.fold_scores) {
      cj["fold_scores"].push_back({{"fold", fs.fold}, {"f_measure", fs.f_measure}});
    }
    cj["fold_assignment"] = r.fold_assignment;
    cj["confusion"] = r.eval.confusion;
    j["classifiers"].push_back(std::move(cj));
  }
  return j.dump(2) + "\n";
}

void save_reports(const std::filesystem::path& path,
                  const std::vector<ClassifierReport>& reports) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error("cannot write " + path.string());
  out << reports_to_json(reports);
}

}  // namespace libexpert
