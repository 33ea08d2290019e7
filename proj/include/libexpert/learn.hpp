#pragma once

#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

#include "libexpert/forest.hpp"
#include "libexpert/labels.hpp"
#include "libexpert/metrics.hpp"
#include "libexpert/svm.hpp"

namespace libexpert {

enum class ClassifierKind { random_forest, max_margin, zero_r };

const char* classifier_kind_name(ClassifierKind kind);
ClassifierKind classifier_kind_from_name(std::string_view name);  // rf|svm|zeror aliases too

// One grid point; only the member matching `kind` is meaningful.
struct HyperPoint {
  ClassifierKind kind = ClassifierKind::zero_r;
  ForestParams forest;
  SvmParams svm;

  std::string describe() const;
};

// Default search grids. Forest: trees {100,300} x depth {unbounded,8} x
// per-split features {sqrt,log2}. Max-margin: linear and RBF kernels, cost
// {0.1,1,10,100}, RBF width {1/p, 1/(p*var)}. ZeroR: a single empty point.
std::vector<HyperPoint> default_grid(ClassifierKind kind);

struct SmoteSettings {
  bool enabled = true;
  int knn = 3;
  double pct = 0.30;
};

struct FoldScore {
  int fold = 0;
  double f_measure = 0;
};

struct CvOutcome {
  std::vector<int> fold_of;                 // per sample
  std::vector<int> predicted;               // per sample, from its test fold
  std::vector<std::vector<double>> scores;  // per sample class scores
  std::vector<FoldScore> fold_scores;
  double mean_f = 0;  // grid-search objective
};

// Stratified k-fold cross-validation of one grid point. Synthetic
// oversampling happens inside each training fold only: every class except
// the largest gains ceil(pct * n_c) synthetic rows. The stream label keeps
// different grid points on independent random substreams.
CvOutcome cross_validate(const HyperPoint& point, const std::vector<std::vector<double>>& rows,
                         const std::vector<int>& labels, int n_classes, int k,
                         const SmoteSettings& smote_cfg, std::uint64_t seed,
                         const std::string& stream_label,
                         const std::vector<std::string>& class_names);

struct GridSearchResult {
  std::size_t best_index = 0;
  HyperPoint best;
  CvOutcome best_outcome;
  std::vector<double> mean_f_per_point;
};

// Evaluates every grid point with the same fold assignment and returns the
// one with the best mean per-fold macro F (ties keep the earliest point).
GridSearchResult grid_search(const std::vector<HyperPoint>& grid,
                             const std::vector<std::vector<double>>& rows,
                             const std::vector<int>& labels, int n_classes, int k,
                             const SmoteSettings& smote_cfg, std::uint64_t seed,
                             const std::vector<std::string>& class_names,
                             unsigned threads = 1);

// Modal class; ties go to the lower class id.
int zero_r(const std::vector<int>& labels);

struct ClassifierReport {
  std::string classifier;
  std::string scheme;
  std::string library;
  std::vector<std::string> class_names;
  EvalResult eval;       // pooled over all test folds (ZeroR: resubstitution)
  double auc = 0.5;
  double mean_fold_f = 0;
  std::vector<FoldScore> fold_scores;
  std::vector<int> fold_assignment;
  std::string hyperparameters;
  std::uint64_t seed = 0;
};

// Full supervised track for one classifier kind: grid search (except
// ZeroR), pooled metrics, AUC.
ClassifierReport run_supervised(ClassifierKind kind, const LabelScheme& scheme,
                                const std::string& library,
                                const std::vector<std::vector<double>>& rows,
                                const std::vector<int>& labels, int k,
                                const SmoteSettings& smote_cfg, std::uint64_t seed,
                                unsigned threads = 1);

std::string reports_to_json(const std::vector<ClassifierReport>& reports);
void save_reports(const std::filesystem::path& path,
                  const std::vector<ClassifierReport>& reports);

}  // namespace libexpert
