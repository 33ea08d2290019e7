#pragma once

#include <cstdint>
#include <vector>

namespace libexpert {

struct ClassMetrics {
  double precision = 0;  // 0 when the class is never predicted
  double recall = 0;     // 0 when the class is never present
};

struct EvalResult {
  std::vector<std::vector<std::int64_t>> confusion;  // [truth][predicted]
  std::vector<ClassMetrics> per_class;
  double macro_precision = 0;
  double macro_recall = 0;
  double f_measure = 0;  // harmonic mean of macro precision and macro recall
  double kappa = 0;
};

// Confusion-matrix metrics over aligned label vectors with class ids in
// [0, n_classes). Truth must contain at least two distinct classes.
EvalResult evaluate(const std::vector<int>& truth, const std::vector<int>& predicted,
                    int n_classes);

// Multi-class AUC: unweighted mean over ordered class pairs of the
// two-class separability computed from per-class scores with midranks for
// ties. scores[i][c] is sample i's score for class c. Pairs where either
// class is absent from the truth are skipped; with no valid pair the result
// is 0.5. Constant scorers land on exactly 0.5.
double multiclass_auc(const std::vector<int>& truth,
                      const std::vector<std::vector<double>>& scores, int n_classes);

// Midranks (1-based, ties averaged) of the values.
std::vector<double> midranks(const std::vector<double>& values);

}  // namespace libexpert
