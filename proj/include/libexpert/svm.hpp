#pragma once

#include <string>
#include <vector>

namespace libexpert {

struct SvmParams {
  enum class Kernel { linear, rbf };
  Kernel kernel = Kernel::linear;
  double cost = 1.0;
  enum class GammaRule { one_over_p, one_over_p_var };
  GammaRule gamma_rule = GammaRule::one_over_p;  // only meaningful for rbf
};

const char* kernel_name(SvmParams::Kernel kernel);
const char* gamma_rule_name(SvmParams::GammaRule rule);

// Soft-margin binary classifier trained with sequential minimal
// optimization. Deterministic: the violating pair is chosen by the largest
// error gap, never randomly.
class BinarySvm {
 public:
  static BinarySvm train(const std::vector<std::vector<double>>& rows,
                         const std::vector<int>& y,  // +1 / -1
                         SvmParams::Kernel kernel, double cost, double gamma,
                         int max_sweeps = 200, double tolerance = 1e-3);

  double decision(const std::vector<double>& x) const;

 private:
  std::vector<std::vector<double>> support_;
  std::vector<double> alpha_y_;  // alpha_i * y_i for support vectors
  double bias_ = 0;
  SvmParams::Kernel kernel_ = SvmParams::Kernel::linear;
  double gamma_ = 0;
};

// One-vs-one multi-class wrapper; prediction is the pairwise majority vote
// and class scores are vote fractions.
class MaxMarginClassifier {
 public:
  static MaxMarginClassifier train(const std::vector<std::vector<double>>& rows,
                                   const std::vector<int>& labels, int n_classes,
                                   const SvmParams& params);

  std::vector<int> predict(const std::vector<std::vector<double>>& rows) const;
  std::vector<std::vector<double>> predict_scores(
      const std::vector<std::vector<double>>& rows) const;

  double gamma() const { return gamma_; }  // resolved width actually used

 private:
  struct Pair {
    int positive_class;  // decision >= 0 votes here
    int negative_class;
    BinarySvm svm;
  };
  std::vector<Pair> pairs_;
  int n_classes_ = 0;
  double gamma_ = 0;
};

// Resolved RBF width for a training matrix: 1/p or 1/(p * var) with var the
// population variance over all cells (falls back to 1/p when var is 0).
double resolve_gamma(const std::vector<std::vector<double>>& rows,
                     SvmParams::GammaRule rule);

}  // namespace libexpert
