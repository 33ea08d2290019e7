#include "libexpert/svm.hpp"

#include <algorithm>
#include <cmath>

#include "libexpert/errors.hpp"

namespace libexpert {

const char* kernel_name(SvmParams::Kernel kernel) {
  switch (kernel) {
    case SvmParams::Kernel::linear: return "linear";
    case SvmParams::Kernel::rbf: return "rbf";
  }
  return "unknown";
}

const char* gamma_rule_name(SvmParams::GammaRule rule) {
  switch (rule) {
    case SvmParams::GammaRule::one_over_p: return "1/p";
    case SvmParams::GammaRule::one_over_p_var: return "1/(p*var)";
  }
  return "unknown";
}

namespace {

double kernel_value(SvmParams::Kernel kernel, double gamma, const std::vector<double>& a,
                    const std::vector<double>& b) {
  if (kernel == SvmParams::Kernel::linear) {
    double dot = 0;
    for (std::size_t i = 0; i < a.size(); ++i) dot += a[i] * b[i];
    return dot;
  }
  double d2 = 0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    const double diff = a[i] - b[i];
    d2 += diff * diff;
  }
  return std::exp(-gamma * d2);
}

}  // namespace

double resolve_gamma(const std::vector<std::vector<double>>& rows,
                     SvmParams::GammaRule rule) {
  if (rows.empty() || rows[0].empty()) throw Error("svm: empty training matrix");
  const double p = static_cast<double>(rows[0].size());
  if (rule == SvmParams::GammaRule::one_over_p) return 1.0 / p;
  double sum = 0, count = 0;
  for (const auto& row : rows) {
    for (const auto v : row) {
      sum += v;
      ++count;
    }
  }
  const double mean = sum / count;
  double ss = 0;
  for (const auto& row : rows) {
    for (const auto v : row) ss += (v - mean) * (v - mean);
  }
  const double var = ss / count;
  if (var <= 0) return 1.0 / p;
  return 1.0 / (p * var);
}

BinarySvm BinarySvm::train(const std::vector<std::vector<double>>& rows,
                           const std::vector<int>& y, SvmParams::Kernel kernel, double cost,
                           double gamma, int max_sweeps, double tolerance) {
  const std::size_t n = rows.size();
  if (n < 2 || y.size() != n) throw Error("svm: need at least two aligned samples");
  bool has_pos = false, has_neg = false;
  for (const auto v : y) {
    if (v == 1) has_pos = true;
    else if (v == -1) has_neg = true;
    else throw Error("svm: labels must be +1/-1");
  }
  if (!has_pos || !has_neg) throw Error("svm: single-class training data");

  // Precomputed kernel matrix; training sets are survey-sized.
  std::vector<std::vector<double>> k(n, std::vector<double>(n));
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = i; j < n; ++j) {
      k[i][j] = k[j][i] = kernel_value(kernel, gamma, rows[i], rows[j]);
    }
  }

  std::vector<double> alpha(n, 0.0);
  double b = 0;
  // Error cache: err[i] = f(x_i) - y_i, maintained incrementally.
  std::vector<double> err(n);
  for (std::size_t i = 0; i < n; ++i) err[i] = -y[i];

  const double eps = 1e-12;
  for (int sweep = 0; sweep < max_sweeps; ++sweep) {
    int changed = 0;
    for (std::size_t i = 0; i < n; ++i) {
      const double ei = err[i];
      const bool violates = (y[i] * ei < -tolerance && alpha[i] < cost) ||
                            (y[i] * ei > tolerance && alpha[i] > 0);
      if (!violates) continue;

      // Second index: largest |Ei - Ej| (deterministic; ties keep lowest j).
      std::size_t j = n;
      double best_gap = -1;
      for (std::size_t cand = 0; cand < n; ++cand) {
        if (cand == i) continue;
        const double gap = std::fabs(ei - err[cand]);
        if (gap > best_gap) {
          best_gap = gap;
          j = cand;
        }
      }
      if (j == n) continue;
      const double ej = err[j];

      double lo, hi;
      if (y[i] != y[j]) {
        lo = std::max(0.0, alpha[j] - alpha[i]);
        hi = std::min(cost, cost + alpha[j] - alpha[i]);
      } else {
        lo = std::max(0.0, alpha[i] + alpha[j] - cost);
        hi = std::min(cost, alpha[i] + alpha[j]);
      }
      if (hi - lo < eps) continue;

      const double eta = 2.0 * k[i][j] - k[i][i] - k[j][j];
      if (eta >= -eps) continue;  // non-positive curvature; skip the pair

      double aj = alpha[j] - y[j] * (ei - ej) / eta;
      aj = std::clamp(aj, lo, hi);
      if (std::fabs(aj - alpha[j]) < eps) continue;
      const double ai = alpha[i] + y[i] * y[j] * (alpha[j] - aj);

      const double b1 = b - ei - y[i] * (ai - alpha[i]) * k[i][i] -
                        y[j] * (aj - alpha[j]) * k[i][j];
      const double b2 = b - ej - y[i] * (ai - alpha[i]) * k[i][j] -
                        y[j] * (aj - alpha[j]) * k[j][j];
      double new_b;
      if (ai > eps && ai < cost - eps) {
        new_b = b1;
      } else if (aj > eps && aj < cost - eps) {
        new_b = b2;
      } else {
        new_b = (b1 + b2) / 2.0;
      }
      const double di = y[i] * (ai - alpha[i]);
      const double dj = y[j] * (aj - alpha[j]);
      const double db = new_b - b;
      for (std::size_t c = 0; c < n; ++c) {
        err[c] += di * k[i][c] + dj * k[j][c] + db;
      }
      alpha[i] = ai;
      alpha[j] = aj;
      b = new_b;
      ++changed;
    }
    if (changed == 0) break;
  }

  BinarySvm model;
  model.kernel_ = kernel;
  model.gamma_ = gamma;
  model.bias_ = b;
  for (std::size_t i = 0; i < n; ++i) {
    if (alpha[i] > eps) {
      model.support_.push_back(rows[i]);
      model.alpha_y_.push_back(alpha[i] * y[i]);
    }
  }
  return model;
}

double BinarySvm::decision(const std::vector<double>& x) const {
  double sum = bias_;
  for (std::size_t i = 0; i < support_.size(); ++i) {
    sum += alpha_y_[i] * kernel_value(kernel_, gamma_, support_[i], x);
  }
  return sum;
}

MaxMarginClassifier MaxMarginClassifier::train(const std::vector<std::vector<double>>& rows,
                                               const std::vector<int>& labels, int n_classes,
                                               const SvmParams& params) {
  if (rows.empty() || rows.size() != labels.size()) {
    throw Error("svm: empty training set or misaligned labels");
  }
  {
    const auto [lo, hi] = std::minmax_element(labels.begin(), labels.end());
    if (*lo == *hi) throw Error("svm: single-class training data");
    if (*lo < 0 || *hi >= n_classes) throw Error("svm: label out of range");
  }

  MaxMarginClassifier model;
  model.n_classes_ = n_classes;
  model.gamma_ = params.kernel == SvmParams::Kernel::rbf
                     ? resolve_gamma(rows, params.gamma_rule)
                     : 0.0;

  for (int a = 0; a < n_classes; ++a) {
    for (int c = a + 1; c < n_classes; ++c) {
      std::vector<std::vector<double>> pair_rows;
      std::vector<int> pair_y;
      for (std::size_t i = 0; i < rows.size(); ++i) {
        if (labels[i] == a) {
          pair_rows.push_back(rows[i]);
          pair_y.push_back(1);
        } else if (labels[i] == c) {
          pair_rows.push_back(rows[i]);
          pair_y.push_back(-1);
        }
      }
      const bool has_both = std::count(pair_y.begin(), pair_y.end(), 1) > 0 &&
                            std::count(pair_y.begin(), pair_y.end(), -1) > 0;
      if (!has_both) continue;  // a class can be absent from a training fold pair
      Pair pair{a, c,
                BinarySvm::train(pair_rows, pair_y, params.kernel, params.cost, model.gamma_)};
      model.pairs_.push_back(std::move(pair));
    }
  }
  if (model.pairs_.empty()) throw Error("svm: no trainable class pair");
  return model;
}

std::vector<std::vector<double>> MaxMarginClassifier::predict_scores(
    const std::vector<std::vector<double>>& rows) const {
  std::vector<std::vector<double>> scores;
  scores.reserve(rows.size());
  for (const auto& x : rows) {
    std::vector<double> votes(n_classes_, 0.0);
    for (const auto& pair : pairs_) {
      votes[pair.svm.decision(x) >= 0 ? pair.positive_class : pair.negative_class] += 1.0;
    }
    for (auto& v : votes) v /= static_cast<double>(pairs_.size());
    scores.push_back(std::move(votes));
  }
  return scores;
}

std::vector<int> MaxMarginClassifier::predict(
    const std::vector<std::vector<double>>& rows) const {
  const auto scores = predict_scores(rows);
  std::vector<int> out;
  out.reserve(rows.size());
  for (const auto& s : scores) {
    out.push_back(static_cast<int>(std::max_element(s.begin(), s.end()) - s.begin()));
  }
  return out;
}

}  // namespace libexpert
