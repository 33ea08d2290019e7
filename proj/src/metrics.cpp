#include "libexpert/metrics.hpp"

#include <algorithm>
#include <numeric>

#include "libexpert/errors.hpp"

namespace libexpert {

EvalResult evaluate(const std::vector<int>& truth, const std::vector<int>& predicted,
                    int n_classes) {
  if (truth.size() != predicted.size()) {
    throw Error("evaluate: truth and prediction lengths differ");
  }
  if (truth.empty()) throw Error("evaluate: empty input");
  for (const auto c : truth) {
    if (c < 0 || c >= n_classes) throw Error("evaluate: truth label out of range");
  }
  for (const auto c : predicted) {
    if (c < 0 || c >= n_classes) throw Error("evaluate: predicted label out of range");
  }
  {
    const auto [lo, hi] = std::minmax_element(truth.begin(), truth.end());
    if (*lo == *hi) throw Error("evaluate: truth contains a single class");
  }

  EvalResult r;
  r.confusion.assign(n_classes, std::vector<std::int64_t>(n_classes, 0));
  for (std::size_t i = 0; i < truth.size(); ++i) {
    ++r.confusion[truth[i]][predicted[i]];
  }

  const double n = static_cast<double>(truth.size());
  std::vector<std::int64_t> row_sum(n_classes, 0), col_sum(n_classes, 0);
  std::int64_t diagonal = 0;
  for (int t = 0; t < n_classes; ++t) {
    for (int p = 0; p < n_classes; ++p) {
      row_sum[t] += r.confusion[t][p];
      col_sum[p] += r.confusion[t][p];
    }
    diagonal += r.confusion[t][t];
  }

  r.per_class.resize(n_classes);
  double precision_sum = 0, recall_sum = 0;
  for (int c = 0; c < n_classes; ++c) {
    const auto tp = r.confusion[c][c];
    r.per_class[c].precision =
        col_sum[c] == 0 ? 0.0 : static_cast<double>(tp) / static_cast<double>(col_sum[c]);
    r.per_class[c].recall =
        row_sum[c] == 0 ? 0.0 : static_cast<double>(tp) / static_cast<double>(row_sum[c]);
    precision_sum += r.per_class[c].precision;
    recall_sum += r.per_class[c].recall;
  }
  r.macro_precision = precision_sum / n_classes;
  r.macro_recall = recall_sum / n_classes;
  r.f_measure = (r.macro_precision + r.macro_recall) == 0
                    ? 0.0
                    : 2.0 * r.macro_precision * r.macro_recall /
                          (r.macro_precision + r.macro_recall);

  const double po = static_cast<double>(diagonal) / n;
  double pe = 0;
  for (int c = 0; c < n_classes; ++c) {
    pe += static_cast<double>(row_sum[c]) * static_cast<double>(col_sum[c]) / (n * n);
  }
  r.kappa = pe >= 1.0 ? 0.0 : (po - pe) / (1.0 - pe);
  return r;
}

std::vector<double> midranks(const std::vector<double>& values) {
  const std::size_t n = values.size();
  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), 0u);
  std::sort(order.begin(), order.end(),
            [&](std::size_t a, std::size_t b) { return values[a] < values[b]; });
  std::vector<double> ranks(n, 0.0);
  std::size_t i = 0;
  while (i < n) {
    std::size_t j = i;
    while (j + 1 < n && values[order[j + 1]] == values[order[i]]) ++j;
    // positions i..j (0-based) share the average 1-based rank
    const double shared = (static_cast<double>(i) + static_cast<double>(j)) / 2.0 + 1.0;
    for (std::size_t k = i; k <= j; ++k) ranks[order[k]] = shared;
    i = j + 1;
  }
  return ranks;
}

namespace {

// Probability that class-i samples outscore class-j samples on the score
// for class i, ties counting half (midranks).
double pair_separability(const std::vector<double>& scores_i_for_i,
                         const std::vector<double>& scores_j_for_i) {
  const std::size_t ni = scores_i_for_i.size();
  const std::size_t nj = scores_j_for_i.size();
  std::vector<double> pooled;
  pooled.reserve(ni + nj);
  pooled.insert(pooled.end(), scores_i_for_i.begin(), scores_i_for_i.end());
  pooled.insert(pooled.end(), scores_j_for_i.begin(), scores_j_for_i.end());
  const auto ranks = midranks(pooled);
  double sum_i = 0;
  for (std::size_t k = 0; k < ni; ++k) sum_i += ranks[k];
  const double u = sum_i - static_cast<double>(ni) * (static_cast<double>(ni) + 1.0) / 2.0;
  return u / (static_cast<double>(ni) * static_cast<double>(nj));
}

}  // namespace

double multiclass_auc(const std::vector<int>& truth,
                      const std::vector<std::vector<double>>& scores, int n_classes) {
  if (truth.size() != scores.size()) throw Error("auc: truth and score lengths differ");
  std::vector<std::vector<std::size_t>> members(n_classes);
  for (std::size_t i = 0; i < truth.size(); ++i) {
    if (truth[i] < 0 || truth[i] >= n_classes) throw Error("auc: label out of range");
    if (static_cast<int>(scores[i].size()) != n_classes) {
      throw Error("auc: score row width != n_classes");
    }
    members[truth[i]].push_back(i);
  }

  double total = 0;
  int pairs = 0;
  for (int i = 0; i < n_classes; ++i) {
    for (int j = i + 1; j < n_classes; ++j) {
      if (members[i].empty() || members[j].empty()) continue;
      auto gather = [&](const std::vector<std::size_t>& rows, int cls) {
        std::vector<double> out;
        out.reserve(rows.size());
        for (const auto r : rows) out.push_back(scores[r][cls]);
        return out;
      };
      const double a_ij = pair_separability(gather(members[i], i), gather(members[j], i));
      const double a_ji = pair_separability(gather(members[j], j), gather(members[i], j));
      total += (a_ij + a_ji) / 2.0;
      ++pairs;
    }
  }
  return pairs == 0 ? 0.5 : total / pairs;
}

}  // namespace libexpert
