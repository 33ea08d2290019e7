#include "libexpert/smote.hpp"

#include <algorithm>
#include <cmath>

#include "libexpert/errors.hpp"

namespace libexpert {

namespace {

double squared_distance(const std::vector<double>& a, const std::vector<double>& b) {
  double d = 0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    const double diff = a[i] - b[i];
    d += diff * diff;
  }
  return d;
}

}  // namespace

std::vector<std::vector<double>> smote(const std::vector<std::vector<double>>& minority,
                                       int knn, double pct, Rng& rng) {
  const std::size_t n = minority.size();
  if (knn < 1) throw Error("smote: knn must be >= 1");
  if (n <= static_cast<std::size_t>(knn)) {
    throw Error("smote: " + std::to_string(n) + " minority rows cannot support knn=" +
                std::to_string(knn) + "; use a smaller knn");
  }
  for (const auto& row : minority) {
    if (row.size() != minority[0].size()) throw Error("smote: ragged minority rows");
  }

  // k nearest neighbours per row, self excluded, distance ties by row order.
  std::vector<std::vector<std::size_t>> neighbours(n);
  for (std::size_t i = 0; i < n; ++i) {
    std::vector<std::pair<double, std::size_t>> dist;
    dist.reserve(n - 1);
    for (std::size_t j = 0; j < n; ++j) {
      if (j != i) dist.emplace_back(squared_distance(minority[i], minority[j]), j);
    }
    std::sort(dist.begin(), dist.end());
    neighbours[i].reserve(knn);
    for (int k = 0; k < knn; ++k) neighbours[i].push_back(dist[k].second);
  }

  const auto count = static_cast<std::size_t>(
      std::ceil(pct * static_cast<double>(n)));
  std::vector<std::vector<double>> synthetic;
  synthetic.reserve(count);
  for (std::size_t s = 0; s < count; ++s) {
    const std::size_t p = rng.uniform_index(n);
    const std::size_t q = neighbours[p][rng.uniform_index(neighbours[p].size())];
    const double u = rng.uniform01();
    std::vector<double> row(minority[p].size());
    for (std::size_t c = 0; c < row.size(); ++c) {
      row[c] = minority[p][c] + u * (minority[q][c] - minority[p][c]);
    }
    synthetic.push_back(std::move(row));
  }
  return synthetic;
}

}  // namespace libexpert
