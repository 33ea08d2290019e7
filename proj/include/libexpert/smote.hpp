#pragma once

#include <vector>

#include "libexpert/rng.hpp"

namespace libexpert {

// Synthetic minority oversampling: emits ceil(pct * n) rows, each a convex
// combination p + u*(q - p) of a uniformly drawn minority row p and one of
// its knn nearest minority neighbours q (Euclidean; neighbour ties resolved
// by row order). Requires n > knn.
std::vector<std::vector<double>> smote(const std::vector<std::vector<double>>& minority,
                                       int knn, double pct, Rng& rng);

}  // namespace libexpert
