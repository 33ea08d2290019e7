#pragma once

#include <cstdint>
#include <vector>

namespace libexpert {

struct KMeansResult {
  int k = 0;
  std::vector<std::vector<double>> centroids;
  std::vector<int> assignment;  // row -> nearest centroid
  double inertia = 0;           // within-cluster sum of squared distances
};

double squared_euclidean(const std::vector<double>& a, const std::vector<double>& b);

// Lloyd iterations from k-means++ seeding, best of `restarts` runs by
// (inertia, restart index). Empty clusters are repaired by promoting the
// point farthest from its assigned centroid. At most 300 iterations per
// run; inertia is asserted non-increasing. Deterministic for a fixed seed
// at any thread count.
KMeansResult kmeans(const std::vector<std::vector<double>>& rows, int k, int restarts,
                    std::uint64_t seed, unsigned threads = 1);

}  // namespace libexpert
