#include "libexpert/kmeans.hpp"

#include <algorithm>
#include <limits>

#include "libexpert/errors.hpp"
#include "libexpert/parallel.hpp"
#include "libexpert/rng.hpp"

namespace libexpert {

double squared_euclidean(const std::vector<double>& a, const std::vector<double>& b) {
  if (a.size() != b.size()) throw Error("dimension mismatch: " + std::to_string(a.size()) +
                                        " vs " + std::to_string(b.size()));
  double d = 0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    const double diff = a[i] - b[i];
    d += diff * diff;
  }
  return d;
}

namespace {

constexpr int kMaxIterations = 300;

std::vector<std::vector<double>> seed_plus_plus(const std::vector<std::vector<double>>& rows,
                                                int k, Rng& rng) {
  const std::size_t n = rows.size();
  std::vector<std::vector<double>> centroids;
  centroids.reserve(k);
  std::vector<bool> chosen(n, false);

  const std::size_t first = rng.uniform_index(n);
  centroids.push_back(rows[first]);
  chosen[first] = true;

  std::vector<double> d2(n);
  while (static_cast<int>(centroids.size()) < k) {
    double total = 0;
    for (std::size_t i = 0; i < n; ++i) {
      if (chosen[i]) {
        d2[i] = 0;
        continue;
      }
      double best = std::numeric_limits<double>::infinity();
      for (const auto& c : centroids) best = std::min(best, squared_euclidean(rows[i], c));
      d2[i] = best;
      total += best;
    }
    std::size_t pick = n;
    if (total > 0) {
      // D^2-weighted draw.
      const double target = rng.uniform01() * total;
      double cumulative = 0;
      for (std::size_t i = 0; i < n; ++i) {
        cumulative += d2[i];
        if (cumulative > target) {
          pick = i;
          break;
        }
      }
      if (pick == n) {  // floating-point edge: fall back to the last weighted point
        for (std::size_t i = n; i > 0; --i) {
          if (d2[i - 1] > 0) {
            pick = i - 1;
            break;
          }
        }
      }
    }
    if (pick == n) {
      // All remaining points duplicate an existing centroid; take the first
      // unchosen one so we still return k centroids.
      for (std::size_t i = 0; i < n; ++i) {
        if (!chosen[i]) {
          pick = i;
          break;
        }
      }
    }
    centroids.push_back(rows[pick]);
    chosen[pick] = true;
  }
  return centroids;
}

int nearest_centroid(const std::vector<double>& x,
                     const std::vector<std::vector<double>>& centroids) {
  int best = 0;
  double best_d = squared_euclidean(x, centroids[0]);
  for (int c = 1; c < static_cast<int>(centroids.size()); ++c) {
    const double d = squared_euclidean(x, centroids[c]);
    if (d < best_d) {  // ties keep the lower index
      best_d = d;
      best = c;
    }
  }
  return best;
}

double total_inertia(const std::vector<std::vector<double>>& rows,
                     const std::vector<std::vector<double>>& centroids,
                     const std::vector<int>& assignment) {
  double inertia = 0;
  for (std::size_t i = 0; i < rows.size(); ++i) {
    inertia += squared_euclidean(rows[i], centroids[assignment[i]]);
  }
  return inertia;
}

KMeansResult lloyd_once(const std::vector<std::vector<double>>& rows, int k,
                        std::uint64_t restart_seed) {
  Rng rng(restart_seed);
  const std::size_t n = rows.size();
  const std::size_t dim = rows[0].size();
  auto centroids = seed_plus_plus(rows, k, rng);

  std::vector<int> assignment(n, -1);
  double previous_inertia = std::numeric_limits<double>::infinity();
  for (int iter = 0; iter < kMaxIterations; ++iter) {
    bool moved = false;
    for (std::size_t i = 0; i < n; ++i) {
      const int c = nearest_centroid(rows[i], centroids);
      if (c != assignment[i]) {
        assignment[i] = c;
        moved = true;
      }
    }

    // Repair empty clusters: promote the point farthest from its assigned
    // centroid (ties to the lowest row index), one empty cluster at a time.
    for (;;) {
      std::vector<std::int64_t> sizes(k, 0);
      for (const auto a : assignment) ++sizes[a];
      int empty = -1;
      for (int c = 0; c < k; ++c) {
        if (sizes[c] == 0) {
          empty = c;
          break;
        }
      }
      if (empty < 0) break;
      std::size_t farthest = 0;
      double far_d = -1;
      for (std::size_t i = 0; i < n; ++i) {
        if (sizes[assignment[i]] <= 1) continue;  // do not drain singleton clusters
        const double d = squared_euclidean(rows[i], centroids[assignment[i]]);
        if (d > far_d) {
          far_d = d;
          farthest = i;
        }
      }
      centroids[empty] = rows[farthest];
      assignment[farthest] = empty;
      moved = true;
    }

    for (int c = 0; c < k; ++c) {
      std::vector<double> mean(dim, 0.0);
      std::int64_t count = 0;
      for (std::size_t i = 0; i < n; ++i) {
        if (assignment[i] != c) continue;
        ++count;
        for (std::size_t d = 0; d < dim; ++d) mean[d] += rows[i][d];
      }
      for (std::size_t d = 0; d < dim; ++d) mean[d] /= static_cast<double>(count);
      centroids[c] = std::move(mean);
    }

    const double inertia = total_inertia(rows, centroids, assignment);
    if (inertia > previous_inertia * (1.0 + 1e-12) + 1e-12) {
      throw ContractError("k-means inertia increased between iterations");
    }
    previous_inertia = inertia;
    if (!moved) break;
  }

  // On convergence the loop already left a Lloyd fixed point (assignments
  // unchanged and centroids recomputed from them). The refresh below only
  // matters if the iteration cap fired; it restores the nearest-centroid
  // invariant without disturbing a converged run.
  for (std::size_t i = 0; i < n; ++i) assignment[i] = nearest_centroid(rows[i], centroids);

  KMeansResult result;
  result.k = k;
  result.centroids = std::move(centroids);
  result.assignment = std::move(assignment);
  result.inertia = total_inertia(rows, result.centroids, result.assignment);
  return result;
}

}  // namespace

KMeansResult kmeans(const std::vector<std::vector<double>>& rows, int k, int restarts,
                    std::uint64_t seed, unsigned threads) {
  if (k < 1) throw Error("k-means: k must be >= 1");
  if (rows.size() < static_cast<std::size_t>(k)) {
    throw Error("k-means: " + std::to_string(rows.size()) + " rows cannot form k=" +
                std::to_string(k) + " clusters");
  }
  for (const auto& row : rows) {
    if (row.size() != rows[0].size()) throw Error("k-means: ragged rows");
  }
  if (restarts < 1) throw Error("k-means: restarts must be >= 1");

  std::vector<int> restart_ids(restarts);
  for (int r = 0; r < restarts; ++r) restart_ids[r] = r;
  const auto runs = parallel_map(
      restart_ids,
      [&](int r) {
        return lloyd_once(rows, k, derive_seed(seed, "kmeans/restart" + std::to_string(r)));
      },
      threads);

  // Deterministic reduction: smallest inertia, then lowest restart index.
  std::size_t best = 0;
  for (std::size_t r = 1; r < runs.size(); ++r) {
    if (runs[r].inertia < runs[best].inertia) best = r;
  }
  return runs[best];
}

}  // namespace libexpert
