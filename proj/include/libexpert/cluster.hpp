#pragma once

#include <array>
#include <cstdint>
#include <filesystem>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include "libexpert/kmeans.hpp"
#include "libexpert/labels.hpp"
#include "libexpert/matrix.hpp"

namespace libexpert {

struct ClusterComposition {
  std::int64_t members = 0;  // all rows assigned to the cluster
  std::int64_t labeled = 0;  // rows with a ground-truth label
  std::array<double, 3> class_fraction{0, 0, 0};  // novice/intermediate/expert of labeled
  double expert_fraction = 0;                     // shorthand for class_fraction[expert]
};

// Fitted clustering state, self-contained for prediction: the transform log
// carries imputation, pruning, log-transform and standardization, so a raw
// feature vector can be replayed straight into centroid space.
struct ClusterModel {
  std::string library;
  int k = 0;
  std::vector<std::string> columns;  // active feature names, centroid order
  std::vector<std::vector<double>> centroids;
  TransformLog log;
  std::vector<std::string> row_ids;
  std::vector<int> assignment;
  std::vector<ClusterComposition> composition;
  int expert_cluster = -1;
  double threshold_used = 0;
  bool below_threshold = false;  // no cluster reached the threshold by k_max
  double inertia = 0;
  std::uint64_t seed = 0;
};

struct ClusterSettings {
  int k_max = 8;
  int restarts = 50;
  std::optional<double> threshold_override;
  unsigned threads = 1;
};

// Expert-fraction threshold: 0.70 when the base expert rate is already at
// least one half, 0.60 otherwise (overridable).
double expert_threshold(double base_expert_rate, std::optional<double> override_value);

// Grows k from 2 until some cluster's labeled members reach the expert
// threshold; within a k, ties go to the higher expert fraction, then the
// larger cluster. Without a qualifying cluster by k_max, the best-found
// model is returned flagged below_threshold. The matrix must already be
// standardized and `log` must describe how.
ClusterModel select_expert_cluster(const FeatureMatrix& standardized, const TransformLog& log,
                                   const std::map<std::string, Ternary>& labels,
                                   const std::string& library, std::uint64_t seed,
                                   const ClusterSettings& settings = {});

enum class Verdict { likely_expert, unknown };
const char* verdict_name(Verdict v);

struct Prediction {
  Verdict verdict = Verdict::unknown;
  double distance_margin = 0;  // nearest non-expert distance minus expert distance
};

// Nearest-centroid rule in standardized space: likely-expert iff the expert
// centroid is strictly nearest; ties and every other outcome are unknown.
Prediction predict_expert(const ClusterModel& model, const std::vector<double>& standardized_row);

// Same, starting from a raw 13-feature vector (replayed through the model's
// transform log).
Prediction predict_expert_raw(const ClusterModel& model,
                              const std::array<std::optional<double>, kFeatureCount>& raw);

// Developers marked likely-expert in every supplied per-library verdict map.
std::set<std::string> intersect_experts(
    const std::vector<std::map<std::string, Verdict>>& per_library);

// clusters.json round-trip (composition table plus full replay state).
std::string cluster_model_to_json(const ClusterModel& model);
ClusterModel cluster_model_from_json(const std::string& text);
void save_cluster_model(const std::filesystem::path& path, const ClusterModel& model);
ClusterModel load_cluster_model(const std::filesystem::path& path);

// verdicts.csv: developer,library,verdict,distance_margin
struct VerdictRow {
  std::string developer;
  std::string library;
  Verdict verdict = Verdict::unknown;
  double distance_margin = 0;
};
std::string verdicts_to_csv(const std::vector<VerdictRow>& rows);
std::vector<VerdictRow> verdicts_from_csv(const std::string& text);
void write_verdicts(const std::filesystem::path& path, const std::vector<VerdictRow>& rows);
std::vector<VerdictRow> read_verdicts(const std::filesystem::path& path);

}  // namespace libexpert
