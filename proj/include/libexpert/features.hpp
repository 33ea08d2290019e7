#pragma once

#include <array>
#include <cstdint>
#include <filesystem>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include "libexpert/miner.hpp"

namespace libexpert {

inline constexpr std::size_t kFeatureCount = 13;

// Column order is fixed; every matrix and CSV in the toolkit uses it.
extern const std::array<const char*, kFeatureCount> kFeatureNames;

// Index of a feature name in kFeatureNames; throws Error for unknown names.
std::size_t feature_index(std::string_view name);

// The 13 per-(developer, library) expertise features. The four import-date
// features are genuinely missing when no (or too few) import-adding commits
// exist; missing stays explicit here and is only imputed downstream.
struct FeatureVector {
  std::string developer;
  std::string library;

  std::int64_t commits = 0;
  std::int64_t commits_client_files = 0;
  std::int64_t commits_import_library = 0;
  std::int64_t code_churn = 0;
  std::int64_t code_churn_client_files = 0;
  std::int64_t imports = 0;
  std::optional<std::int64_t> days_since_first_import;
  std::optional<std::int64_t> days_since_last_import;
  std::optional<std::int64_t> days_between_imports;
  double avg_days_commits_client_files = 0.0;  // 0 when fewer than two client-file commits
  std::optional<double> avg_days_commits_import_library;
  std::int64_t projects = 0;
  std::int64_t projects_import = 0;

  // Values in kFeatureNames order; nullopt marks missing.
  std::array<std::optional<double>, kFeatureCount> values() const;
};

enum class ExclusionReason {
  none,
  no_events,
  no_client_file_commit,  // candidate gate: commitsClientFiles >= 1
};

const char* exclusion_reason_name(ExclusionReason reason);

struct FeatureOutcome {
  std::optional<FeatureVector> vector;
  ExclusionReason reason = ExclusionReason::none;
};

// Order-insensitive aggregation of one developer's events; partial
// accumulators merge associatively, so chunked parallel mining and a single
// pass agree exactly.
class FeatureAccumulator {
 public:
  void add(const CommitEvent& event);
  void merge(const FeatureAccumulator& other);

  // Finalizes against the snapshot; empty or gate-failing developers come
  // back excluded with a reason.
  FeatureOutcome finish(std::int64_t snapshot, const std::string& library_id) const;

  const std::string& developer() const { return developer_; }

 private:
  std::string developer_;
  std::int64_t commits_ = 0;
  std::int64_t commits_client_ = 0;
  std::int64_t commits_import_ = 0;
  std::int64_t churn_ = 0;
  std::int64_t churn_client_ = 0;
  std::int64_t imports_ = 0;
  std::set<std::string> projects_;
  std::set<std::string> projects_import_;
  std::vector<std::int64_t> client_times_;
  std::vector<std::int64_t> import_times_;
};

// Aggregates one developer's events. Throws ContractError when events span
// multiple developers or an event is authored after the snapshot.
FeatureOutcome compute_features(const std::vector<CommitEvent>& events, std::int64_t snapshot,
                                const std::string& library_id);

struct FeatureSet {
  std::vector<FeatureVector> vectors;                    // sorted by developer
  std::map<std::string, ExclusionReason> excluded;       // developer -> why
};

// Groups events by developer and aggregates each.
FeatureSet compute_all_features(const std::vector<CommitEvent>& events, std::int64_t snapshot,
                                const std::string& library_id, unsigned threads = 1);

// features.csv round-trip: header is the 13 feature names plus
// developer,library; missing values are empty cells.
std::string features_to_csv(const std::vector<FeatureVector>& vectors);
std::vector<FeatureVector> features_from_csv(const std::string& text);
void write_features(const std::filesystem::path& path, const std::vector<FeatureVector>& vectors);
std::vector<FeatureVector> read_features(const std::filesystem::path& path);

}  // namespace libexpert
