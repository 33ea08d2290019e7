#pragma once

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "libexpert/labels.hpp"
#include "libexpert/library_spec.hpp"

namespace libexpert {

// Everything a full run needs. Loaded from a JSON config file; every field
// can be overridden from the command line. See docs/config.md.
struct PipelineConfig {
  std::vector<LibrarySpec> libraries;

  // Repository source: exactly one of the three.
  std::string repos_dir;     // directory of git repositories
  std::string repo_list;     // newline-delimited owner/name list file
  std::string remote_query;  // most-starred query against a hosting API
  std::string remote_base_url;
  int remote_count = 100;
  std::string repos_root;  // where list/remote entries live on disk

  std::string snapshot;      // ISO-8601 UTC; observation cutoff
  std::string ground_truth;  // CSV path; empty -> mining + features only
  std::string scheme = "ternary";
  std::vector<std::string> classifiers{"zeror", "random-forest", "max-margin"};
  int folds = 5;
  bool smote = true;
  int smote_knn = 3;
  double smote_pct = 0.30;
  int k_max = 8;
  int restarts = 50;
  std::optional<double> threshold_override;
  std::uint64_t seed = 1;
  std::string out_dir = "out";
  int threads = 0;  // 0 -> hardware concurrency
  bool resume = false;

  // Throws Error when the config cannot start a run (no libraries, no or
  // ambiguous repo source, missing snapshot, bad scheme/classifier names).
  void validate() const;

  unsigned effective_threads() const;
};

PipelineConfig config_from_json(const std::string& text);
std::string config_to_json(const PipelineConfig& config);
PipelineConfig load_config(const std::filesystem::path& path);

// Ground-truth ingestion: header developer,library,score; scores 1-5.
// Collects every bad row (range, unknown library, duplicate developer+library)
// and throws a single Error listing them with line numbers.
std::vector<GroundTruthLabel> ingest_ground_truth(const std::filesystem::path& path,
                                                  const std::vector<std::string>& known_libraries);

struct StageStatus {
  std::string name;     // e.g. "mine/react"
  bool skipped = false; // degraded mode or resume hit
  std::string note;     // human-readable one-liner
  std::vector<std::pair<std::string, std::string>> artifacts;  // rel path -> content hash
};

struct PipelineResult {
  std::filesystem::path out_dir;
  std::vector<StageStatus> stages;
  bool degraded = false;  // no ground truth: learning/cluster/stats skipped
};

// Runs corpus -> mine -> features -> preprocess -> train -> cluster ->
// verdicts -> stats for every configured library and writes all artifacts
// plus run_manifest.json under config.out_dir. Stage failures surface as
// StageError; previously completed stages are checkpointed so a --resume
// run skips them. `progress`, when given, receives one line per stage.
PipelineResult run_pipeline(const PipelineConfig& config, std::ostream* progress = nullptr);

// Human-readable digest of a finished run directory (the `report` command).
std::string summarize_run(const std::filesystem::path& out_dir);

}  // namespace libexpert
