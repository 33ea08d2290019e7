#include "libexpert/features.hpp"

#include <algorithm>
#include <fstream>
#include <sstream>

#include "libexpert/csv.hpp"
#include "libexpert/errors.hpp"
#include "libexpert/numfmt.hpp"
#include "libexpert/parallel.hpp"
#include "libexpert/timeutil.hpp"

namespace libexpert {

const std::array<const char*, kFeatureCount> kFeatureNames = {
    "commits",
    "commitsClientFiles",
    "commitsImportLibrary",
    "codeChurn",
    "codeChurnClientFiles",
    "imports",
    "daysSinceFirstImport",
    "daysSinceLastImport",
    "daysBetweenImports",
    "avgDaysCommitsClientFiles",
    "avgDaysCommitsImportLibrary",
    "projects",
    "projectsImport",
};

std::size_t feature_index(std::string_view name) {
  for (std::size_t i = 0; i < kFeatureNames.size(); ++i) {
    if (name == kFeatureNames[i]) return i;
  }
  throw Error("unknown feature name: " + std::string(name));
}

std::array<std::optional<double>, kFeatureCount> FeatureVector::values() const {
  auto opt = [](const auto& o) -> std::optional<double> {
    if (!o) return std::nullopt;
    return static_cast<double>(*o);
  };
  return {static_cast<double>(commits),
          static_cast<double>(commits_client_files),
          static_cast<double>(commits_import_library),
          static_cast<double>(code_churn),
          static_cast<double>(code_churn_client_files),
          static_cast<double>(imports),
          opt(days_since_first_import),
          opt(days_since_last_import),
          opt(days_between_imports),
          avg_days_commits_client_files,
          opt(avg_days_commits_import_library),
          static_cast<double>(projects),
          static_cast<double>(projects_import)};
}

const char* exclusion_reason_name(ExclusionReason reason) {
  switch (reason) {
    case ExclusionReason::none: return "none";
    case ExclusionReason::no_events: return "no_events";
    case ExclusionReason::no_client_file_commit: return "no_client_file_commit";
  }
  return "unknown";
}

void FeatureAccumulator::add(const CommitEvent& event) {
  if (developer_.empty()) {
    developer_ = event.developer;
  } else if (developer_ != event.developer) {
    throw ContractError("events span multiple developers: " + developer_ + " vs " +
                        event.developer);
  }
  ++commits_;
  churn_ += event.churn_total;
  churn_client_ += event.churn_client;
  imports_ += event.imports_added;
  projects_.insert(event.project);
  if (event.touched_client_file) {
    ++commits_client_;
    client_times_.push_back(event.authored_at);
  }
  if (event.imports_added > 0) {
    ++commits_import_;
    import_times_.push_back(event.authored_at);
    projects_import_.insert(event.project);
  }
}

void FeatureAccumulator::merge(const FeatureAccumulator& other) {
  if (other.developer_.empty()) return;
  if (developer_.empty()) {
    developer_ = other.developer_;
  } else if (developer_ != other.developer_) {
    throw ContractError("merging accumulators of different developers");
  }
  commits_ += other.commits_;
  commits_client_ += other.commits_client_;
  commits_import_ += other.commits_import_;
  churn_ += other.churn_;
  churn_client_ += other.churn_client_;
  imports_ += other.imports_;
  projects_.insert(other.projects_.begin(), other.projects_.end());
  projects_import_.insert(other.projects_import_.begin(), other.projects_import_.end());
  client_times_.insert(client_times_.end(), other.client_times_.begin(),
                       other.client_times_.end());
  import_times_.insert(import_times_.end(), other.import_times_.begin(),
                       other.import_times_.end());
}

namespace {

// Mean of whole-day gaps between consecutive (time-sorted) commits.
double mean_day_gap(std::vector<std::int64_t> times) {
  std::sort(times.begin(), times.end());
  std::int64_t total = 0;
  for (std::size_t i = 1; i < times.size(); ++i) {
    total += whole_days_between(times[i - 1], times[i]);
  }
  return static_cast<double>(total) / static_cast<double>(times.size() - 1);
}

}  // namespace

FeatureOutcome FeatureAccumulator::finish(std::int64_t snapshot,
                                          const std::string& library_id) const {
  FeatureOutcome outcome;
  if (commits_ == 0) {
    outcome.reason = ExclusionReason::no_events;
    return outcome;
  }
  for (const auto t : client_times_) {
    if (t > snapshot) {
      throw ContractError("event authored after the snapshot for " + developer_);
    }
  }
  if (commits_client_ == 0) {
    outcome.reason = ExclusionReason::no_client_file_commit;
    return outcome;
  }

  FeatureVector v;
  v.developer = developer_;
  v.library = library_id;
  v.commits = commits_;
  v.commits_client_files = commits_client_;
  v.commits_import_library = commits_import_;
  v.code_churn = churn_;
  v.code_churn_client_files = churn_client_;
  v.imports = imports_;
  v.projects = static_cast<std::int64_t>(projects_.size());
  v.projects_import = static_cast<std::int64_t>(projects_import_.size());

  if (!import_times_.empty()) {
    const auto [first_it, last_it] =
        std::minmax_element(import_times_.begin(), import_times_.end());
    v.days_since_first_import = whole_days_between(*first_it, snapshot);
    v.days_since_last_import = whole_days_between(*last_it, snapshot);
    v.days_between_imports = whole_days_between(*first_it, *last_it);
  }
  v.avg_days_commits_client_files =
      client_times_.size() >= 2 ? mean_day_gap(client_times_) : 0.0;
  if (import_times_.size() >= 2) {
    v.avg_days_commits_import_library = mean_day_gap(import_times_);
  }
  outcome.vector = std::move(v);
  return outcome;
}

FeatureOutcome compute_features(const std::vector<CommitEvent>& events, std::int64_t snapshot,
                                const std::string& library_id) {
  FeatureAccumulator acc;
  for (const auto& ev : events) {
    if (ev.authored_at > snapshot) {
      throw ContractError("event authored after the snapshot: " + ev.commit_id);
    }
    acc.add(ev);
  }
  return acc.finish(snapshot, library_id);
}

FeatureSet compute_all_features(const std::vector<CommitEvent>& events, std::int64_t snapshot,
                                const std::string& library_id, unsigned threads) {
  std::map<std::string, std::vector<CommitEvent>> by_developer;
  for (const auto& ev : events) by_developer[ev.developer].push_back(ev);

  std::vector<const std::vector<CommitEvent>*> groups;
  groups.reserve(by_developer.size());
  std::vector<std::string> developers;
  for (const auto& [dev, group] : by_developer) {
    developers.push_back(dev);
    groups.push_back(&group);
  }

  const auto outcomes = parallel_map(
      groups,
      [&](const std::vector<CommitEvent>* group) {
        return compute_features(*group, snapshot, library_id);
      },
      threads);

  FeatureSet set;
  for (std::size_t i = 0; i < outcomes.size(); ++i) {
    if (outcomes[i].vector) {
      set.vectors.push_back(*outcomes[i].vector);
    } else {
      set.excluded.emplace(developers[i], outcomes[i].reason);
    }
  }
  // by_developer is a sorted map, so vectors are already developer-ordered.
  return set;
}

namespace {

std::vector<std::string> feature_header() {
  std::vector<std::string> header(kFeatureNames.begin(), kFeatureNames.end());
  header.push_back("developer");
  header.push_back("library");
  return header;
}

std::string cell(const std::optional<double>& value) {
  if (!value) return "";
  return format_double(*value);
}

std::optional<double> parse_cell(const std::string& field) {
  if (field.empty()) return std::nullopt;
  return parse_double(field);
}

}  // namespace

std::string features_to_csv(const std::vector<FeatureVector>& vectors) {
  std::string out = csv_write_row(feature_header());
  for (const auto& v : vectors) {
    std::vector<std::string> row;
    row.reserve(kFeatureCount + 2);
    for (const auto& value : v.values()) row.push_back(cell(value));
    row.push_back(v.developer);
    row.push_back(v.library);
    out += csv_write_row(row);
  }
  return out;
}

std::vector<FeatureVector> features_from_csv(const std::string& text) {
  const auto rows = csv_parse(text);
  if (rows.empty() || rows[0] != feature_header()) {
    throw ParseError("features.csv: missing or wrong header row", 0);
  }
  std::vector<FeatureVector> vectors;
  for (std::size_t i = 1; i < rows.size(); ++i) {
    const auto& row = rows[i];
    if (row.size() != kFeatureCount + 2) {
      throw ParseError("features.csv: row " + std::to_string(i + 1) + " has " +
                           std::to_string(row.size()) + " fields",
                       0);
    }
    FeatureVector v;
    auto as_int = [&](std::size_t col) {
      return static_cast<std::int64_t>(parse_double(row[col]));
    };
    auto as_opt_int = [&](std::size_t col) -> std::optional<std::int64_t> {
      const auto d = parse_cell(row[col]);
      if (!d) return std::nullopt;
      return static_cast<std::int64_t>(*d);
    };
    v.commits = as_int(0);
    v.commits_client_files = as_int(1);
    v.commits_import_library = as_int(2);
    v.code_churn = as_int(3);
    v.code_churn_client_files = as_int(4);
    v.imports = as_int(5);
    v.days_since_first_import = as_opt_int(6);
    v.days_since_last_import = as_opt_int(7);
    v.days_between_imports = as_opt_int(8);
    v.avg_days_commits_client_files = parse_double(row[9]);
    v.avg_days_commits_import_library = parse_cell(row[10]);
    v.projects = as_int(11);
    v.projects_import = as_int(12);
    v.developer = row[13];
    v.library = row[14];
    vectors.push_back(std::move(v));
  }
  return vectors;
}

void write_features(const std::filesystem::path& path, const std::vector<FeatureVector>& vectors) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error("cannot write " + path.string());
  out << features_to_csv(vectors);
}

std::vector<FeatureVector> read_features(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error("cannot read " + path.string());
  std::ostringstream buf;
  buf << in.rdbuf();
  return features_from_csv(buf.str());
}

}  // namespace libexpert
