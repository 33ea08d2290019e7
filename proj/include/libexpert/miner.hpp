#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include "libexpert/corpus.hpp"
#include "libexpert/identity.hpp"
#include "libexpert/library_spec.hpp"

namespace libexpert {

// One developer-authored commit's mined facts.
struct CommitEvent {
  std::string developer;   // account_id
  std::string project;     // repo_id
  std::string commit_id;
  std::int64_t authored_at = 0;
  std::int64_t churn_total = 0;   // lines added+deleted over all files
  std::int64_t churn_client = 0;  // same, restricted to client files
  bool touched_client_file = false;
  std::int64_t imports_added = 0;  // added import lines matching the library
};

struct ScanReport {
  std::vector<std::string> commit_errors;      // unreadable objects etc.
  std::vector<std::string> fallback_authors;   // emails the remote resolver missed
  std::int64_t commits_scanned = 0;
};

// Walks the project's history up to its head snapshot and emits one event
// per non-merge commit. Client-file status is evaluated per commit against
// the post-image content (pre-image for deletions). Commits authored after
// `authored_cutoff` are dropped so downstream "days since" features stay
// non-negative. Events are ordered by (authored_at, commit_id).
std::vector<CommitEvent> scan_history(
    const ClientProject& project, const LibrarySpec& lib, IdentityResolver& resolver,
    ScanReport& report, std::optional<std::int64_t> authored_cutoff = std::nullopt);

// Number of `+` lines in a unified diff for one file (diff headers excluded)
// that import the library.
std::int64_t count_added_imports(std::string_view diff, const LibrarySpec& lib);

// events.csv round-trip. Columns:
// developer,project,commit,authored_at,churn_total,churn_client,touched_client_file,imports_added
// with authored_at as ISO-8601 UTC.
void write_events(const std::filesystem::path& path, const std::vector<CommitEvent>& events);
std::vector<CommitEvent> read_events(const std::filesystem::path& path);

std::string events_to_csv(const std::vector<CommitEvent>& events);
std::vector<CommitEvent> events_from_csv(const std::string& text);

}  // namespace libexpert
