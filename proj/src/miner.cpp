#include "libexpert/miner.hpp"

#include <algorithm>
#include <fstream>
#include <set>
#include <sstream>
#include <unordered_map>

#include "libexpert/csv.hpp"
#include "libexpert/errors.hpp"
#include "libexpert/gitio.hpp"
#include "libexpert/imports.hpp"
#include "libexpert/numfmt.hpp"
#include "libexpert/timeutil.hpp"

namespace libexpert {

std::vector<CommitEvent> scan_history(const ClientProject& project, const LibrarySpec& lib,
                                      IdentityResolver& resolver, ScanReport& report,
                                      std::optional<std::int64_t> authored_cutoff) {
  GitRepo git(project.repo_path);
  if (!git.is_repository()) {
    throw Error("not a readable git repository: " + project.repo_path.string());
  }
  const std::string& tip = project.head_snapshot.commit_id;
  const auto commits = git.log_commits(tip);

  // Client-file status is a property of blob content, so evaluate it once
  // per object id: post-image for additions/modifications, pre-image for
  // deletions. Only source files can be client files.
  std::set<std::string> wanted;
  for (const auto& c : commits) {
    for (const auto& f : c.files) {
      if (!is_source_path(f.path)) continue;
      const std::string& oid = f.status == 'D' ? f.old_oid : f.new_oid;
      if (!is_null_oid(oid)) wanted.insert(oid);
    }
  }
  const auto blobs = git.read_blobs(std::vector<std::string>(wanted.begin(), wanted.end()));
  std::unordered_map<std::string, bool> client_by_oid;
  client_by_oid.reserve(blobs.size());
  for (const auto& [oid, content] : blobs) {
    client_by_oid.emplace(oid, !looks_binary(content) && detect_client_files(content, lib));
  }

  std::unordered_map<std::string, std::int64_t> imports_by_commit;
  git.scan_added_lines(tip, [&](const std::string& commit, const std::string& file,
                                std::string_view line) {
    if (!is_source_path(file)) return;
    if (!line.empty() && line.back() == '\r') line.remove_suffix(1);
    if (line_imports_library(line, lib)) ++imports_by_commit[commit];
  });

  std::vector<CommitEvent> events;
  events.reserve(commits.size());
  for (const auto& c : commits) {
    if (c.parent_count > 1) continue;  // git log already excludes merges; keep the contract local
    if (authored_cutoff && c.authored_at > *authored_cutoff) continue;
    ++report.commits_scanned;

    const Resolution who = resolver.resolve({c.author_name, c.author_email, c.id, project.repo_id});
    if (who.fallback) report.fallback_authors.push_back(c.author_email);

    CommitEvent ev;
    ev.developer = who.account_id;
    ev.project = project.repo_id;
    ev.commit_id = c.id;
    ev.authored_at = c.authored_at;
    for (const auto& f : c.files) {
      ev.churn_total += f.lines_added + f.lines_deleted;
      if (!is_source_path(f.path)) continue;
      const std::string& oid = f.status == 'D' ? f.old_oid : f.new_oid;
      if (is_null_oid(oid)) continue;
      const auto it = client_by_oid.find(oid);
      if (it == client_by_oid.end()) {
        report.commit_errors.push_back(project.repo_id + ":" + c.id + ": unreadable object " +
                                       oid + " for " + f.path);
        continue;
      }
      if (it->second) {
        ev.churn_client += f.lines_added + f.lines_deleted;
        ev.touched_client_file = true;
      }
    }
    const auto imp = imports_by_commit.find(c.id);
    ev.imports_added = imp == imports_by_commit.end() ? 0 : imp->second;
    // An added import makes its file a client file post-commit.
    if (ev.imports_added > 0) ev.touched_client_file = true;
    events.push_back(std::move(ev));
  }

  std::sort(events.begin(), events.end(), [](const CommitEvent& a, const CommitEvent& b) {
    return std::tie(a.authored_at, a.commit_id) < std::tie(b.authored_at, b.commit_id);
  });
  return events;
}

std::int64_t count_added_imports(std::string_view diff, const LibrarySpec& lib) {
  std::int64_t count = 0;
  std::size_t start = 0;
  while (start <= diff.size()) {
    std::size_t end = diff.find('\n', start);
    if (end == std::string_view::npos) end = diff.size();
    std::string_view line = diff.substr(start, end - start);
    if (!line.empty() && line.back() == '\r') line.remove_suffix(1);
    if (line.size() >= 1 && line[0] == '+' && line.rfind("+++", 0) != 0) {
      line.remove_prefix(1);
      if (line_imports_library(line, lib)) ++count;
    }
    if (end == diff.size()) break;
    start = end + 1;
  }
  return count;
}

namespace {

const std::vector<std::string> kEventHeader = {
    "developer", "project",      "commit",       "authored_at",
    "churn_total", "churn_client", "touched_client_file", "imports_added"};

}  // namespace

std::string events_to_csv(const std::vector<CommitEvent>& events) {
  std::string out = csv_write_row(kEventHeader);
  for (const auto& ev : events) {
    out += csv_write_row({ev.developer, ev.project, ev.commit_id,
                          format_iso8601(ev.authored_at), std::to_string(ev.churn_total),
                          std::to_string(ev.churn_client),
                          ev.touched_client_file ? "true" : "false",
                          std::to_string(ev.imports_added)});
  }
  return out;
}

std::vector<CommitEvent> events_from_csv(const std::string& text) {
  const auto rows = csv_parse(text);
  if (rows.empty() || rows[0] != kEventHeader) {
    throw ParseError("events.csv: missing or wrong header row", 0);
  }
  std::vector<CommitEvent> events;
  for (std::size_t i = 1; i < rows.size(); ++i) {
    const auto& row = rows[i];
    if (row.size() != kEventHeader.size()) {
      throw ParseError("events.csv: row " + std::to_string(i + 1) + " has " +
                           std::to_string(row.size()) + " fields",
                       0);
    }
    CommitEvent ev;
    ev.developer = row[0];
    ev.project = row[1];
    ev.commit_id = row[2];
    ev.authored_at = parse_timestamp(row[3]);
    ev.churn_total = parse_int(row[4]);
    ev.churn_client = parse_int(row[5]);
    if (row[6] != "true" && row[6] != "false") {
      throw ParseError("events.csv: bad boolean '" + row[6] + "'", 0);
    }
    ev.touched_client_file = row[6] == "true";
    ev.imports_added = parse_int(row[7]);
    events.push_back(std::move(ev));
  }
  return events;
}

void write_events(const std::filesystem::path& path, const std::vector<CommitEvent>& events) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error("cannot write " + path.string());
  out << events_to_csv(events);
}

std::vector<CommitEvent> read_events(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error("cannot read " + path.string());
  std::ostringstream buf;
  buf << in.rdbuf();
  return events_from_csv(buf.str());
}

}  // namespace libexpert
