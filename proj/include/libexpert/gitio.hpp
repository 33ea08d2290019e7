#pragma once

#include <cstdint>
#include <filesystem>
#include <functional>
#include <map>
#include <optional>
#include <string>
#include <vector>

namespace libexpert {

struct CommandResult {
  int exit_code = -1;
  std::string out;
  std::string err;
};

// Runs a command in `cwd`, optionally feeding stdin from a file, capturing
// stdout/stderr. Throws Error if the command cannot be launched at all.
CommandResult run_command(const std::vector<std::string>& argv,
                          const std::filesystem::path& cwd,
                          const std::optional<std::filesystem::path>& stdin_file = std::nullopt);

// One file touched by a commit, as reported by `git log --raw --numstat`.
struct ChangedFile {
  std::string path;
  std::string old_oid;  // 40*'0' for added files
  std::string new_oid;  // 40*'0' for deleted files
  char status = 'M';    // A, M, D, T
  std::int64_t lines_added = 0;
  std::int64_t lines_deleted = 0;
  bool binary = false;
};

struct RawCommit {
  std::string id;
  std::string author_name;
  std::string author_email;
  std::int64_t authored_at = 0;
  int parent_count = 0;
  std::vector<ChangedFile> files;
};

struct TreeEntry {
  std::string oid;
  std::string path;
};

class GitRepo {
 public:
  explicit GitRepo(std::filesystem::path path) : path_(std::move(path)) {}

  const std::filesystem::path& path() const { return path_; }

  bool is_repository() const;

  // Latest commit on HEAD's ancestry, optionally restricted to commit time
  // <= before. Nullopt when no commit qualifies.
  std::optional<std::string> resolve_snapshot(std::optional<std::int64_t> before = std::nullopt) const;

  // (commit id, committer timestamp) for a revision.
  std::pair<std::string, std::int64_t> commit_id_and_time(const std::string& rev) const;

  // Ancestry of `tip` in reverse chronological order, merges excluded,
  // renames not followed, with per-file raw + numstat data.
  std::vector<RawCommit> log_commits(const std::string& tip) const;

  // All blobs in the tree at `rev`.
  std::vector<TreeEntry> list_tree(const std::string& rev) const;

  // Contents of blobs by object id via one cat-file batch; missing objects
  // are absent from the result.
  std::map<std::string, std::string> read_blobs(const std::vector<std::string>& oids) const;

  // Streams every added line of every non-merge commit's patches.
  // fn(commit_id, file_path, line) is called once per '+' line.
  void scan_added_lines(const std::string& tip,
                        const std::function<void(const std::string&, const std::string&,
                                                 std::string_view)>& fn) const;

 private:
  CommandResult git(const std::vector<std::string>& args,
                    const std::optional<std::filesystem::path>& stdin_file = std::nullopt) const;

  std::filesystem::path path_;
};

inline bool is_null_oid(const std::string& oid) {
  return oid.find_first_not_of('0') == std::string::npos;
}

}  // namespace libexpert
