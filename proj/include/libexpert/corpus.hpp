#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include "libexpert/library_spec.hpp"
#include "libexpert/manifest.hpp"

namespace libexpert {

// A repository available for scanning, before we know whether it is a client.
struct RepoRef {
  std::string repo_id;  // owner/name, or directory name for ad-hoc corpora
  std::filesystem::path path;
};

struct SnapshotRef {
  std::string commit_id;
  std::int64_t committed_at = 0;
};

// A repository with manifest evidence that it depends on the target library.
struct ClientProject {
  std::string repo_id;
  std::filesystem::path repo_path;
  std::vector<DependencyEvidence> manifest_evidence;  // non-empty by construction
  std::vector<std::string> client_files;              // sorted, unique, repo-relative
  SnapshotRef head_snapshot;
};

struct RepoError {
  std::string repo_id;
  std::string message;
};

struct CorpusResult {
  std::vector<ClientProject> projects;  // sorted by repo_id
  std::vector<RepoError> errors;        // repos skipped, with reasons
};

// Enumerates repositories from either a directory of git repositories
// (one- or two-level owner/name layout) or a newline-delimited list file of
// `owner/name` entries resolved against the file's directory (or, when set,
// `repos_root`). Blank lines and `#` comments in list files are ignored.
std::vector<RepoRef> discover_repos(
    const std::filesystem::path& input,
    const std::optional<std::filesystem::path>& repos_root = std::nullopt);

// Scans each repo's tree at the snapshot for dependency manifests naming the
// library and, when evidence exists, collects client files (source files
// importing the library). Unreachable or empty repositories become errors in
// the result; the build continues. Output is sorted by repo_id regardless of
// the input order.
CorpusResult build_corpus(const std::vector<RepoRef>& repos,
                          const LibrarySpec& lib,
                          std::optional<std::int64_t> snapshot = std::nullopt,
                          unsigned threads = 1);

// corpus.json round-trip. Schema: {"library": id, "projects": [...],
// "errors": [...]}; see docs/artifacts.md.
std::string corpus_to_json(const CorpusResult& corpus, const LibrarySpec& lib);
CorpusResult corpus_from_json(const std::string& text);

void save_corpus(const std::filesystem::path& path, const CorpusResult& corpus,
                 const LibrarySpec& lib);
CorpusResult load_corpus(const std::filesystem::path& path);

}  // namespace libexpert
