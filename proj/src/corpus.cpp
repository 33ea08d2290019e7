#include "libexpert/corpus.hpp"

#include <algorithm>
#include <fstream>
#include <sstream>

#include <json.hpp>

#include "libexpert/errors.hpp"
#include "libexpert/gitio.hpp"
#include "libexpert/imports.hpp"
#include "libexpert/parallel.hpp"

namespace libexpert {

namespace {

bool looks_like_git_repo(const std::filesystem::path& p) {
  std::error_code ec;
  if (std::filesystem::exists(p / ".git", ec)) return true;
  // Bare layout: HEAD file plus objects directory.
  return std::filesystem::exists(p / "HEAD", ec) &&
         std::filesystem::is_directory(p / "objects", ec);
}

std::string trim(const std::string& s) {
  const auto first = s.find_first_not_of(" \t\r\n");
  if (first == std::string::npos) return "";
  const auto last = s.find_last_not_of(" \t\r\n");
  return s.substr(first, last - first + 1);
}

// One repo either becomes a ClientProject or explains why it did not.
struct ScanOutcome {
  std::optional<ClientProject> project;
  std::optional<RepoError> error;
};

ScanOutcome scan_repo(const RepoRef& repo, const LibrarySpec& lib,
                      std::optional<std::int64_t> snapshot) {
  ScanOutcome outcome;
  GitRepo git(repo.path);
  if (!git.is_repository()) {
    outcome.error = {repo.repo_id, "not a readable git repository: " + repo.path.string()};
    return outcome;
  }
  std::optional<std::string> tip;
  try {
    tip = git.resolve_snapshot(snapshot);
  } catch (const Error& e) {
    outcome.error = {repo.repo_id, e.what()};
    return outcome;
  }
  if (!tip) {
    outcome.error = {repo.repo_id, "no commit at or before the snapshot"};
    return outcome;
  }

  try {
    const auto [commit_id, committed_at] = git.commit_id_and_time(*tip);
    const auto tree = git.list_tree(commit_id);

    std::vector<std::string> manifest_oids;
    std::vector<const TreeEntry*> manifests;
    std::vector<std::string> source_oids;
    std::vector<const TreeEntry*> sources;
    for (const auto& entry : tree) {
      if (manifest_kind_for_path(entry.path)) {
        manifest_oids.push_back(entry.oid);
        manifests.push_back(&entry);
      } else if (is_source_path(entry.path)) {
        source_oids.push_back(entry.oid);
        sources.push_back(&entry);
      }
    }
    if (manifests.empty()) return outcome;  // not a client, not an error

    std::vector<DependencyEvidence> evidence;
    const auto manifest_blobs = git.read_blobs(manifest_oids);
    for (const auto* entry : manifests) {
      const auto blob = manifest_blobs.find(entry->oid);
      if (blob == manifest_blobs.end()) continue;
      const auto kind = manifest_kind_for_path(entry->path);
      auto found = parse_manifest(blob->second, *kind, lib);
      if (found) {
        found->manifest_path = entry->path;
        evidence.push_back(std::move(*found));
      }
    }
    if (evidence.empty()) return outcome;

    ClientProject project;
    project.repo_id = repo.repo_id;
    project.repo_path = repo.path;
    project.manifest_evidence = std::move(evidence);
    project.head_snapshot = {commit_id, committed_at};

    const auto source_blobs = git.read_blobs(source_oids);
    for (const auto* entry : sources) {
      const auto blob = source_blobs.find(entry->oid);
      if (blob == source_blobs.end()) continue;
      if (looks_binary(blob->second)) continue;
      if (detect_client_files(blob->second, lib)) {
        project.client_files.push_back(entry->path);
      }
    }
    std::sort(project.client_files.begin(), project.client_files.end());
    project.client_files.erase(
        std::unique(project.client_files.begin(), project.client_files.end()),
        project.client_files.end());
    outcome.project = std::move(project);
  } catch (const ParseError& e) {
    outcome.error = {repo.repo_id, std::string("manifest parse error: ") + e.what()};
  } catch (const Error& e) {
    outcome.error = {repo.repo_id, e.what()};
  }
  return outcome;
}

nlohmann::json evidence_to_json(const DependencyEvidence& e) {
  return {{"manifest_path", e.manifest_path},
          {"kind", manifest_kind_name(e.kind)},
          {"section", e.section}};
}

DependencyEvidence evidence_from_json(const nlohmann::json& j) {
  DependencyEvidence e;
  e.manifest_path = j.at("manifest_path").get<std::string>();
  const auto kind = j.at("kind").get<std::string>();
  e.kind = kind == "bower" ? ManifestKind::bower : ManifestKind::npm_package;
  e.section = j.at("section").get<std::string>();
  return e;
}

}  // namespace

std::vector<RepoRef> discover_repos(
    const std::filesystem::path& input,
    const std::optional<std::filesystem::path>& repos_root) {
  std::vector<RepoRef> repos;
  std::error_code ec;
  if (std::filesystem::is_directory(input, ec)) {
    for (const auto& child : std::filesystem::directory_iterator(input)) {
      if (!child.is_directory()) continue;
      if (looks_like_git_repo(child.path())) {
        repos.push_back({child.path().filename().string(), child.path()});
        continue;
      }
      // owner/name layout: one extra level.
      for (const auto& grandchild : std::filesystem::directory_iterator(child.path())) {
        if (!grandchild.is_directory() || !looks_like_git_repo(grandchild.path())) continue;
        repos.push_back({child.path().filename().string() + "/" +
                             grandchild.path().filename().string(),
                         grandchild.path()});
      }
    }
  } else if (std::filesystem::is_regular_file(input, ec)) {
    std::ifstream in(input);
    if (!in) throw Error("cannot open repo list: " + input.string());
    const std::filesystem::path root = repos_root.value_or(input.parent_path());
    std::string line;
    while (std::getline(in, line)) {
      const std::string id = trim(line);
      if (id.empty() || id[0] == '#') continue;
      repos.push_back({id, root / id});
    }
  } else {
    throw Error("repo input is neither a directory nor a list file: " + input.string());
  }
  std::sort(repos.begin(), repos.end(),
            [](const RepoRef& a, const RepoRef& b) { return a.repo_id < b.repo_id; });
  return repos;
}

CorpusResult build_corpus(const std::vector<RepoRef>& repos, const LibrarySpec& lib,
                          std::optional<std::int64_t> snapshot, unsigned threads) {
  lib.validate();
  const auto outcomes = parallel_map(
      repos,
      [&](const RepoRef& repo) { return scan_repo(repo, lib, snapshot); },
      threads);

  CorpusResult result;
  for (const auto& outcome : outcomes) {
    if (outcome.project) result.projects.push_back(*outcome.project);
    if (outcome.error) result.errors.push_back(*outcome.error);
  }
  std::sort(result.projects.begin(), result.projects.end(),
            [](const ClientProject& a, const ClientProject& b) { return a.repo_id < b.repo_id; });
  std::sort(result.errors.begin(), result.errors.end(),
            [](const RepoError& a, const RepoError& b) { return a.repo_id < b.repo_id; });
  return result;
}

std::string corpus_to_json(const CorpusResult& corpus, const LibrarySpec& lib) {
  nlohmann::json j;
  j["library"] = lib.id;
  j["projects"] = nlohmann::json::array();
  for (const auto& p : corpus.projects) {
    nlohmann::json evidence = nlohmann::json::array();
    for (const auto& e : p.manifest_evidence) evidence.push_back(evidence_to_json(e));
    j["projects"].push_back({{"repo_id", p.repo_id},
                             {"repo_path", p.repo_path.string()},
                             {"manifest_evidence", std::move(evidence)},
                             {"client_files", p.client_files},
                             {"head_snapshot",
                              {{"commit_id", p.head_snapshot.commit_id},
                               {"committed_at", p.head_snapshot.committed_at}}}});
  }
  j["errors"] = nlohmann::json::array();
  for (const auto& e : corpus.errors) {
    j["errors"].push_back({{"repo_id", e.repo_id}, {"message", e.message}});
  }
  return j.dump(2) + "\n";
}

CorpusResult corpus_from_json(const std::string& text) {
  nlohmann::json j;
  try {
    j = nlohmann::json::parse(text);
  } catch (const nlohmann::json::parse_error& e) {
    throw ParseError("corpus.json: " + std::string(e.what()),
                     e.byte > 0 ? e.byte - 1 : 0);
  }
  CorpusResult corpus;
  for (const auto& pj : j.at("projects")) {
    ClientProject p;
    p.repo_id = pj.at("repo_id").get<std::string>();
    p.repo_path = pj.at("repo_path").get<std::string>();
    for (const auto& ej : pj.at("manifest_evidence")) {
      p.manifest_evidence.push_back(evidence_from_json(ej));
    }
    p.client_files = pj.at("client_files").get<std::vector<std::string>>();
    p.head_snapshot.commit_id = pj.at("head_snapshot").at("commit_id").get<std::string>();
    p.head_snapshot.committed_at = pj.at("head_snapshot").at("committed_at").get<std::int64_t>();
    if (p.manifest_evidence.empty()) {
      throw Error("corpus.json: project without manifest evidence: " + p.repo_id);
    }
    corpus.projects.push_back(std::move(p));
  }
  if (j.contains("errors")) {
    for (const auto& ej : j.at("errors")) {
      corpus.errors.push_back({ej.at("repo_id").get<std::string>(),
                               ej.at("message").get<std::string>()});
    }
  }
  return corpus;
}

void save_corpus(const std::filesystem::path& path, const CorpusResult& corpus,
                 const LibrarySpec& lib) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error("cannot write " + path.string());
  out << corpus_to_json(corpus, lib);
}

CorpusResult load_corpus(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error("cannot read " + path.string());
  std::ostringstream buf;
  buf << in.rdbuf();
  return corpus_from_json(buf.str());
}

}  // namespace libexpert
