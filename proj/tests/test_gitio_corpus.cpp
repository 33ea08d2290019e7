#include <algorithm>
#include <fstream>
#include <map>
#include <string>
#include <vector>

#include "doctest.h"
#include "fixture_repo.hpp"
#include "libexpert/corpus.hpp"
#include "libexpert/errors.hpp"
#include "libexpert/gitio.hpp"

using namespace libexpert;
using namespace libexpert::testing;

namespace {

constexpr std::int64_t kT0 = 1514764800;  // 2018-01-01T00:00:00Z
constexpr std::int64_t kDay = 86400;

struct ScriptedRepo {
  std::string c1, c2, c3;
};

// Three commits: add manifest + client file, grow the client file, then
// delete the readme and add a binary asset.
ScriptedRepo script_basic_history(const std::filesystem::path& dir) {
  init_repo(dir);
  ScriptedRepo ids;
  ids.c1 = commit_all(dir, {.author_name = "Alice",
                            .author_email = "alice@example.com",
                            .authored_at = kT0,
                            .message = "initial",
                            .changes = {{"package.json", package_json({"react"}), false},
                                        {"src/app.js", "import React from 'react';\nconst a = 1;\n",
                                         false},
                                        {"README.md", "hello\n", false}}});
  ids.c2 = commit_all(dir, {.author_name = "Alice",
                            .author_email = "alice@example.com",
                            .authored_at = kT0 + kDay,
                            .message = "grow",
                            .changes = {{"src/app.js",
                                         "import React from 'react';\nconst a = 1;\nconst b = 2;\n"
                                         "export default b;\n",
                                         false},
                                        {"src/util.js", "module.exports = 1;\n", false}}});
  ids.c3 = commit_all(dir, {.author_name = "Bob",
                            .author_email = "bob@example.com",
                            .authored_at = kT0 + 2 * kDay,
                            .message = "cleanup",
                            .changes = {{"README.md", "", true},
                                        {"assets/logo.png", std::string("\x89PNG\0\1\2img", 10),
                                         false}}});
  return ids;
}

}  // namespace

TEST_CASE("log_commits reports files, churn and authorship per commit") {
  TempDir tmp;
  const auto ids = script_basic_history(tmp.path());
  GitRepo repo(tmp.path());
  CHECK(repo.is_repository());

  const auto commits = repo.log_commits("HEAD");
  REQUIRE(commits.size() == 3);
  CHECK(commits[0].id == ids.c3);
  CHECK(commits[1].id == ids.c2);
  CHECK(commits[2].id == ids.c1);

  const RawCommit& c1 = commits[2];
  CHECK(c1.author_name == "Alice");
  CHECK(c1.author_email == "alice@example.com");
  CHECK(c1.authored_at == kT0);
  CHECK(c1.parent_count == 0);
  REQUIRE(c1.files.size() == 3);
  std::map<std::string, ChangedFile> by_path;
  for (const auto& f : c1.files) by_path[f.path] = f;
  CHECK(by_path.at("src/app.js").status == 'A');
  CHECK(by_path.at("src/app.js").lines_added == 2);
  CHECK(by_path.at("src/app.js").lines_deleted == 0);
  CHECK(by_path.at("README.md").lines_added == 1);
  CHECK(is_null_oid(by_path.at("src/app.js").old_oid));
  CHECK(!is_null_oid(by_path.at("src/app.js").new_oid));

  const RawCommit& c2 = commits[1];
  CHECK(c2.parent_count == 1);
  by_path.clear();
  for (const auto& f : c2.files) by_path[f.path] = f;
  CHECK(by_path.at("src/app.js").status == 'M');
  CHECK(by_path.at("src/app.js").lines_added == 2);
  CHECK(by_path.at("src/util.js").status == 'A');

  const RawCommit& c3 = commits[0];
  CHECK(c3.author_email == "bob@example.com");
  by_path.clear();
  for (const auto& f : c3.files) by_path[f.path] = f;
  CHECK(by_path.at("README.md").status == 'D');
  CHECK(by_path.at("README.md").lines_deleted == 1);
  CHECK(is_null_oid(by_path.at("README.md").new_oid));
  CHECK(by_path.at("assets/logo.png").binary);
  CHECK(by_path.at("assets/logo.png").lines_added == 0);
  CHECK(by_path.at("assets/logo.png").lines_deleted == 0);
}

TEST_CASE("tree listing and blob reads reflect the snapshot") {
  TempDir tmp;
  script_basic_history(tmp.path());
  GitRepo repo(tmp.path());

  const auto tree = repo.list_tree("HEAD");
  std::vector<std::string> paths;
  for (const auto& entry : tree) paths.push_back(entry.path);
  std::sort(paths.begin(), paths.end());
  CHECK(paths == std::vector<std::string>{"assets/logo.png", "package.json", "src/app.js",
                                          "src/util.js"});

  std::string app_oid;
  for (const auto& entry : tree)
    if (entry.path == "src/app.js") app_oid = entry.oid;
  REQUIRE(!app_oid.empty());
  const auto blobs = repo.read_blobs({app_oid});
  REQUIRE(blobs.count(app_oid) == 1);
  CHECK(blobs.at(app_oid) ==
        "import React from 'react';\nconst a = 1;\nconst b = 2;\nexport default b;\n");

  // Missing objects are simply absent.
  const auto missing = repo.read_blobs({std::string(40, 'f')});
  CHECK(missing.empty());
}

TEST_CASE("snapshot resolution honours the cutoff") {
  TempDir tmp;
  const auto ids = script_basic_history(tmp.path());
  GitRepo repo(tmp.path());

  CHECK(repo.resolve_snapshot() == ids.c3);
  CHECK(repo.resolve_snapshot(kT0 + kDay) == ids.c2);
  CHECK(repo.resolve_snapshot(kT0) == ids.c1);
  CHECK(!repo.resolve_snapshot(kT0 - 1).has_value());

  const auto [id, at] = repo.commit_id_and_time(ids.c2);
  CHECK(id == ids.c2);
  CHECK(at == kT0 + kDay);
}

TEST_CASE("scan_added_lines streams exactly the + lines") {
  TempDir tmp;
  const auto ids = script_basic_history(tmp.path());
  GitRepo repo(tmp.path());

  std::map<std::string, std::vector<std::string>> added;  // commit -> lines
  repo.scan_added_lines("HEAD", [&](const std::string& commit, const std::string& path,
                                    std::string_view line) {
    added[commit].push_back(path + ": " + std::string(line));
  });
  // c1 adds the manifest, two app lines and the readme line.
  const auto& c1_lines = added.at(ids.c1);
  CHECK(std::count(c1_lines.begin(), c1_lines.end(),
                   "src/app.js: import React from 'react';") == 1);
  CHECK(std::count(c1_lines.begin(), c1_lines.end(), "README.md: hello") == 1);
  // c2 adds two lines to app.js and one to util.js.
  const auto& c2_lines = added.at(ids.c2);
  CHECK(std::count(c2_lines.begin(), c2_lines.end(), "src/app.js: const b = 2;") == 1);
  CHECK(std::count(c2_lines.begin(), c2_lines.end(), "src/util.js: module.exports = 1;") == 1);
  // c3 only deletes text and adds a binary file: no added text lines.
  CHECK(added.count(ids.c3) == 0);
}

TEST_CASE("discover_repos handles flat, owner/name and list-file layouts") {
  TempDir tmp;
  const auto root = tmp.path();
  init_repo(root / "flat");
  commit_all(root / "flat", {.authored_at = kT0, .changes = {{"a.txt", "a\n", false}}});
  init_repo(root / "acme" / "app");
  commit_all(root / "acme" / "app", {.authored_at = kT0, .changes = {{"b.txt", "b\n", false}}});
  init_repo(root / "acme" / "web");
  commit_all(root / "acme" / "web", {.authored_at = kT0, .changes = {{"c.txt", "c\n", false}}});

  const auto repos = discover_repos(root);
  std::vector<std::string> ids;
  for (const auto& repo : repos) ids.push_back(repo.repo_id);
  CHECK(ids == std::vector<std::string>{"acme/app", "acme/web", "flat"});

  const auto list_path = root / "repos.txt";
  std::ofstream(list_path) << "# fixtures\nacme/web\n\nacme/app\n";
  const auto listed = discover_repos(list_path, root);
  REQUIRE(listed.size() == 2);
  CHECK(listed[0].repo_id == "acme/app");
  CHECK(listed[0].path == root / "acme/app");
  CHECK(listed[1].repo_id == "acme/web");

  CHECK_THROWS_AS(discover_repos(root / "nowhere"), Error);
}

TEST_CASE("build_corpus keeps dependents, skips others, records errors") {
  TempDir tmp;
  const auto root = tmp.path();

  const auto client = root / "client";
  script_basic_history(client);

  const auto plain = root / "plain";
  init_repo(plain);
  commit_all(plain, {.authored_at = kT0,
                     .changes = {{"package.json", package_json({"lodash"}), false},
                                 {"src/x.js", "const x = require('lodash');\n", false}}});

  const std::vector<RepoRef> repos = {{"plain", plain},
                                      {"client", client},
                                      {"ghost", root / "ghost"}};
  const CorpusResult corpus = build_corpus(repos, make_library_spec("react", "react"),
                                           std::nullopt, 2);
  REQUIRE(corpus.projects.size() == 1);
  const ClientProject& project = corpus.projects[0];
  CHECK(project.repo_id == "client");
  REQUIRE(project.manifest_evidence.size() == 1);
  CHECK(project.manifest_evidence[0].manifest_path == "package.json");
  CHECK(project.manifest_evidence[0].section == "dependencies");
  CHECK(project.client_files == std::vector<std::string>{"src/app.js"});
  CHECK(project.head_snapshot.committed_at == kT0 + 2 * kDay);
  REQUIRE(corpus.errors.size() == 1);
  CHECK(corpus.errors[0].repo_id == "ghost");

  // Input permutation does not change the result.
  const std::vector<RepoRef> shuffled = {{"ghost", root / "ghost"},
                                         {"client", client},
                                         {"plain", plain}};
  const CorpusResult again = build_corpus(shuffled, make_library_spec("react", "react"),
                                          std::nullopt, 1);
  CHECK(corpus_to_json(again, make_library_spec("react", "react")) ==
        corpus_to_json(corpus, make_library_spec("react", "react")));
}

TEST_CASE("build_corpus freezes the tree at an earlier snapshot") {
  TempDir tmp;
  const auto dir = tmp.path() / "repo";
  const auto ids = script_basic_history(dir);

  const std::vector<RepoRef> repos = {{"repo", dir}};
  const auto lib = make_library_spec("react", "react");
  const CorpusResult at_c1 = build_corpus(repos, lib, kT0, 1);
  REQUIRE(at_c1.projects.size() == 1);
  CHECK(at_c1.projects[0].head_snapshot.commit_id == ids.c1);
  CHECK(at_c1.projects[0].head_snapshot.committed_at == kT0);
  CHECK(at_c1.projects[0].client_files == std::vector<std::string>{"src/app.js"});

  // Before any commit: the repo cannot be frozen, so it becomes an error.
  const CorpusResult before = build_corpus(repos, lib, kT0 - 1, 1);
  CHECK(before.projects.empty());
  REQUIRE(before.errors.size() == 1);
  CHECK(before.errors[0].repo_id == "repo");
}

TEST_CASE("corpus JSON round-trips") {
  TempDir tmp;
  const auto dir = tmp.path() / "repo";
  script_basic_history(dir);
  const auto lib = make_library_spec("react", "react");
  const CorpusResult corpus = build_corpus({{"repo", dir}}, lib, std::nullopt, 1);

  const std::string json = corpus_to_json(corpus, lib);
  const CorpusResult back = corpus_from_json(json);
  REQUIRE(back.projects.size() == corpus.projects.size());
  CHECK(back.projects[0].repo_id == corpus.projects[0].repo_id);
  CHECK(back.projects[0].repo_path == corpus.projects[0].repo_path);
  CHECK(back.projects[0].client_files == corpus.projects[0].client_files);
  CHECK(back.projects[0].head_snapshot.commit_id == corpus.projects[0].head_snapshot.commit_id);
  CHECK(back.projects[0].head_snapshot.committed_at ==
        corpus.projects[0].head_snapshot.committed_at);
  REQUIRE(back.projects[0].manifest_evidence.size() == 1);
  CHECK(back.projects[0].manifest_evidence[0].section ==
        corpus.projects[0].manifest_evidence[0].section);
  CHECK(corpus_to_json(back, lib) == json);
}
