#include "libexpert/pipeline.hpp"

#include <algorithm>
#include <cstddef>
#include <fstream>
#include <ostream>
#include <set>
#include <sstream>
#include <thread>
#include <utility>

#include "libexpert/cluster.hpp"
#include "libexpert/corpus.hpp"
#include "libexpert/csv.hpp"
#include "libexpert/errors.hpp"
#include "libexpert/hash.hpp"
#include "libexpert/learn.hpp"
#include "libexpert/matrix.hpp"
#include "libexpert/miner.hpp"
#include "libexpert/numfmt.hpp"
#include "libexpert/parallel.hpp"
#include "libexpert/preprocess.hpp"
#include "libexpert/remote.hpp"
#include "libexpert/rng.hpp"
#include "libexpert/stats.hpp"
#include "libexpert/timeutil.hpp"

#include "json.hpp"

namespace libexpert {

namespace {

void require_keys(const nlohmann::json& obj, const std::set<std::string>& allowed,
                  const std::string& where) {
  for (auto it = obj.begin(); it != obj.end(); ++it) {
    if (!allowed.count(it.key()))
      throw ParseError("unknown config key '" + it.key() + "' in " + where, 0);
  }
}

std::string read_text_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot read " + path.string());
  std::ostringstream buffer;
  buffer << in.rdbuf();
  return buffer.str();
}

// Completed-stage ledger for --resume: a stage is skippable when its
// recorded artifacts still exist with the recorded content hashes and the
// config has not changed.
struct Checkpoints {
  std::filesystem::path file;
  std::string config_hash;
  nlohmann::ordered_json stages = nlohmann::ordered_json::object();

  static Checkpoints open(const std::filesystem::path& out_dir, const std::string& config_hash,
                          bool resume) {
    Checkpoints cp;
    cp.file = out_dir / "checkpoints.json";
    cp.config_hash = config_hash;
    if (resume && std::filesystem::exists(cp.file)) {
      try {
        const nlohmann::json doc = nlohmann::json::parse(read_text_file(cp.file));
        if (doc.value("config_hash", "") == config_hash && doc.contains("stages") &&
            doc["stages"].is_object()) {
          cp.stages = doc["stages"];
        }
      } catch (const nlohmann::json::exception&) {
        // unreadable checkpoint file: start over
      }
    }
    return cp;
  }

  bool can_skip(const std::string& stage, const std::vector<std::string>& expected_rel,
                const std::filesystem::path& out_dir,
                std::vector<std::pair<std::string, std::string>>* hashes) const {
    if (!stages.contains(stage)) return false;
    const auto& entry = stages[stage];
    if (!entry.contains("artifacts") || !entry["artifacts"].is_object()) return false;
    const auto& artifacts = entry["artifacts"];
    if (artifacts.size() != expected_rel.size()) return false;
    std::vector<std::pair<std::string, std::string>> found;
    for (const std::string& rel : expected_rel) {
      if (!artifacts.contains(rel)) return false;
      const std::filesystem::path path = out_dir / rel;
      if (!std::filesystem::exists(path)) return false;
      const std::string recorded = artifacts[rel].get<std::string>();
      if (hash_file(path) != recorded) return false;
      found.emplace_back(rel, recorded);
    }
    if (hashes) *hashes = std::move(found);
    return true;
  }

  void record(const std::string& stage,
              const std::vector<std::pair<std::string, std::string>>& artifacts) {
    nlohmann::ordered_json entry;
    entry["artifacts"] = nlohmann::ordered_json::object();
    for (const auto& [rel, hash] : artifacts) entry["artifacts"][rel] = hash;
    stages[stage] = std::move(entry);
    save();
  }

  void save() const {
    nlohmann::ordered_json doc;
    doc["config_hash"] = config_hash;
    doc["stages"] = stages;
    std::ofstream out(file, std::ios::binary);
    if (!out) throw IoError("cannot write " + file.string());
    out << doc.dump(2) << "\n";
  }
};

LabelScheme scheme_by_name(const std::string& name) {
  if (name == "ternary") return ternary_scheme();
  if (name == "five") return five_class_scheme();
  throw Error("unknown class scheme '" + name + "' (expected ternary or five)");
}

}  // namespace

void PipelineConfig::validate() const {
  if (libraries.empty()) throw Error("config needs at least one library");
  std::set<std::string> ids;
  for (const LibrarySpec& lib : libraries) {
    lib.validate();
    if (lib.id.empty()) throw Error("every library needs an id");
    if (!ids.insert(lib.id).second) throw Error("duplicate library id '" + lib.id + "'");
  }
  const int sources = (repos_dir.empty() ? 0 : 1) + (repo_list.empty() ? 0 : 1) +
                      (remote_query.empty() ? 0 : 1);
  if (sources != 1)
    throw Error("config needs exactly one repository source: repos.dir, repos.list or "
                "repos.remote_query");
  if (!remote_query.empty()) {
    if (remote_base_url.empty()) throw Error("repos.remote_query needs remote_base_url");
    if (repos_root.empty())
      throw Error("repos.remote_query needs repos.root pointing at local clones");
  }
  if (snapshot.empty()) throw Error("config needs a snapshot timestamp");
  parse_timestamp(snapshot);
  scheme_by_name(scheme);
  if (classifiers.empty()) throw Error("config needs at least one classifier");
  for (const std::string& name : classifiers) classifier_kind_from_name(name);
  if (folds < 2) throw Error("folds must be at least 2");
  if (smote && (smote_knn < 1 || smote_pct <= 0))
    throw Error("smote needs knn >= 1 and pct > 0");
  if (k_max < 2) throw Error("k_max must be at least 2");
  if (restarts < 1) throw Error("restarts must be at least 1");
  if (threshold_override && (*threshold_override <= 0 || *threshold_override > 1))
    throw Error("threshold_override must be in (0, 1]");
  if (out_dir.empty()) throw Error("config needs an output directory");
  if (threads < 0) throw Error("threads must be >= 0");
  if (remote_count < 1 && !remote_query.empty())
    throw Error("remote_count must be at least 1");
}

unsigned PipelineConfig::effective_threads() const {
  if (threads > 0) return static_cast<unsigned>(threads);
  const unsigned hw = std::thread::hardware_concurrency();
  return hw == 0 ? 1 : hw;
}

PipelineConfig config_from_json(const std::string& text) {
  nlohmann::json doc;
  try {
    doc = nlohmann::json::parse(text);
  } catch (const nlohmann::json::exception& e) {
    throw ParseError(std::string("config is not valid JSON: ") + e.what(), 0);
  }
  if (!doc.is_object()) throw ParseError("config root must be an object", 0);
  require_keys(doc,
               {"libraries", "repos", "snapshot", "ground_truth", "scheme", "classifiers",
                "folds", "smote", "k_max", "restarts", "threshold_override", "seed", "out_dir",
                "threads"},
               "config");

  PipelineConfig cfg;
  if (doc.contains("libraries")) {
    if (!doc["libraries"].is_array()) throw ParseError("libraries must be an array", 0);
    for (const auto& item : doc["libraries"]) {
      require_keys(item, {"id", "manifest_name", "repo_slug", "import_patterns"}, "libraries[]");
      LibrarySpec lib;
      lib.manifest_name = item.value("manifest_name", "");
      lib.id = item.value("id", lib.manifest_name);
      if (lib.manifest_name.empty()) lib.manifest_name = lib.id;
      lib.repo_slug = item.value("repo_slug", "");
      lib.import_patterns = item.value("import_patterns", std::vector<std::string>{});
      if (lib.import_patterns.empty() && !lib.manifest_name.empty())
        lib.import_patterns = {lib.manifest_name};
      cfg.libraries.push_back(std::move(lib));
    }
  }
  if (doc.contains("repos")) {
    const auto& repos = doc["repos"];
    require_keys(repos, {"dir", "list", "remote_query", "remote_base_url", "remote_count", "root"},
                 "repos");
    cfg.repos_dir = repos.value("dir", "");
    cfg.repo_list = repos.value("list", "");
    cfg.remote_query = repos.value("remote_query", "");
    cfg.remote_base_url = repos.value("remote_base_url", "");
    cfg.remote_count = repos.value("remote_count", 100);
    cfg.repos_root = repos.value("root", "");
  }
  cfg.snapshot = doc.value("snapshot", "");
  cfg.ground_truth = doc.value("ground_truth", "");
  cfg.scheme = doc.value("scheme", "ternary");
  if (doc.contains("classifiers"))
    cfg.classifiers = doc["classifiers"].get<std::vector<std::string>>();
  cfg.folds = doc.value("folds", 5);
  if (doc.contains("smote")) {
    const auto& smote = doc["smote"];
    require_keys(smote, {"enabled", "knn", "pct"}, "smote");
    cfg.smote = smote.value("enabled", true);
    cfg.smote_knn = smote.value("knn", 3);
    cfg.smote_pct = smote.value("pct", 0.30);
  }
  cfg.k_max = doc.value("k_max", 8);
  cfg.restarts = doc.value("restarts", 50);
  if (doc.contains("threshold_override") && !doc["threshold_override"].is_null())
    cfg.threshold_override = doc["threshold_override"].get<double>();
  cfg.seed = doc.value("seed", std::uint64_t{1});
  cfg.out_dir = doc.value("out_dir", "out");
  cfg.threads = doc.value("threads", 0);
  return cfg;
}

std::string config_to_json(const PipelineConfig& config) {
  nlohmann::ordered_json doc;
  doc["libraries"] = nlohmann::ordered_json::array();
  for (const LibrarySpec& lib : config.libraries) {
    nlohmann::ordered_json item;
    item["id"] = lib.id;
    item["manifest_name"] = lib.manifest_name;
    item["repo_slug"] = lib.repo_slug;
    item["import_patterns"] = lib.import_patterns;
    doc["libraries"].push_back(std::move(item));
  }
  nlohmann::ordered_json repos;
  repos["dir"] = config.repos_dir;
  repos["list"] = config.repo_list;
  repos["remote_query"] = config.remote_query;
  repos["remote_base_url"] = config.remote_base_url;
  repos["remote_count"] = config.remote_count;
  repos["root"] = config.repos_root;
  doc["repos"] = std::move(repos);
  doc["snapshot"] = config.snapshot;
  doc["ground_truth"] = config.ground_truth;
  doc["scheme"] = config.scheme;
  doc["classifiers"] = config.classifiers;
  doc["folds"] = config.folds;
  doc["smote"] = {{"enabled", config.smote}, {"knn", config.smote_knn}, {"pct", config.smote_pct}};
  doc["k_max"] = config.k_max;
  doc["restarts"] = config.restarts;
  if (config.threshold_override)
    doc["threshold_override"] = *config.threshold_override;
  else
    doc["threshold_override"] = nullptr;
  doc["seed"] = config.seed;
  doc["out_dir"] = config.out_dir;
  doc["threads"] = config.threads;
  return doc.dump(2) + "\n";
}

PipelineConfig load_config(const std::filesystem::path& path) {
  return config_from_json(read_text_file(path));
}

std::vector<GroundTruthLabel> ingest_ground_truth(
    const std::filesystem::path& path, const std::vector<std::string>& known_libraries) {
  const auto rows = csv_read_file(path);
  if (rows.empty()) throw Error("ground truth file " + path.string() + " is empty");
  const std::vector<std::string> header{"developer", "library", "score"};
  if (rows.front() != header)
    throw Error("ground truth header must be developer,library,score");

  const std::set<std::string> known(known_libraries.begin(), known_libraries.end());
  std::vector<GroundTruthLabel> labels;
  std::vector<std::string> issues;
  std::set<std::pair<std::string, std::string>> seen;
  for (std::size_t i = 1; i < rows.size(); ++i) {
    const std::size_t line = i + 1;
    const auto& row = rows[i];
    auto complain = [&](const std::string& what) {
      issues.push_back("line " + std::to_string(line) + ": " + what);
    };
    if (row.size() != 3) {
      complain("expected 3 fields, got " + std::to_string(row.size()));
      continue;
    }
    const std::string& developer = row[0];
    const std::string& library = row[1];
    if (developer.empty()) {
      complain("developer is empty");
      continue;
    }
    if (!known.empty() && !known.count(library)) {
      complain("unknown library '" + library + "'");
      continue;
    }
    std::int64_t score = 0;
    try {
      score = parse_int(row[2]);
    } catch (const ParseError&) {
      complain("score '" + row[2] + "' is not an integer");
      continue;
    }
    if (score < 1 || score > 5) {
      complain("score " + std::to_string(score) + " outside 1-5");
      continue;
    }
    if (!seen.emplace(developer, library).second) {
      complain("duplicate row for (" + developer + ", " + library + ")");
      continue;
    }
    labels.push_back(make_label(developer, library, static_cast<int>(score)));
  }
  if (!issues.empty()) {
    std::string message = "ground truth rejected:";
    for (const std::string& issue : issues) message += "\n  " + issue;
    throw Error(message);
  }
  return labels;
}

PipelineResult run_pipeline(const PipelineConfig& config, std::ostream* progress) {
  config.validate();
  const unsigned threads = config.effective_threads();
  const std::filesystem::path out_dir = config.out_dir;
  std::filesystem::create_directories(out_dir);
  const std::int64_t snapshot_ts = parse_timestamp(config.snapshot);
  const LabelScheme scheme = scheme_by_name(config.scheme);

  const bool degraded = config.ground_truth.empty();
  std::vector<GroundTruthLabel> truth;
  if (!degraded) {
    std::vector<std::string> ids;
    for (const LibrarySpec& lib : config.libraries) ids.push_back(lib.id);
    truth = ingest_ground_truth(config.ground_truth, ids);
  }

  PipelineConfig canonical = config;
  canonical.resume = false;
  const std::string config_json = config_to_json(canonical);
  const std::string config_hash = hash_bytes(config_json);
  Checkpoints checkpoints = Checkpoints::open(out_dir, config_hash, config.resume);

  PipelineResult result;
  result.out_dir = out_dir;
  result.degraded = degraded;

  const bool single = config.libraries.size() == 1;

  for (const LibrarySpec& lib : config.libraries) {
    const std::filesystem::path lib_dir = single ? out_dir : out_dir / lib.id;
    std::filesystem::create_directories(lib_dir);
    auto rel = [&](const std::string& name) { return single ? name : lib.id + "/" + name; };

    std::map<std::string, GroundTruthLabel> lib_truth;
    for (const GroundTruthLabel& label : truth)
      if (label.library == lib.id) lib_truth.emplace(label.developer, label);

    auto stage = [&](const std::string& short_name, const std::vector<std::string>& artifact_names,
                     bool skip, const std::string& skip_note, auto&& body) {
      const std::string name = short_name + "/" + lib.id;
      StageStatus status;
      status.name = name;
      if (skip) {
        status.skipped = true;
        status.note = skip_note;
      } else {
        std::vector<std::string> rels;
        rels.reserve(artifact_names.size());
        for (const std::string& artifact : artifact_names) rels.push_back(rel(artifact));
        std::vector<std::pair<std::string, std::string>> resumed;
        if (checkpoints.can_skip(name, rels, out_dir, &resumed)) {
          status.skipped = true;
          status.note = "resumed from checkpoint";
          status.artifacts = std::move(resumed);
        } else {
          try {
            status.note = body();
          } catch (const std::exception& e) {
            throw StageError(name, e.what());
          }
          for (const std::string& r : rels) status.artifacts.emplace_back(r, hash_file(out_dir / r));
          checkpoints.record(name, status.artifacts);
        }
      }
      if (progress)
        *progress << "[" << status.name << "] " << (status.skipped ? "skipped: " : "")
                  << status.note << "\n";
      result.stages.push_back(std::move(status));
    };

    stage("corpus", {"corpus.json"}, false, "", [&]() -> std::string {
      std::vector<RepoRef> repos;
      if (!config.repos_dir.empty()) {
        repos = discover_repos(config.repos_dir);
      } else if (!config.repo_list.empty()) {
        std::optional<std::filesystem::path> root;
        if (!config.repos_root.empty()) root = config.repos_root;
        repos = discover_repos(config.repo_list, root);
      } else {
        RemoteOptions opts;
        opts.base_url = config.remote_base_url;
        for (const std::string& id : fetch_top_repos(opts, config.remote_query, config.remote_count))
          repos.push_back({id, std::filesystem::path(config.repos_root) / id});
      }
      const CorpusResult corpus = build_corpus(repos, lib, snapshot_ts, threads);
      save_corpus(lib_dir / "corpus.json", corpus, lib);
      return std::to_string(corpus.projects.size()) + " client projects of " +
             std::to_string(repos.size()) + " repos (" + std::to_string(corpus.errors.size()) +
             " repo errors)";
    });

    stage("mine", {"events.csv"}, false, "", [&]() -> std::string {
      const CorpusResult corpus = load_corpus(lib_dir / "corpus.json");
      EmailIdentityResolver resolver;
      struct ScanOut {
        std::vector<CommitEvent> events;
        ScanReport report;
      };
      const auto outs = parallel_map(
          corpus.projects,
          [&](const ClientProject& project) {
            ScanOut out;
            out.events = scan_history(project, lib, resolver, out.report, snapshot_ts);
            return out;
          },
          static_cast<int>(threads));
      std::vector<CommitEvent> events;
      std::int64_t scanned = 0;
      std::size_t commit_errors = 0;
      std::set<std::string> fallbacks;
      for (const ScanOut& out : outs) {
        events.insert(events.end(), out.events.begin(), out.events.end());
        scanned += out.report.commits_scanned;
        commit_errors += out.report.commit_errors.size();
        fallbacks.insert(out.report.fallback_authors.begin(), out.report.fallback_authors.end());
      }
      std::sort(events.begin(), events.end(), [](const CommitEvent& a, const CommitEvent& b) {
        if (a.authored_at != b.authored_at) return a.authored_at < b.authored_at;
        if (a.commit_id != b.commit_id) return a.commit_id < b.commit_id;
        return a.project < b.project;
      });
      write_events(lib_dir / "events.csv", events);
      std::string note = std::to_string(events.size()) + " events from " +
                         std::to_string(scanned) + " commits";
      if (commit_errors > 0) note += ", " + std::to_string(commit_errors) + " commit errors";
      if (!fallbacks.empty())
        note += ", " + std::to_string(fallbacks.size()) + " identity fallbacks";
      return note;
    });

    stage("features", {"features.csv"}, false, "", [&]() -> std::string {
      const auto events = read_events(lib_dir / "events.csv");
      const FeatureSet set = compute_all_features(events, snapshot_ts, lib.id, threads);
      write_features(lib_dir / "features.csv", set.vectors);
      return std::to_string(set.vectors.size()) + " candidate developers (" +
             std::to_string(set.excluded.size()) + " excluded by the client-file gate)";
    });

    stage("preprocess", {"features.clean.csv", "transform_log.json"}, false, "",
          [&]() -> std::string {
            const auto vectors = read_features(lib_dir / "features.csv");
            if (vectors.empty()) throw Error("no candidate developers to preprocess");
            PreprocessResult clean = preprocess(matrix_from_vectors(vectors), false);
            save_matrix(lib_dir / "features.clean.csv", clean.matrix);
            save_transform_log(lib_dir / "transform_log.json", clean.log);
            const std::size_t active = clean.matrix.active_indices().size();
            return std::to_string(active) + " active columns (" +
                   std::to_string(clean.matrix.n_cols() - active) + " pruned)";
          });

    stage("train", {"report.supervised.json"}, degraded,
          "no ground truth: supervised track skipped", [&]() -> std::string {
            const FeatureMatrix clean = load_matrix(lib_dir / "features.clean.csv");
            const auto dense = clean.active_rows();
            std::vector<std::vector<double>> rows;
            std::vector<int> labels;
            for (std::size_t i = 0; i < clean.row_ids.size(); ++i) {
              const auto it = lib_truth.find(clean.row_ids[i]);
              if (it == lib_truth.end()) continue;
              rows.push_back(dense[i]);
              labels.push_back(class_id(it->second, scheme));
            }
            if (rows.empty()) throw Error("no labeled developers for library " + lib.id);
            SmoteSettings smote;
            smote.enabled = config.smote;
            smote.knn = config.smote_knn;
            smote.pct = config.smote_pct;
            std::vector<ClassifierReport> reports;
            for (const std::string& name : config.classifiers) {
              const ClassifierKind kind = classifier_kind_from_name(name);
              const std::uint64_t seed = derive_seed(
                  config.seed, "train/" + lib.id + "/" + classifier_kind_name(kind));
              reports.push_back(run_supervised(kind, scheme, lib.id, rows, labels, config.folds,
                                               smote, seed, threads));
            }
            save_reports(lib_dir / "report.supervised.json", reports);
            return std::to_string(reports.size()) + " classifiers on " +
                   std::to_string(rows.size()) + " labeled developers";
          });

    stage("cluster", {"clusters.json"}, degraded,
          "no ground truth: expert-cluster selection skipped", [&]() -> std::string {
            FeatureMatrix standardized = load_matrix(lib_dir / "features.clean.csv");
            TransformLog log = load_transform_log(lib_dir / "transform_log.json");
            standardize(standardized, log);
            std::map<std::string, Ternary> ternary;
            for (const auto& [developer, label] : lib_truth) ternary[developer] = label.ternary;
            ClusterSettings settings;
            settings.k_max = config.k_max;
            settings.restarts = config.restarts;
            settings.threshold_override = config.threshold_override;
            settings.threads = threads;
            const ClusterModel model =
                select_expert_cluster(standardized, log, ternary, lib.id,
                                      derive_seed(config.seed, "cluster/" + lib.id), settings);
            save_cluster_model(lib_dir / "clusters.json", model);
            std::ostringstream note;
            note << "k=" << model.k << ", expert cluster " << model.expert_cluster << " at "
                 << format_double(model.composition[static_cast<std::size_t>(model.expert_cluster)]
                                      .expert_fraction)
                 << " expert fraction";
            if (model.below_threshold) note << " (below threshold " << model.threshold_used << ")";
            return note.str();
          });

    stage("verdicts", {"verdicts.csv"}, degraded, "no ground truth: verdicts skipped",
          [&]() -> std::string {
            const ClusterModel model = load_cluster_model(lib_dir / "clusters.json");
            const auto vectors = read_features(lib_dir / "features.csv");
            std::vector<VerdictRow> rows;
            std::size_t experts = 0;
            for (const FeatureVector& vector : vectors) {
              const Prediction prediction = predict_expert_raw(model, vector.values());
              if (prediction.verdict == Verdict::likely_expert) ++experts;
              rows.push_back(
                  {vector.developer, lib.id, prediction.verdict, prediction.distance_margin});
            }
            write_verdicts(lib_dir / "verdicts.csv", rows);
            return std::to_string(experts) + " of " + std::to_string(rows.size()) +
                   " developers flagged likely-expert";
          });

    stage("stats", {"report.effects.json", "quintiles.csv"}, degraded,
          "no ground truth: statistics skipped", [&]() -> std::string {
            const ClusterModel model = load_cluster_model(lib_dir / "clusters.json");
            const FeatureMatrix clean = load_matrix(lib_dir / "features.clean.csv");
            if (clean.row_ids != model.row_ids)
              throw ContractError("clusters.json does not match features.clean.csv");
            const auto dense = clean.active_rows();
            const auto columns = clean.active_columns();
            const EffectSizeReport effects = closest_median_comparison(model, dense, columns);
            save_effects(lib_dir / "report.effects.json", effects);

            std::vector<std::size_t> labeled_rows;
            std::vector<bool> is_expert;
            for (std::size_t i = 0; i < clean.row_ids.size(); ++i) {
              const auto it = lib_truth.find(clean.row_ids[i]);
              if (it == lib_truth.end()) continue;
              labeled_rows.push_back(i);
              is_expert.push_back(it->second.ternary == Ternary::expert);
            }
            std::vector<QuintileRow> quintiles;
            for (std::size_t c = 0; c < columns.size(); ++c) {
              std::vector<double> values;
              values.reserve(labeled_rows.size());
              for (std::size_t r : labeled_rows) values.push_back(dense[r][c]);
              quintiles.push_back(quintile_expert_fractions(columns[c], values, is_expert));
            }
            write_quintiles(lib_dir / "quintiles.csv", quintiles);
            return std::to_string(effects.effects.size()) + " feature effects (" +
                   std::to_string(effects.skipped.size()) + " skipped), quintiles over " +
                   std::to_string(labeled_rows.size()) + " labeled developers";
          });
  }

  nlohmann::ordered_json manifest;
  manifest["tool"] = "libexpert";
  manifest["version"] = "0.1.0";
  manifest["seed"] = config.seed;
  manifest["degraded"] = degraded;
  manifest["config"] = nlohmann::ordered_json::parse(config_json);
  manifest["stages"] = nlohmann::ordered_json::array();
  for (const StageStatus& status : result.stages) {
    nlohmann::ordered_json entry;
    entry["name"] = status.name;
    entry["skipped"] = status.skipped;
    entry["note"] = status.note;
    entry["artifacts"] = nlohmann::ordered_json::object();
    for (const auto& [rel, hash] : status.artifacts) entry["artifacts"][rel] = hash;
    manifest["stages"].push_back(std::move(entry));
  }
  {
    std::ofstream out(out_dir / "run_manifest.json", std::ios::binary);
    if (!out) throw IoError("cannot write " + (out_dir / "run_manifest.json").string());
    out << manifest.dump(2) << "\n";
  }
  if (progress) *progress << "wrote " << (out_dir / "run_manifest.json").string() << "\n";
  return result;
}

std::string summarize_run(const std::filesystem::path& out_dir) {
  const std::filesystem::path manifest_path = out_dir / "run_manifest.json";
  if (!std::filesystem::exists(manifest_path))
    throw IoError("no run_manifest.json in " + out_dir.string() + "; run the pipeline first");
  const nlohmann::json manifest = nlohmann::json::parse(read_text_file(manifest_path));

  std::ostringstream out;
  out << "libexpert run (seed " << manifest.value("seed", std::uint64_t{0}) << ")";
  if (manifest.value("degraded", false)) out << " [degraded: no ground truth]";
  out << "\n\nstages:\n";
  for (const auto& stage : manifest.value("stages", nlohmann::json::array())) {
    out << "  " << stage.value("name", "?") << ": "
        << (stage.value("skipped", false) ? "skipped - " : "") << stage.value("note", "") << "\n";
  }

  const auto& config = manifest["config"];
  const bool single = config["libraries"].size() == 1;
  for (const auto& lib : config["libraries"]) {
    const std::string id = lib.value("id", "");
    const std::filesystem::path lib_dir = single ? out_dir : out_dir / id;
    out << "\nlibrary " << id << ":\n";

    const std::filesystem::path clusters = lib_dir / "clusters.json";
    if (std::filesystem::exists(clusters)) {
      const ClusterModel model = load_cluster_model(clusters);
      out << "  clusters: k=" << model.k << ", expert cluster " << model.expert_cluster
          << " (threshold " << format_double(model.threshold_used)
          << (model.below_threshold ? ", NOT reached" : "") << ")\n";
      for (std::size_t c = 0; c < model.composition.size(); ++c) {
        const auto& comp = model.composition[c];
        out << "    cluster " << c << ": " << comp.members << " members, " << comp.labeled
            << " labeled, expert fraction " << format_double(comp.expert_fraction) << "\n";
      }
    }

    const std::filesystem::path supervised = lib_dir / "report.supervised.json";
    if (std::filesystem::exists(supervised)) {
      const nlohmann::json report = nlohmann::json::parse(read_text_file(supervised));
      out << "  classifiers:\n";
      for (const auto& entry : report.value("classifiers", nlohmann::json::array())) {
        out << "    " << entry.value("classifier", "?") << ": F="
            << format_double(entry.value("f_measure", 0.0))
            << " kappa=" << format_double(entry.value("kappa", 0.0))
            << " auc=" << format_double(entry.value("auc", 0.0)) << "\n";
      }
    }

    const std::filesystem::path verdicts = lib_dir / "verdicts.csv";
    if (std::filesystem::exists(verdicts)) {
      const auto rows = read_verdicts(verdicts);
      std::size_t experts = 0;
      for (const VerdictRow& row : rows)
        if (row.verdict == Verdict::likely_expert) ++experts;
      out << "  verdicts: " << experts << " likely-expert of " << rows.size() << "\n";
    }
  }
  return out.str();
}

}  // namespace libexpert
