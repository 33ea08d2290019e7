#include <filesystem>
#include <iostream>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "CLI11.hpp"

#include "libexpert/cluster.hpp"
#include "libexpert/corpus.hpp"
#include "libexpert/errors.hpp"
#include "libexpert/features.hpp"
#include "libexpert/labels.hpp"
#include "libexpert/learn.hpp"
#include "libexpert/matrix.hpp"
#include "libexpert/miner.hpp"
#include "libexpert/pipeline.hpp"
#include "libexpert/preprocess.hpp"
#include "libexpert/rng.hpp"
#include "libexpert/stats.hpp"
#include "libexpert/timeutil.hpp"

namespace {

using namespace libexpert;

// Shared --library/--manifest-name/--import-pattern/--repo-slug flags.
struct LibraryFlags {
  std::string id;
  std::string manifest_name;
  std::vector<std::string> import_patterns;
  std::string repo_slug;

  void attach(CLI::App* cmd, bool required) {
    auto* opt = cmd->add_option("--library", id, "target library id (e.g. react)");
    if (required) opt->required();
    cmd->add_option("--manifest-name", manifest_name,
                    "package name in dependency manifests (default: library id)");
    cmd->add_option("--import-pattern", import_patterns,
                    "module path that counts as importing the library (repeatable; "
                    "default: manifest name)");
    cmd->add_option("--repo-slug", repo_slug, "owner/name of the library's own repository");
  }

  LibrarySpec to_spec() const {
    LibrarySpec spec;
    spec.id = id;
    spec.manifest_name = manifest_name.empty() ? id : manifest_name;
    spec.import_patterns =
        import_patterns.empty() ? std::vector<std::string>{spec.manifest_name} : import_patterns;
    spec.repo_slug = repo_slug;
    spec.validate();
    return spec;
  }
};

// Work after flag validation counts as the named stage: failures exit 3.
template <typename Fn>
void as_stage(const std::string& name, Fn&& fn) {
  try {
    fn();
  } catch (const StageError&) {
    throw;
  } catch (const std::exception& e) {
    throw StageError(name, e.what());
  }
}

LabelScheme scheme_from_flag(const std::string& name) {
  if (name == "five") return five_class_scheme();
  if (name == "ternary") return ternary_scheme();
  throw Error("unknown scheme '" + name + "' (expected ternary or five)");
}

std::map<std::string, GroundTruthLabel> labels_for_library(
    const std::filesystem::path& path, const std::string& library_id) {
  std::map<std::string, GroundTruthLabel> out;
  for (const GroundTruthLabel& label : ingest_ground_truth(path, {}))
    if (label.library == library_id) out.emplace(label.developer, label);
  if (out.empty()) throw Error("no ground truth rows for library " + library_id);
  return out;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"libexpert: mine git histories for library-expertise signals"};
  app.set_version_flag("--version", "libexpert 0.1.0");
  app.require_subcommand(1);

  try {
    // ---- corpus ------------------------------------------------------
    auto* corpus_cmd =
        app.add_subcommand("corpus", "detect client projects and write corpus.json");
    struct {
      std::string repos_dir, repo_list, repos_root, snapshot, out = "corpus.json";
      int threads = 0;
      LibraryFlags lib;
    } corpus_args;
    corpus_args.lib.attach(corpus_cmd, true);
    corpus_cmd->add_option("--repos-dir", corpus_args.repos_dir,
                           "directory of git repositories");
    corpus_cmd->add_option("--repo-list", corpus_args.repo_list,
                           "newline-delimited owner/name list file");
    corpus_cmd->add_option("--repos-root", corpus_args.repos_root,
                           "directory the list entries resolve against");
    corpus_cmd->add_option("--snapshot", corpus_args.snapshot,
                           "ISO-8601 UTC timestamp to scan the tree at (default: HEAD)");
    corpus_cmd->add_option("--out", corpus_args.out, "output path");
    corpus_cmd->add_option("--threads", corpus_args.threads, "worker threads (0 = all cores)");
    corpus_cmd->callback([&] {
      const LibrarySpec lib = corpus_args.lib.to_spec();
      if (corpus_args.repos_dir.empty() == corpus_args.repo_list.empty())
        throw Error("corpus needs exactly one of --repos-dir or --repo-list");
      std::optional<std::int64_t> snapshot;
      if (!corpus_args.snapshot.empty()) snapshot = parse_timestamp(corpus_args.snapshot);
      as_stage("corpus", [&] {
        std::vector<RepoRef> repos;
        if (!corpus_args.repos_dir.empty()) {
          repos = discover_repos(corpus_args.repos_dir);
        } else {
          std::optional<std::filesystem::path> root;
          if (!corpus_args.repos_root.empty()) root = corpus_args.repos_root;
          repos = discover_repos(corpus_args.repo_list, root);
        }
        const unsigned threads = corpus_args.threads > 0
                                     ? static_cast<unsigned>(corpus_args.threads)
                                     : PipelineConfig{}.effective_threads();
        const CorpusResult corpus = build_corpus(repos, lib, snapshot, threads);
        save_corpus(corpus_args.out, corpus, lib);
        std::cout << corpus.projects.size() << " client projects (" << corpus.errors.size()
                  << " repo errors) -> " << corpus_args.out << "\n";
      });
    });

    // ---- mine --------------------------------------------------------
    auto* mine_cmd =
        app.add_subcommand("mine", "walk client-project histories and write events.csv");
    struct {
      std::string corpus = "corpus.json", out = "events.csv", cutoff;
      int threads = 0;
      LibraryFlags lib;
    } mine_args;
    mine_args.lib.attach(mine_cmd, true);
    mine_cmd->add_option("--corpus", mine_args.corpus, "corpus.json from the corpus step");
    mine_cmd->add_option("--cutoff", mine_args.cutoff,
                         "drop commits authored after this ISO-8601 UTC timestamp");
    mine_cmd->add_option("--out", mine_args.out, "output path");
    mine_cmd->add_option("--threads", mine_args.threads, "worker threads (0 = all cores)");
    mine_cmd->callback([&] {
      const LibrarySpec lib = mine_args.lib.to_spec();
      std::optional<std::int64_t> cutoff;
      if (!mine_args.cutoff.empty()) cutoff = parse_timestamp(mine_args.cutoff);
      as_stage("mine", [&] {
        const CorpusResult corpus = load_corpus(mine_args.corpus);
        EmailIdentityResolver resolver;
        std::vector<CommitEvent> events;
        std::int64_t scanned = 0;
        for (const ClientProject& project : corpus.projects) {
          ScanReport report;
          const auto batch = scan_history(project, lib, resolver, report, cutoff);
          events.insert(events.end(), batch.begin(), batch.end());
          scanned += report.commits_scanned;
          for (const std::string& err : report.commit_errors)
            std::cerr << "warning: " << project.repo_id << ": " << err << "\n";
        }
        std::sort(events.begin(), events.end(), [](const CommitEvent& a, const CommitEvent& b) {
          if (a.authored_at != b.authored_at) return a.authored_at < b.authored_at;
          if (a.commit_id != b.commit_id) return a.commit_id < b.commit_id;
          return a.project < b.project;
        });
        write_events(mine_args.out, events);
        std::cout << events.size() << " events from " << scanned << " commits -> "
                  << mine_args.out << "\n";
      });
    });

    // ---- features ----------------------------------------------------
    auto* features_cmd =
        app.add_subcommand("features", "aggregate events into per-developer features.csv");
    struct {
      std::string events = "events.csv", out = "features.csv", snapshot, library;
      int threads = 0;
    } features_args;
    features_cmd->add_option("--events", features_args.events, "events.csv from the mine step");
    features_cmd->add_option("--snapshot", features_args.snapshot, "ISO-8601 UTC observation time")
        ->required();
    features_cmd->add_option("--library", features_args.library, "target library id")->required();
    features_cmd->add_option("--out", features_args.out, "output path");
    features_cmd->add_option("--threads", features_args.threads, "worker threads (0 = all cores)");
    features_cmd->callback([&] {
      const std::int64_t snapshot = parse_timestamp(features_args.snapshot);
      as_stage("features", [&] {
        const auto events = read_events(features_args.events);
        const unsigned threads = features_args.threads > 0
                                     ? static_cast<unsigned>(features_args.threads)
                                     : PipelineConfig{}.effective_threads();
        const FeatureSet set =
            compute_all_features(events, snapshot, features_args.library, threads);
        write_features(features_args.out, set.vectors);
        std::cout << set.vectors.size() << " developers (" << set.excluded.size()
                  << " excluded) -> " << features_args.out << "\n";
      });
    });

    // ---- preprocess ----------------------------------------------------
    auto* preprocess_cmd = app.add_subcommand(
        "preprocess", "impute, prune and transform features into features.clean.csv");
    struct {
      std::string features = "features.csv", out_matrix = "features.clean.csv",
                  out_log = "transform_log.json";
      bool standardize = false;
      double threshold = 0.7;
    } preprocess_args;
    preprocess_cmd->add_option("--features", preprocess_args.features, "raw features.csv");
    preprocess_cmd->add_option("--out-matrix", preprocess_args.out_matrix, "cleaned matrix path");
    preprocess_cmd->add_option("--out-log", preprocess_args.out_log, "transform log path");
    preprocess_cmd->add_flag("--standardize", preprocess_args.standardize,
                             "also standardize columns (clustering track)");
    preprocess_cmd->add_option("--correlation-threshold", preprocess_args.threshold,
                               "|r| above which one of a column pair is pruned");
    preprocess_cmd->callback([&] {
      as_stage("preprocess", [&] {
        const auto vectors = read_features(preprocess_args.features);
        if (vectors.empty()) throw Error("no rows in " + preprocess_args.features);
        const PreprocessResult clean = preprocess(
            matrix_from_vectors(vectors), preprocess_args.standardize, preprocess_args.threshold);
        save_matrix(preprocess_args.out_matrix, clean.matrix);
        save_transform_log(preprocess_args.out_log, clean.log);
        std::cout << clean.matrix.active_indices().size() << " active columns -> "
                  << preprocess_args.out_matrix << "\n";
      });
    });

    // ---- train ---------------------------------------------------------
    auto* train_cmd = app.add_subcommand(
        "train", "cross-validated supervised evaluation into report.supervised.json");
    struct {
      std::string matrix = "features.clean.csv", ground_truth, library, scheme = "ternary",
                  out = "report.supervised.json";
      std::vector<std::string> classifiers{"zeror", "random-forest", "max-margin"};
      int folds = 5;
      bool no_smote = false;
      std::uint64_t seed = 1;
      int threads = 0;
    } train_args;
    train_cmd->add_option("--matrix", train_args.matrix, "features.clean.csv");
    train_cmd->add_option("--ground-truth", train_args.ground_truth, "developer,library,score CSV")
        ->required();
    train_cmd->add_option("--library", train_args.library, "target library id")->required();
    train_cmd->add_option("--scheme", train_args.scheme, "ternary or five");
    train_cmd->add_option("--classifier", train_args.classifiers,
                          "classifier kind (repeatable): zeror, random-forest, max-margin");
    train_cmd->add_option("--folds", train_args.folds, "cross-validation folds");
    train_cmd->add_flag("--no-smote", train_args.no_smote, "disable synthetic oversampling");
    train_cmd->add_option("--seed", train_args.seed, "root random seed");
    train_cmd->add_option("--threads", train_args.threads, "worker threads (0 = all cores)");
    train_cmd->add_option("--out", train_args.out, "output path");
    train_cmd->callback([&] {
      const LabelScheme scheme = scheme_from_flag(train_args.scheme);
      as_stage("train", [&] {
        const FeatureMatrix clean = load_matrix(train_args.matrix);
        const auto truth = labels_for_library(train_args.ground_truth, train_args.library);
        const auto dense = clean.active_rows();
        std::vector<std::vector<double>> rows;
        std::vector<int> labels;
        for (std::size_t i = 0; i < clean.row_ids.size(); ++i) {
          const auto it = truth.find(clean.row_ids[i]);
          if (it == truth.end()) continue;
          rows.push_back(dense[i]);
          labels.push_back(class_id(it->second, scheme));
        }
        if (rows.empty()) throw Error("no labeled developers found in the matrix");
        SmoteSettings smote;
        smote.enabled = !train_args.no_smote;
        const unsigned threads = train_args.threads > 0
                                     ? static_cast<unsigned>(train_args.threads)
                                     : PipelineConfig{}.effective_threads();
        std::vector<ClassifierReport> reports;
        for (const std::string& name : train_args.classifiers) {
          const ClassifierKind kind = classifier_kind_from_name(name);
          const std::uint64_t seed = derive_seed(
              train_args.seed, "train/" + train_args.library + "/" + classifier_kind_name(kind));
          reports.push_back(run_supervised(kind, scheme, train_args.library, rows, labels,
                                           train_args.folds, smote, seed, threads));
        }
        save_reports(train_args.out, reports);
        for (const ClassifierReport& report : reports)
          std::cout << report.classifier << ": F=" << report.eval.f_measure
                    << " kappa=" << report.eval.kappa << " auc=" << report.auc << "\n";
        std::cout << "-> " << train_args.out << "\n";
      });
    });

    // ---- cluster -------------------------------------------------------
    auto* cluster_cmd =
        app.add_subcommand("cluster", "select the expert cluster and write clusters.json");
    struct {
      std::string matrix = "features.clean.csv", log = "transform_log.json", ground_truth,
                  library, out = "clusters.json";
      int k_max = 8, restarts = 50, threads = 0;
      double threshold = 0;
      std::uint64_t seed = 1;
    } cluster_args;
    cluster_cmd->add_option("--matrix", cluster_args.matrix, "features.clean.csv");
    cluster_cmd->add_option("--log", cluster_args.log, "transform_log.json");
    cluster_cmd
        ->add_option("--ground-truth", cluster_args.ground_truth, "developer,library,score CSV")
        ->required();
    cluster_cmd->add_option("--library", cluster_args.library, "target library id")->required();
    cluster_cmd->add_option("--k-max", cluster_args.k_max, "largest k to try");
    cluster_cmd->add_option("--restarts", cluster_args.restarts, "k-means restarts");
    auto* threshold_opt = cluster_cmd->add_option(
        "--threshold", cluster_args.threshold, "expert-fraction threshold override (0,1]");
    cluster_cmd->add_option("--seed", cluster_args.seed, "root random seed");
    cluster_cmd->add_option("--threads", cluster_args.threads, "worker threads (0 = all cores)");
    cluster_cmd->add_option("--out", cluster_args.out, "output path");
    cluster_cmd->callback([&] {
      as_stage("cluster", [&] {
        FeatureMatrix standardized = load_matrix(cluster_args.matrix);
        TransformLog log = load_transform_log(cluster_args.log);
        standardize(standardized, log);
        const auto truth = labels_for_library(cluster_args.ground_truth, cluster_args.library);
        std::map<std::string, Ternary> ternary;
        for (const auto& [developer, label] : truth) ternary[developer] = label.ternary;
        ClusterSettings settings;
        settings.k_max = cluster_args.k_max;
        settings.restarts = cluster_args.restarts;
        if (threshold_opt->count() > 0) settings.threshold_override = cluster_args.threshold;
        settings.threads = cluster_args.threads > 0 ? static_cast<unsigned>(cluster_args.threads)
                                                    : PipelineConfig{}.effective_threads();
        const ClusterModel model = select_expert_cluster(
            standardized, log, ternary, cluster_args.library,
            derive_seed(cluster_args.seed, "cluster/" + cluster_args.library), settings);
        save_cluster_model(cluster_args.out, model);
        std::cout << "k=" << model.k << ", expert cluster " << model.expert_cluster
                  << (model.below_threshold ? " (below threshold)" : "") << " -> "
                  << cluster_args.out << "\n";
      });
    });

    // ---- predict -------------------------------------------------------
    auto* predict_cmd = app.add_subcommand(
        "predict", "apply a fitted cluster model to raw features and write verdicts.csv");
    struct {
      std::string model = "clusters.json", features = "features.csv", out = "verdicts.csv";
    } predict_args;
    predict_cmd->add_option("--model", predict_args.model, "clusters.json");
    predict_cmd->add_option("--features", predict_args.features, "raw features.csv to score");
    predict_cmd->add_option("--out", predict_args.out, "output path");
    predict_cmd->callback([&] {
      as_stage("predict", [&] {
        const ClusterModel model = load_cluster_model(predict_args.model);
        const auto vectors = read_features(predict_args.features);
        std::vector<VerdictRow> rows;
        std::size_t experts = 0;
        for (const FeatureVector& vector : vectors) {
          const Prediction prediction = predict_expert_raw(model, vector.values());
          if (prediction.verdict == Verdict::likely_expert) ++experts;
          rows.push_back(
              {vector.developer, model.library, prediction.verdict, prediction.distance_margin});
        }
        write_verdicts(predict_args.out, rows);
        std::cout << experts << " of " << rows.size() << " likely-expert -> " << predict_args.out
                  << "\n";
      });
    });

    // ---- stats ---------------------------------------------------------
    auto* stats_cmd = app.add_subcommand(
        "stats", "effect sizes and quintile carves into report.effects.json / quintiles.csv");
    struct {
      std::string model = "clusters.json", matrix = "features.clean.csv", ground_truth,
                  out_effects = "report.effects.json", out_quintiles = "quintiles.csv";
    } stats_args;
    stats_cmd->add_option("--model", stats_args.model, "clusters.json");
    stats_cmd->add_option("--matrix", stats_args.matrix, "features.clean.csv");
    stats_cmd->add_option("--ground-truth", stats_args.ground_truth, "developer,library,score CSV")
        ->required();
    stats_cmd->add_option("--out-effects", stats_args.out_effects, "effect-size report path");
    stats_cmd->add_option("--out-quintiles", stats_args.out_quintiles, "quintile table path");
    stats_cmd->callback([&] {
      as_stage("stats", [&] {
        const ClusterModel model = load_cluster_model(stats_args.model);
        const FeatureMatrix clean = load_matrix(stats_args.matrix);
        if (clean.row_ids != model.row_ids)
          throw Error("cluster model does not match the matrix rows");
        const auto dense = clean.active_rows();
        const auto columns = clean.active_columns();
        save_effects(stats_args.out_effects, closest_median_comparison(model, dense, columns));

        const auto truth = labels_for_library(stats_args.ground_truth, model.library);
        std::vector<std::size_t> labeled;
        std::vector<bool> is_expert;
        for (std::size_t i = 0; i < clean.row_ids.size(); ++i) {
          const auto it = truth.find(clean.row_ids[i]);
          if (it == truth.end()) continue;
          labeled.push_back(i);
          is_expert.push_back(it->second.ternary == Ternary::expert);
        }
        std::vector<QuintileRow> quintiles;
        for (std::size_t c = 0; c < columns.size(); ++c) {
          std::vector<double> values;
          for (std::size_t r : labeled) values.push_back(dense[r][c]);
          quintiles.push_back(quintile_expert_fractions(columns[c], values, is_expert));
        }
        write_quintiles(stats_args.out_quintiles, quintiles);
        std::cout << "-> " << stats_args.out_effects << ", " << stats_args.out_quintiles << "\n";
      });
    });

    // ---- run -----------------------------------------------------------
    auto* run_cmd = app.add_subcommand("run", "full pipeline from a config file");
    struct {
      std::string config;
      std::string repos_dir, repo_list, repos_root, snapshot, ground_truth, scheme, out_dir;
      std::vector<std::string> classifiers;
      int folds = 0, k_max = 0, restarts = 0, threads = -1;
      double threshold = 0;
      std::uint64_t seed = 0;
      bool resume = false, no_smote = false;
      LibraryFlags lib;
    } run_args;
    run_cmd->add_option("--config", run_args.config, "pipeline config JSON (docs/config.md)");
    run_args.lib.attach(run_cmd, false);
    run_cmd->add_option("--repos-dir", run_args.repos_dir, "directory of git repositories");
    run_cmd->add_option("--repo-list", run_args.repo_list, "owner/name list file");
    run_cmd->add_option("--repos-root", run_args.repos_root, "directory list entries resolve against");
    run_cmd->add_option("--snapshot", run_args.snapshot, "ISO-8601 UTC observation time");
    run_cmd->add_option("--ground-truth", run_args.ground_truth, "developer,library,score CSV");
    run_cmd->add_option("--scheme", run_args.scheme, "ternary or five");
    run_cmd->add_option("--classifier", run_args.classifiers, "classifier kind (repeatable)");
    auto* folds_opt = run_cmd->add_option("--folds", run_args.folds, "cross-validation folds");
    auto* kmax_opt = run_cmd->add_option("--k-max", run_args.k_max, "largest k to try");
    auto* restarts_opt = run_cmd->add_option("--restarts", run_args.restarts, "k-means restarts");
    auto* run_threshold_opt =
        run_cmd->add_option("--threshold", run_args.threshold, "expert-fraction threshold");
    auto* seed_opt = run_cmd->add_option("--seed", run_args.seed, "root random seed");
    auto* threads_opt =
        run_cmd->add_option("--threads", run_args.threads, "worker threads (0 = all cores)");
    run_cmd->add_option("--out", run_args.out_dir, "output directory");
    run_cmd->add_flag("--resume", run_args.resume, "skip stages with matching checkpoints");
    run_cmd->add_flag("--no-smote", run_args.no_smote, "disable synthetic oversampling");
    run_cmd->callback([&] {
      PipelineConfig config;
      if (!run_args.config.empty()) config = load_config(run_args.config);
      if (!run_args.lib.id.empty()) config.libraries = {run_args.lib.to_spec()};
      if (!run_args.repos_dir.empty()) config.repos_dir = run_args.repos_dir;
      if (!run_args.repo_list.empty()) config.repo_list = run_args.repo_list;
      if (!run_args.repos_root.empty()) config.repos_root = run_args.repos_root;
      if (!run_args.snapshot.empty()) config.snapshot = run_args.snapshot;
      if (!run_args.ground_truth.empty()) config.ground_truth = run_args.ground_truth;
      if (!run_args.scheme.empty()) config.scheme = run_args.scheme;
      if (!run_args.classifiers.empty()) config.classifiers = run_args.classifiers;
      if (folds_opt->count() > 0) config.folds = run_args.folds;
      if (kmax_opt->count() > 0) config.k_max = run_args.k_max;
      if (restarts_opt->count() > 0) config.restarts = run_args.restarts;
      if (run_threshold_opt->count() > 0) config.threshold_override = run_args.threshold;
      if (seed_opt->count() > 0) config.seed = run_args.seed;
      if (threads_opt->count() > 0) config.threads = run_args.threads;
      if (!run_args.out_dir.empty()) config.out_dir = run_args.out_dir;
      if (run_args.no_smote) config.smote = false;
      config.resume = run_args.resume;
      run_pipeline(config, &std::cout);
    });

    // ---- report --------------------------------------------------------
    auto* report_cmd = app.add_subcommand("report", "summarize a finished run directory");
    struct {
      std::string dir = "out";
    } report_args;
    report_cmd->add_option("--dir", report_args.dir, "run output directory");
    report_cmd->callback([&] { std::cout << summarize_run(report_args.dir); });

    try {
      app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
      const int code = app.exit(e);
      return code == 0 ? 0 : 2;
    }
  } catch (const StageError& e) {
    std::cerr << "stage " << e.stage() << " failed: " << e.what() << "\n";
    return 3;
  } catch (const Error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  }
  return 0;
}
