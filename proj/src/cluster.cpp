#include "libexpert/cluster.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <sstream>

#include <json.hpp>

#include "libexpert/csv.hpp"
#include "libexpert/errors.hpp"
#include "libexpert/numfmt.hpp"
#include "libexpert/rng.hpp"

namespace libexpert {

double expert_threshold(double base_expert_rate, std::optional<double> override_value) {
  if (override_value) return *override_value;
  return base_expert_rate >= 0.5 ? 0.70 : 0.60;
}

namespace {

std::vector<ClusterComposition> composition_of(const KMeansResult& km,
                                               const std::vector<std::string>& row_ids,
                                               const std::map<std::string, Ternary>& labels) {
  std::vector<ClusterComposition> comp(km.k);
  std::vector<std::array<std::int64_t, 3>> counts(km.k, {0, 0, 0});
  for (std::size_t i = 0; i < row_ids.size(); ++i) {
    auto& c = comp[km.assignment[i]];
    ++c.members;
    const auto it = labels.find(row_ids[i]);
    if (it == labels.end()) continue;
    ++c.labeled;
    ++counts[km.assignment[i]][static_cast<int>(it->second)];
  }
  for (int c = 0; c < km.k; ++c) {
    if (comp[c].labeled == 0) continue;
    for (int cls = 0; cls < 3; ++cls) {
      comp[c].class_fraction[cls] =
          static_cast<double>(counts[c][cls]) / static_cast<double>(comp[c].labeled);
    }
    comp[c].expert_fraction = comp[c].class_fraction[static_cast<int>(Ternary::expert)];
  }
  return comp;
}

// Qualifying cluster at this k, if any: expert fraction >= threshold among
// clusters with labeled members; ties prefer the higher fraction, then the
// larger cluster, then the lower index.
int pick_cluster(const std::vector<ClusterComposition>& comp, double threshold) {
  int best = -1;
  for (int c = 0; c < static_cast<int>(comp.size()); ++c) {
    if (comp[c].labeled == 0 || comp[c].expert_fraction < threshold) continue;
    if (best < 0 || comp[c].expert_fraction > comp[best].expert_fraction ||
        (comp[c].expert_fraction == comp[best].expert_fraction &&
         comp[c].members > comp[best].members)) {
      best = c;
    }
  }
  return best;
}

}  // namespace

ClusterModel select_expert_cluster(const FeatureMatrix& standardized, const TransformLog& log,
                                   const std::map<std::string, Ternary>& labels,
                                   const std::string& library, std::uint64_t seed,
                                   const ClusterSettings& settings) {
  if (settings.k_max < 2) throw Error("cluster selection needs k_max >= 2");
  const auto rows = standardized.active_rows();
  if (rows.empty()) throw Error("cluster selection: empty matrix");

  std::int64_t labeled = 0, experts = 0;
  for (const auto& id : standardized.row_ids) {
    const auto it = labels.find(id);
    if (it == labels.end()) continue;
    ++labeled;
    if (it->second == Ternary::expert) ++experts;
  }
  if (labeled == 0) throw Error("cluster selection: no labeled rows");
  if (experts == 0) throw Error("cluster selection: labels contain no expert");

  const double threshold = expert_threshold(
      static_cast<double>(experts) / static_cast<double>(labeled), settings.threshold_override);

  auto build_model = [&](const KMeansResult& km) {
    ClusterModel model;
    model.library = library;
    model.k = km.k;
    model.columns = standardized.active_columns();
    model.centroids = km.centroids;
    model.log = log;
    model.row_ids = standardized.row_ids;
    model.assignment = km.assignment;
    model.composition = composition_of(km, standardized.row_ids, labels);
    model.threshold_used = threshold;
    model.inertia = km.inertia;
    model.seed = seed;
    return model;
  };

  std::optional<ClusterModel> best_below;
  const int k_cap = std::min<int>(settings.k_max, static_cast<int>(rows.size()));
  for (int k = 2; k <= k_cap; ++k) {
    const auto km = kmeans(rows, k, settings.restarts,
                           derive_seed(seed, "select/k" + std::to_string(k)), settings.threads);
    auto model = build_model(km);
    const int chosen = pick_cluster(model.composition, threshold);
    if (chosen >= 0) {
      model.expert_cluster = chosen;
      return model;
    }
    // Remember the best miss for the below-threshold fallback.
    const int fallback = pick_cluster(model.composition, 0.0);
    if (fallback >= 0) {
      model.expert_cluster = fallback;
      model.below_threshold = true;
      if (!best_below ||
          model.composition[fallback].expert_fraction >
              best_below->composition[best_below->expert_cluster].expert_fraction) {
        best_below = std::move(model);
      }
    }
  }
  if (!best_below) throw Error("cluster selection: no cluster with labeled members");
  return *best_below;
}

const char* verdict_name(Verdict v) {
  return v == Verdict::likely_expert ? "likely-expert" : "unknown";
}

Prediction predict_expert(const ClusterModel& model,
                          const std::vector<double>& standardized_row) {
  if (model.expert_cluster < 0 || model.expert_cluster >= model.k) {
    throw Error("model has no expert cluster");
  }
  if (model.centroids.empty() || standardized_row.size() != model.centroids[0].size()) {
    throw Error("prediction row dimension mismatch");
  }
  double expert_d = 0;
  double other_d = std::numeric_limits<double>::infinity();
  for (int c = 0; c < model.k; ++c) {
    const double d = std::sqrt(squared_euclidean(standardized_row, model.centroids[c]));
    if (c == model.expert_cluster) {
      expert_d = d;
    } else {
      other_d = std::min(other_d, d);
    }
  }
  Prediction p;
  p.distance_margin = other_d - expert_d;
  p.verdict = p.distance_margin > 0 ? Verdict::likely_expert : Verdict::unknown;
  return p;
}

Prediction predict_expert_raw(const ClusterModel& model,
                              const std::array<std::optional<double>, kFeatureCount>& raw) {
  return predict_expert(model, replay_row(raw, model.log));
}

std::set<std::string> intersect_experts(
    const std::vector<std::map<std::string, Verdict>>& per_library) {
  std::set<std::string> out;
  if (per_library.empty()) return out;
  for (const auto& [dev, verdict] : per_library[0]) {
    if (verdict != Verdict::likely_expert) continue;
    bool everywhere = true;
    for (std::size_t l = 1; l < per_library.size(); ++l) {
      const auto it = per_library[l].find(dev);
      if (it == per_library[l].end() || it->second != Verdict::likely_expert) {
        everywhere = false;
        break;
      }
    }
    if (everywhere) out.insert(dev);
  }
  return out;
}

std::string cluster_model_to_json(const ClusterModel& model) {
  nlohmann::json j;
  j["library"] = model.library;
  j["k"] = model.k;
  j["columns"] = model.columns;
  j["centroids"] = model.centroids;
  j["transform_log"] = nlohmann::json::parse(transform_log_to_json(model.log));
  j["row_ids"] = model.row_ids;
  j["assignment"] = model.assignment;
  j["composition"] = nlohmann::json::array();
  for (const auto& c : model.composition) {
    j["composition"].push_back({{"members", c.members},
                                {"labeled", c.labeled},
                                {"novice", c.class_fraction[0]},
                                {"intermediate", c.class_fraction[1]},
                                {"expert", c.class_fraction[2]}});
  }
  j["expert_cluster"] = model.expert_cluster;
  j["threshold_used"] = model.threshold_used;
  j["below_threshold"] = model.below_threshold;
  j["inertia"] = model.inertia;
  j["seed"] = model.seed;
  return j.dump(2) + "\n";
}

ClusterModel cluster_model_from_json(const std::string& text) {
  nlohmann::json j;
  try {
    j = nlohmann::json::parse(text);
  } catch (const nlohmann::json::parse_error& e) {
    throw ParseError("clusters.json: " + std::string(e.what()), e.byte > 0 ? e.byte - 1 : 0);
  }
  ClusterModel model;
  model.library = j.at("library").get<std::string>();
  model.k = j.at("k").get<int>();
  model.columns = j.at("columns").get<std::vector<std::string>>();
  model.centroids = j.at("centroids").get<std::vector<std::vector<double>>>();
  model.log = transform_log_from_json(j.at("transform_log").dump());
  model.row_ids = j.at("row_ids").get<std::vector<std::string>>();
  model.assignment = j.at("assignment").get<std::vector<int>>();
  for (const auto& cj : j.at("composition")) {
    ClusterComposition c;
    c.members = cj.at("members").get<std::int64_t>();
    c.labeled = cj.at("labeled").get<std::int64_t>();
    c.class_fraction = {cj.at("novice").get<double>(), cj.at("intermediate").get<double>(),
                        cj.at("expert").get<double>()};
    c.expert_fraction = c.class_fraction[2];
    model.composition.push_back(c);
  }
  model.expert_cluster = j.at("expert_cluster").get<int>();
  model.threshold_used = j.at("threshold_used").get<double>();
  model.below_threshold = j.at("below_threshold").get<bool>();
  model.inertia = j.at("inertia").get<double>();
  model.seed = j.at("seed").get<std::uint64_t>();
  return model;
}

void save_cluster_model(const std::filesystem::path& path, const ClusterModel& model) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error("cannot write " + path.string());
  out << cluster_model_to_json(model);
}

ClusterModel load_cluster_model(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error("cannot read " + path.string());
  std::ostringstream buf;
  buf << in.rdbuf();
  return cluster_model_from_json(buf.str());
}

namespace {
const std::vector<std::string> kVerdictHeader = {"developer", "library", "verdict",
                                                 "distance_margin"};
}

std::string verdicts_to_csv(const std::vector<VerdictRow>& rows) {
  std::string out = csv_write_row(kVerdictHeader);
  for (const auto& row : rows) {
    out += csv_write_row({row.developer, row.library, verdict_name(row.verdict),
                          format_double(row.distance_margin)});
  }
  return out;
}

std::vector<VerdictRow> verdicts_from_csv(const std::string& text) {
  const auto rows = csv_parse(text);
  if (rows.empty() || rows[0] != kVerdictHeader) {
    throw ParseError("verdicts.csv: missing or wrong header row", 0);
  }
  std::vector<VerdictRow> out;
  for (std::size_t i = 1; i < rows.size(); ++i) {
    const auto& row = rows[i];
    if (row.size() != kVerdictHeader.size()) {
      throw ParseError("verdicts.csv: row " + std::to_string(i + 1) + " width mismatch", 0);
    }
    VerdictRow v;
    v.developer = row[0];
    v.library = row[1];
    if (row[2] == "likely-expert") {
      v.verdict = Verdict::likely_expert;
    } else if (row[2] == "unknown") {
      v.verdict = Verdict::unknown;
    } else {
      throw ParseError("verdicts.csv: bad verdict '" + row[2] + "'", 0);
    }
    v.distance_margin = parse_double(row[3]);
    out.push_back(std::move(v));
  }
  return out;
}

void write_verdicts(const std::filesystem::path& path, const std::vector<VerdictRow>& rows) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error("cannot write " + path.string());
  out << verdicts_to_csv(rows);
}

std::vector<VerdictRow> read_verdicts(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error("cannot read " + path.string());
  std::ostringstream buf;
  buf << in.rdbuf();
  return verdicts_from_csv(buf.str());
}

}  // namespace libexpert
