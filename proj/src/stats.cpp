#include "libexpert/stats.hpp"

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <fstream>
#include <numeric>
#include <sstream>

#include "libexpert/csv.hpp"
#include "libexpert/errors.hpp"
#include "libexpert/metrics.hpp"
#include "libexpert/numfmt.hpp"

#include "json.hpp"

namespace libexpert {

namespace {

double median_of(std::vector<double> v) {
  std::sort(v.begin(), v.end());
  const std::size_t n = v.size();
  return n % 2 == 1 ? v[n / 2] : 0.5 * (v[n / 2 - 1] + v[n / 2]);
}

// P(|U - nm/2| >= |u_obs - nm/2|) over all C(n+m, n) assignments of the
// pooled observations to the first group. Ranks are fixed by the pooled
// multiset, so each assignment is just a rank-sum over a subset.
double exact_two_sided_p(const std::vector<double>& ranks, std::size_t n, double u_obs) {
  const std::size_t total_n = ranks.size();
  const std::size_t m = total_n - n;
  const double mu = static_cast<double>(n) * static_cast<double>(m) / 2.0;
  const double target = std::abs(u_obs - mu);
  const double base = static_cast<double>(n) * (static_cast<double>(n) + 1) / 2.0;

  std::vector<std::size_t> comb(n);
  std::iota(comb.begin(), comb.end(), std::size_t{0});
  std::uint64_t hits = 0;
  std::uint64_t count = 0;
  while (true) {
    double rank_sum = 0;
    for (std::size_t idx : comb) rank_sum += ranks[idx];
    const double u = rank_sum - base;
    ++count;
    if (std::abs(u - mu) >= target - 1e-9) ++hits;

    std::size_t i = n;
    while (i > 0 && comb[i - 1] == total_n - n + (i - 1)) --i;
    if (i == 0) break;
    ++comb[i - 1];
    for (std::size_t j = i; j < n; ++j) comb[j] = comb[j - 1] + 1;
  }
  return static_cast<double>(hits) / static_cast<double>(count);
}

}  // namespace

MannWhitneyResult mann_whitney_u(const std::vector<double>& x, const std::vector<double>& y) {
  if (x.empty() || y.empty()) throw Error("mann-whitney requires two non-empty samples");
  const std::size_t n = x.size();
  const std::size_t m = y.size();
  std::vector<double> pooled;
  pooled.reserve(n + m);
  pooled.insert(pooled.end(), x.begin(), x.end());
  pooled.insert(pooled.end(), y.begin(), y.end());
  const std::vector<double> ranks = midranks(pooled);

  double rank_sum = 0;
  for (std::size_t i = 0; i < n; ++i) rank_sum += ranks[i];
  MannWhitneyResult res;
  res.u = rank_sum - static_cast<double>(n) * (static_cast<double>(n) + 1) / 2.0;

  if (n + m <= 12) {
    res.exact = true;
    res.p = exact_two_sided_p(ranks, n, res.u);
    return res;
  }

  const double dn = static_cast<double>(n);
  const double dm = static_cast<double>(m);
  const double total = dn + dm;
  const double mu = dn * dm / 2.0;

  std::vector<double> sorted = pooled;
  std::sort(sorted.begin(), sorted.end());
  double tie_sum = 0;
  for (std::size_t i = 0; i < sorted.size();) {
    std::size_t j = i;
    while (j < sorted.size() && sorted[j] == sorted[i]) ++j;
    const double t = static_cast<double>(j - i);
    tie_sum += t * t * t - t;
    i = j;
  }
  const double variance = dn * dm / 12.0 * ((total + 1) - tie_sum / (total * (total - 1)));
  if (variance <= 0) {
    res.p = 1;  // every pooled value tied
    return res;
  }
  double z = (std::abs(res.u - mu) - 0.5) / std::sqrt(variance);
  if (z < 0) z = 0;
  res.p = std::min(1.0, std::erfc(z / std::sqrt(2.0)));
  return res;
}

const char* magnitude_name(EffectMagnitude m) {
  switch (m) {
    case EffectMagnitude::negligible: return "negligible";
    case EffectMagnitude::small: return "small";
    case EffectMagnitude::medium: return "medium";
    case EffectMagnitude::large: return "large";
  }
  return "negligible";
}

EffectMagnitude delta_magnitude(double delta) {
  const double a = std::abs(delta);
  if (a < 0.147) return EffectMagnitude::negligible;
  if (a < 0.33) return EffectMagnitude::small;
  if (a < 0.474) return EffectMagnitude::medium;
  return EffectMagnitude::large;
}

CliffsDelta cliffs_delta(const std::vector<double>& x, const std::vector<double>& y) {
  if (x.empty() || y.empty()) throw Error("cliffs delta requires two non-empty samples");
  std::int64_t greater = 0;
  std::int64_t less = 0;
  for (double a : x) {
    for (double b : y) {
      if (a > b) ++greater;
      else if (a < b) ++less;
    }
  }
  CliffsDelta result;
  result.delta = static_cast<double>(greater - less) /
                 (static_cast<double>(x.size()) * static_cast<double>(y.size()));
  result.magnitude = delta_magnitude(result.delta);
  return result;
}

EffectSizeReport closest_median_comparison(const ClusterModel& model,
                                           const std::vector<std::vector<double>>& values,
                                           const std::vector<std::string>& columns) {
  if (model.expert_cluster < 0 || model.expert_cluster >= model.k)
    throw Error("cluster model has no expert cluster");
  if (values.size() != model.assignment.size())
    throw ContractError("row count does not match the cluster assignment");
  for (const auto& row : values)
    if (row.size() != columns.size()) throw ContractError("ragged feature rows");

  std::vector<std::vector<std::size_t>> members(static_cast<std::size_t>(model.k));
  for (std::size_t r = 0; r < model.assignment.size(); ++r) {
    const int c = model.assignment[r];
    if (c < 0 || c >= model.k) throw ContractError("assignment index out of range");
    members[static_cast<std::size_t>(c)].push_back(r);
  }
  const auto expert = static_cast<std::size_t>(model.expert_cluster);

  EffectSizeReport report;
  report.library = model.library;
  report.expert_cluster = model.expert_cluster;

  if (members[expert].size() < 2) {
    for (const auto& column : columns)
      report.skipped.emplace_back(column, "expert cluster has fewer than 2 members");
    return report;
  }

  for (std::size_t f = 0; f < columns.size(); ++f) {
    std::vector<double> expert_values;
    expert_values.reserve(members[expert].size());
    for (std::size_t r : members[expert]) expert_values.push_back(values[r][f]);
    const double expert_median = median_of(expert_values);

    int best = -1;
    double best_gap = 0;
    double best_median = 0;
    for (std::size_t c = 0; c < members.size(); ++c) {
      if (c == expert || members[c].empty()) continue;
      std::vector<double> cluster_values;
      cluster_values.reserve(members[c].size());
      for (std::size_t r : members[c]) cluster_values.push_back(values[r][f]);
      const double med = median_of(cluster_values);
      const double gap = std::abs(med - expert_median);
      const bool better =
          best < 0 || gap < best_gap ||
          (gap == best_gap && members[c].size() > members[static_cast<std::size_t>(best)].size());
      if (better) {
        best = static_cast<int>(c);
        best_gap = gap;
        best_median = med;
      }
    }
    if (best < 0) {
      report.skipped.emplace_back(columns[f], "no non-expert cluster to compare against");
      continue;
    }

    std::vector<double> other_values;
    for (std::size_t r : members[static_cast<std::size_t>(best)])
      other_values.push_back(values[r][f]);

    const MannWhitneyResult mw = mann_whitney_u(expert_values, other_values);
    const CliffsDelta cd = cliffs_delta(expert_values, other_values);

    FeatureEffect effect;
    effect.feature = columns[f];
    effect.comparison_cluster = best;
    effect.u = mw.u;
    effect.p = mw.p;
    effect.delta = cd.delta;
    effect.magnitude = cd.magnitude;
    if (mw.p >= 0.05) {
      effect.direction = "o";
    } else if (expert_median > best_median) {
      effect.direction = "+";
    } else if (expert_median < best_median) {
      effect.direction = "-";
    } else {
      effect.direction = cd.delta > 0 ? "+" : (cd.delta < 0 ? "-" : "o");
    }
    report.effects.push_back(std::move(effect));
  }
  return report;
}

double nearest_rank_percentile(std::vector<double> values, double q) {
  if (values.empty()) throw Error("percentile of an empty sample");
  if (q <= 0 || q > 1) throw ContractError("percentile fraction must be in (0, 1]");
  std::sort(values.begin(), values.end());
  const double n = static_cast<double>(values.size());
  auto rank = static_cast<std::size_t>(std::ceil(q * n - 1e-9));
  if (rank < 1) rank = 1;
  if (rank > values.size()) rank = values.size();
  return values[rank - 1];
}

QuintileRow quintile_expert_fractions(const std::string& feature,
                                      const std::vector<double>& values,
                                      const std::vector<bool>& is_expert) {
  if (values.size() != is_expert.size())
    throw ContractError("feature values and expert flags must align");
  if (values.size() < 5) throw Error("quintile buckets need at least 5 labeled rows");

  QuintileRow row;
  row.feature = feature;
  const std::array<double, 4> qs{0.2, 0.4, 0.6, 0.8};
  for (std::size_t i = 0; i < qs.size(); ++i)
    row.boundaries[i] = nearest_rank_percentile(values, qs[i]);
  row.degenerate =
      *std::min_element(values.begin(), values.end()) ==
      *std::max_element(values.begin(), values.end());

  std::array<std::int64_t, 5> experts{0, 0, 0, 0, 0};
  for (std::size_t i = 0; i < values.size(); ++i) {
    std::size_t bucket = 0;
    for (double b : row.boundaries)
      if (b < values[i]) ++bucket;
    ++row.counts[bucket];
    if (is_expert[i]) ++experts[bucket];
  }
  for (std::size_t b = 0; b < 5; ++b)
    row.expert_fraction[b] =
        row.counts[b] > 0 ? static_cast<double>(experts[b]) / static_cast<double>(row.counts[b])
                          : 0.0;
  return row;
}

std::string effects_to_json(const EffectSizeReport& report) {
  nlohmann::ordered_json doc;
  doc["library"] = report.library;
  doc["expert_cluster"] = report.expert_cluster;
  doc["effects"] = nlohmann::ordered_json::array();
  for (const auto& e : report.effects) {
    nlohmann::ordered_json item;
    item["feature"] = e.feature;
    item["comparison_cluster"] = e.comparison_cluster;
    item["u"] = e.u;
    item["p"] = e.p;
    item["delta"] = e.delta;
    item["magnitude"] = magnitude_name(e.magnitude);
    item["direction"] = e.direction;
    doc["effects"].push_back(std::move(item));
  }
  doc["skipped"] = nlohmann::ordered_json::array();
  for (const auto& [feature, reason] : report.skipped)
    doc["skipped"].push_back({{"feature", feature}, {"reason", reason}});
  return doc.dump(2) + "\n";
}

void save_effects(const std::filesystem::path& path, const EffectSizeReport& report) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw IoError("cannot write " + path.string());
  out << effects_to_json(report);
}

std::string quintiles_to_csv(const std::vector<QuintileRow>& rows) {
  std::ostringstream out;
  csv_write_row(out, {"feature", "bucket", "count", "expert_fraction", "degenerate"});
  for (const auto& row : rows) {
    for (std::size_t b = 0; b < 5; ++b) {
      csv_write_row(out, {row.feature, std::to_string(b + 1), std::to_string(row.counts[b]),
                          format_double(row.expert_fraction[b]),
                          row.degenerate ? "true" : "false"});
    }
  }
  return out.str();
}

void write_quintiles(const std::filesystem::path& path, const std::vector<QuintileRow>& rows) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw IoError("cannot write " + path.string());
  out << quintiles_to_csv(rows);
}

}  // namespace libexpert
