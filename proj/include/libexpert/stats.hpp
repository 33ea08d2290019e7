#pragma once

#include <array>
#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

#include "libexpert/cluster.hpp"
#include "libexpert/matrix.hpp"

namespace libexpert {

struct MannWhitneyResult {
  double u = 0;        // U statistic of the first sample, midrank ties
  double p = 1;        // two-sided
  bool exact = false;  // enumeration path (|x|+|y| <= 12) vs normal approx
};

// Rank-sum test. Exact two-sided p by enumerating all group assignments
// when |x|+|y| <= 12; otherwise normal approximation with tie-corrected
// variance and 0.5 continuity correction.
MannWhitneyResult mann_whitney_u(const std::vector<double>& x, const std::vector<double>& y);

enum class EffectMagnitude { negligible, small, medium, large };
const char* magnitude_name(EffectMagnitude m);

// |d| < 0.147 negligible; < 0.33 small; < 0.474 medium; else large.
EffectMagnitude delta_magnitude(double delta);

struct CliffsDelta {
  double delta = 0;  // (#{x>y} - #{x<y}) / (|x| |y|)
  EffectMagnitude magnitude = EffectMagnitude::negligible;
};

CliffsDelta cliffs_delta(const std::vector<double>& x, const std::vector<double>& y);

struct FeatureEffect {
  std::string feature;
  int comparison_cluster = -1;  // non-expert cluster with the closest median
  double u = 0;
  double p = 1;
  double delta = 0;
  EffectMagnitude magnitude = EffectMagnitude::negligible;
  std::string direction;  // "+", "-", or "o" (similar distributions)
};

struct EffectSizeReport {
  std::string library;
  int expert_cluster = -1;
  std::vector<FeatureEffect> effects;
  std::vector<std::pair<std::string, std::string>> skipped;  // feature -> reason
};

// Per active feature: compare the expert cluster against the non-expert
// cluster whose median is closest to the expert cluster's median (ties to
// the larger cluster). Direction is "o" when p >= 0.05, otherwise the sign
// of the median difference (falling back to the sign of delta when the
// medians tie). Features are skipped when the expert cluster has fewer than
// two members. `values` must align with model.assignment and use the same
// active columns as `columns`.
EffectSizeReport closest_median_comparison(const ClusterModel& model,
                                           const std::vector<std::vector<double>>& values,
                                           const std::vector<std::string>& columns);

struct QuintileRow {
  std::string feature;
  std::array<std::int64_t, 5> counts{0, 0, 0, 0, 0};
  std::array<double, 5> expert_fraction{0, 0, 0, 0, 0};
  std::array<double, 4> boundaries{0, 0, 0, 0};  // 20/40/60/80th percentiles
  bool degenerate = false;                       // constant column
};

// Buckets labeled rows by nearest-rank quintile boundaries (boundary ties
// fall to the lower bucket) and reports the expert fraction per bucket.
QuintileRow quintile_expert_fractions(const std::string& feature,
                                      const std::vector<double>& values,
                                      const std::vector<bool>& is_expert);

// Nearest-rank percentile: smallest value with at least q of the mass at or
// below it. q in (0,1].
double nearest_rank_percentile(std::vector<double> values, double q);

std::string effects_to_json(const EffectSizeReport& report);
void save_effects(const std::filesystem::path& path, const EffectSizeReport& report);

// quintiles.csv: feature,bucket,count,expert_fraction,degenerate
std::string quintiles_to_csv(const std::vector<QuintileRow>& rows);
void write_quintiles(const std::filesystem::path& path, const std::vector<QuintileRow>& rows);

}  // namespace libexpert
