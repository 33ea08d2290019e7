#include <algorithm>
#include <optional>
#include <vector>

#include "doctest.h"
#include "libexpert/errors.hpp"
#include "libexpert/features.hpp"
#include "libexpert/rng.hpp"

using namespace libexpert;

namespace {

constexpr std::int64_t kSnap = 1527811200;
constexpr std::int64_t kDay = 86400;

CommitEvent event(const std::string& dev, const std::string& project, std::int64_t days_before,
                  std::int64_t churn, std::int64_t churn_client, bool client,
                  std::int64_t imports) {
  CommitEvent ev;
  ev.developer = dev;
  ev.project = project;
  ev.commit_id = "c" + std::to_string(days_before) + dev;
  ev.authored_at = kSnap - days_before * kDay;
  ev.churn_total = churn;
  ev.churn_client = churn_client;
  ev.touched_client_file = client;
  ev.imports_added = imports;
  return ev;
}

// Three commits at 30/10/0 days before the snapshot; the first two touch
// client files and the second adds one import.
std::vector<CommitEvent> golden_events() {
  return {event("dev", "p1", 30, 5, 4, true, 0),
          event("dev", "p1", 10, 3, 3, true, 1),
          event("dev", "p1", 0, 2, 0, false, 0)};
}

}  // namespace

TEST_CASE("golden three-commit history maps to the expected vector") {
  const auto outcome = compute_features(golden_events(), kSnap, "react");
  REQUIRE(outcome.vector.has_value());
  const FeatureVector& v = *outcome.vector;
  CHECK(v.developer == "dev");
  CHECK(v.library == "react");
  CHECK(v.commits == 3);
  CHECK(v.commits_client_files == 2);
  CHECK(v.commits_import_library == 1);
  CHECK(v.code_churn == 10);
  CHECK(v.code_churn_client_files == 7);
  CHECK(v.imports == 1);
  CHECK(v.days_since_first_import == 10);
  CHECK(v.days_since_last_import == 10);
  CHECK(v.days_between_imports == 0);
  CHECK(v.avg_days_commits_client_files == 20.0);
  CHECK(!v.avg_days_commits_import_library.has_value());
  CHECK(v.projects == 1);
  CHECK(v.projects_import == 1);
}

TEST_CASE("no imports leaves all four import-date features missing") {
  const std::vector<CommitEvent> events = {event("dev", "p1", 7, 4, 2, true, 0)};
  const auto outcome = compute_features(events, kSnap, "react");
  REQUIRE(outcome.vector.has_value());
  const FeatureVector& v = *outcome.vector;
  CHECK(v.imports == 0);
  CHECK(!v.days_since_first_import.has_value());
  CHECK(!v.days_since_last_import.has_value());
  CHECK(!v.days_between_imports.has_value());
  CHECK(!v.avg_days_commits_import_library.has_value());
  CHECK(v.avg_days_commits_client_files == 0.0);  // single client commit: no gaps
}

TEST_CASE("multiple import commits fill every date feature") {
  const std::vector<CommitEvent> events = {event("dev", "p1", 40, 6, 6, true, 2),
                                           event("dev", "p2", 22, 3, 3, true, 1),
                                           event("dev", "p1", 10, 2, 2, true, 1)};
  const auto outcome = compute_features(events, kSnap, "react");
  REQUIRE(outcome.vector.has_value());
  const FeatureVector& v = *outcome.vector;
  CHECK(v.imports == 4);
  CHECK(v.commits_import_library == 3);
  CHECK(v.days_since_first_import == 40);
  CHECK(v.days_since_last_import == 10);
  CHECK(v.days_between_imports == 30);
  CHECK(v.avg_days_commits_client_files == 15.0);   // gaps 18 and 12
  CHECK(v.avg_days_commits_import_library == 15.0);
  CHECK(v.projects == 2);
  CHECK(v.projects_import == 2);
}

TEST_CASE("exclusion reasons cover empty and gate-failing developers") {
  const auto empty = compute_features({}, kSnap, "react");
  CHECK(!empty.vector.has_value());
  CHECK(empty.reason == ExclusionReason::no_events);

  const std::vector<CommitEvent> no_client = {event("dev", "p1", 3, 9, 0, false, 0)};
  const auto gated = compute_features(no_client, kSnap, "react");
  CHECK(!gated.vector.has_value());
  CHECK(gated.reason == ExclusionReason::no_client_file_commit);
}

TEST_CASE("aggregation rejects mixed developers and future events") {
  std::vector<CommitEvent> mixed = golden_events();
  mixed.push_back(event("other", "p1", 1, 1, 1, true, 0));
  CHECK_THROWS_AS(compute_features(mixed, kSnap, "react"), ContractError);

  std::vector<CommitEvent> future = {event("dev", "p1", 0, 1, 1, true, 0)};
  future[0].authored_at = kSnap + 1;
  CHECK_THROWS_AS(compute_features(future, kSnap, "react"), ContractError);
}

TEST_CASE("event order never changes the vector") {
  auto events = golden_events();
  std::sort(events.begin(), events.end(),
            [](const CommitEvent& a, const CommitEvent& b) { return a.commit_id < b.commit_id; });
  const auto sorted = compute_features(events, kSnap, "react");
  std::reverse(events.begin(), events.end());
  const auto reversed = compute_features(events, kSnap, "react");
  REQUIRE(sorted.vector.has_value());
  REQUIRE(reversed.vector.has_value());
  CHECK(sorted.vector->values() == reversed.vector->values());
}

TEST_CASE("chunked accumulation merges to the single-pass result") {
  const auto events = golden_events();
  FeatureAccumulator left, right, whole;
  left.add(events[0]);
  right.add(events[1]);
  right.add(events[2]);
  for (const auto& ev : events) whole.add(ev);
  left.merge(right);
  const auto merged = left.finish(kSnap, "react");
  const auto single = whole.finish(kSnap, "react");
  REQUIRE(merged.vector.has_value());
  REQUIRE(single.vector.has_value());
  CHECK(merged.vector->values() == single.vector->values());
}

TEST_CASE("randomized histories always satisfy the ordering invariants") {
  Rng rng(2024);
  for (int trial = 0; trial < 60; ++trial) {
    std::vector<CommitEvent> events;
    const int n = 1 + static_cast<int>(rng.uniform_index(12));
    for (int i = 0; i < n; ++i) {
      const bool client = rng.uniform01() < 0.6;
      const std::int64_t churn_client = client ? static_cast<std::int64_t>(rng.uniform_index(50))
                                               : 0;
      const std::int64_t churn = churn_client + static_cast<std::int64_t>(rng.uniform_index(50));
      const std::int64_t imports =
          client && rng.uniform01() < 0.5 ? static_cast<std::int64_t>(rng.uniform_index(3)) : 0;
      const auto project = "p" + std::to_string(rng.uniform_index(3));
      events.push_back(event("dev", project, static_cast<std::int64_t>(rng.uniform_index(400)),
                             churn, churn_client, client, imports));
    }
    const auto outcome = compute_features(events, kSnap, "react");
    if (!outcome.vector.has_value()) {
      CHECK(outcome.reason == ExclusionReason::no_client_file_commit);
      continue;
    }
    const FeatureVector& v = *outcome.vector;
    CHECK(v.commits_import_library <= v.commits_client_files);
    CHECK(v.commits_client_files <= v.commits);
    CHECK(v.code_churn_client_files <= v.code_churn);
    CHECK(v.projects_import <= v.projects);
    CHECK(v.imports >= v.commits_import_library);
    if (v.days_since_first_import.has_value()) {
      CHECK(*v.days_since_first_import >= *v.days_since_last_import);
      CHECK(*v.days_since_last_import >= 0);
      CHECK(*v.days_between_imports ==
            *v.days_since_first_import - *v.days_since_last_import);
    }
  }
}

TEST_CASE("compute_all_features groups developers and is thread-stable") {
  std::vector<CommitEvent> events;
  for (const auto& ev : golden_events()) events.push_back(ev);
  events.push_back(event("zoe", "p2", 12, 4, 4, true, 2));
  events.push_back(event("quiet", "p1", 9, 3, 0, false, 0));

  const FeatureSet one = compute_all_features(events, kSnap, "react", 1);
  const FeatureSet four = compute_all_features(events, kSnap, "react", 4);
  REQUIRE(one.vectors.size() == 2);
  CHECK(one.vectors[0].developer == "dev");
  CHECK(one.vectors[1].developer == "zoe");
  CHECK(one.excluded.at("quiet") == ExclusionReason::no_client_file_commit);
  CHECK(features_to_csv(one.vectors) == features_to_csv(four.vectors));
}

TEST_CASE("feature CSV round-trips missing cells as empty") {
  std::vector<CommitEvent> events = {event("dev", "p1", 7, 4, 2, true, 0)};
  const auto outcome = compute_features(events, kSnap, "react");
  REQUIRE(outcome.vector.has_value());
  std::vector<FeatureVector> vectors = {*outcome.vector};
  {
    const auto full = compute_features(golden_events(), kSnap, "react");
    vectors.push_back(*full.vector);
  }

  const std::string csv = features_to_csv(vectors);
  const auto back = features_from_csv(csv);
  REQUIRE(back.size() == 2);
  for (std::size_t i = 0; i < 2; ++i) {
    CHECK(back[i].developer == vectors[i].developer);
    CHECK(back[i].values() == vectors[i].values());
  }
  CHECK(features_to_csv(back) == csv);
  // The missing import dates show up as empty cells, not zeros.
  CHECK(csv.find(",,") != std::string::npos);
}
