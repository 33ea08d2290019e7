#include "libexpert/forest.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "libexpert/errors.hpp"

namespace libexpert {

const char* feature_rule_name(ForestParams::FeatureRule rule) {
  switch (rule) {
    case ForestParams::FeatureRule::sqrt_p: return "sqrt";
    case ForestParams::FeatureRule::log2_p: return "log2";
    case ForestParams::FeatureRule::all: return "all";
  }
  return "unknown";
}

namespace {

int features_per_split(ForestParams::FeatureRule rule, int p) {
  int m = p;
  switch (rule) {
    case ForestParams::FeatureRule::sqrt_p:
      m = static_cast<int>(std::lround(std::sqrt(static_cast<double>(p))));
      break;
    case ForestParams::FeatureRule::log2_p:
      m = static_cast<int>(std::lround(std::log2(static_cast<double>(p))));
      break;
    case ForestParams::FeatureRule::all:
      m = p;
      break;
  }
  return std::clamp(m, 1, p);
}

double gini(const std::vector<std::int64_t>& counts, std::int64_t total) {
  if (total == 0) return 0.0;
  double impurity = 1.0;
  for (const auto c : counts) {
    const double f = static_cast<double>(c) / static_cast<double>(total);
    impurity -= f * f;
  }
  return impurity;
}

int majority_class(const std::vector<std::int64_t>& counts) {
  int best = 0;
  for (int c = 1; c < static_cast<int>(counts.size()); ++c) {
    if (counts[c] > counts[best]) best = c;  // tie keeps the lower class id
  }
  return best;
}

struct SplitChoice {
  bool found = false;
  int feature = -1;
  double threshold = 0;
  double impurity = 0;
};

struct TreeBuilder {
  const std::vector<std::vector<double>>& rows;
  const std::vector<int>& labels;
  int n_classes;
  const ForestParams& params;
  Rng& rng;
  std::vector<std::vector<double>::size_type> scratch;

  std::vector<int> sample_features() {
    const int p = static_cast<int>(rows[0].size());
    const int m = features_per_split(params.feature_rule, p);
    std::vector<int> all(p);
    std::iota(all.begin(), all.end(), 0);
    // Partial Fisher-Yates: first m entries are a uniform m-subset.
    for (int i = 0; i < m; ++i) {
      const auto j = i + static_cast<int>(rng.uniform_index(static_cast<std::size_t>(p - i)));
      std::swap(all[i], all[j]);
    }
    all.resize(m);
    std::sort(all.begin(), all.end());  // fixed evaluation order
    return all;
  }

  SplitChoice best_split(const std::vector<std::size_t>& members,
                         const std::vector<std::int64_t>& counts) {
    SplitChoice best;
    const auto n = static_cast<std::int64_t>(members.size());
    for (const int f : sample_features()) {
      std::vector<std::pair<double, int>> ordered;
      ordered.reserve(members.size());
      for (const auto i : members) ordered.emplace_back(rows[i][f], labels[i]);
      std::sort(ordered.begin(), ordered.end(),
                [](const auto& a, const auto& b) { return a.first < b.first; });

      std::vector<std::int64_t> left(n_classes, 0);
      std::vector<std::int64_t> right = counts;
      for (std::size_t cut = 1; cut < ordered.size(); ++cut) {
        const auto cls = ordered[cut - 1].second;
        ++left[cls];
        --right[cls];
        if (ordered[cut].first == ordered[cut - 1].first) continue;  // no boundary here
        const auto nl = static_cast<std::int64_t>(cut);
        const auto nr = n - nl;
        const double weighted =
            (static_cast<double>(nl) * gini(left, nl) + static_cast<double>(nr) * gini(right, nr)) /
            static_cast<double>(n);
        if (!best.found || weighted < best.impurity) {
          best.found = true;
          best.feature = f;
          best.threshold = (ordered[cut - 1].first + ordered[cut].first) / 2.0;
          best.impurity = weighted;
        }
      }
    }
    return best;
  }

  std::int32_t build(std::vector<TreeNode>& nodes, std::vector<std::size_t> members, int depth) {
    std::vector<std::int64_t> counts(n_classes, 0);
    for (const auto i : members) ++counts[labels[i]];

    const double node_impurity = gini(counts, static_cast<std::int64_t>(members.size()));
    const bool stop =
        node_impurity == 0.0 ||
        members.size() < static_cast<std::size_t>(params.min_samples_split) ||
        (params.max_depth > 0 && depth >= params.max_depth);

    SplitChoice split;
    if (!stop) split = best_split(members, counts);
    if (stop || !split.found || split.impurity >= node_impurity) {
      TreeNode leaf;
      leaf.leaf_class = majority_class(counts);
      nodes.push_back(leaf);
      return static_cast<std::int32_t>(nodes.size() - 1);
    }

    std::vector<std::size_t> left_members, right_members;
    for (const auto i : members) {
      (rows[i][split.feature] <= split.threshold ? left_members : right_members).push_back(i);
    }
    members.clear();
    members.shrink_to_fit();

    const auto index = static_cast<std::int32_t>(nodes.size());
    TreeNode inner;
    inner.feature = split.feature;
    inner.threshold = split.threshold;
    nodes.push_back(inner);
    const auto left = build(nodes, std::move(left_members), depth + 1);
    const auto right = build(nodes, std::move(right_members), depth + 1);
    nodes[index].left = left;
    nodes[index].right = right;
    return index;
  }
};

}  // namespace

RandomForest RandomForest::train(const std::vector<std::vector<double>>& rows,
                                 const std::vector<int>& labels, int n_classes,
                                 const ForestParams& params, Rng& rng) {
  if (rows.empty() || rows.size() != labels.size()) {
    throw Error("forest: empty training set or misaligned labels");
  }
  {
    const auto [lo, hi] = std::minmax_element(labels.begin(), labels.end());
    if (*lo == *hi) throw Error("forest: single-class training data");
    if (*lo < 0 || *hi >= n_classes) throw Error("forest: label out of range");
  }
  if (params.trees < 1) throw Error("forest: needs at least one tree");

  RandomForest forest;
  forest.n_classes_ = n_classes;
  forest.trees_.reserve(params.trees);
  const std::size_t n = rows.size();
  for (int t = 0; t < params.trees; ++t) {
    std::vector<std::size_t> members(n);
    if (params.bootstrap) {
      for (auto& m : members) m = rng.uniform_index(n);
    } else {
      std::iota(members.begin(), members.end(), 0u);
    }
    TreeBuilder builder{rows, labels, n_classes, params, rng, {}};
    DecisionTree tree;
    builder.build(tree.nodes, std::move(members), 0);
    forest.trees_.push_back(std::move(tree));
  }
  return forest;
}

int RandomForest::tree_vote(const DecisionTree& tree, const std::vector<double>& x) const {
  std::int32_t at = 0;
  for (;;) {
    const TreeNode& node = tree.nodes[at];
    if (node.feature < 0) return node.leaf_class;
    at = x[node.feature] <= node.threshold ? node.left : node.right;
  }
}

std::vector<std::vector<double>> RandomForest::predict_scores(
    const std::vector<std::vector<double>>& rows) const {
  std::vector<std::vector<double>> scores;
  scores.reserve(rows.size());
  for (const auto& x : rows) {
    std::vector<double> votes(n_classes_, 0.0);
    for (const auto& tree : trees_) votes[tree_vote(tree, x)] += 1.0;
    for (auto& v : votes) v /= static_cast<double>(trees_.size());
    scores.push_back(std::move(votes));
  }
  return scores;
}

std::vector<int> RandomForest::predict(const std::vector<std::vector<double>>& rows) const {
  const auto scores = predict_scores(rows);
  std::vector<int> out;
  out.reserve(rows.size());
  for (const auto& s : scores) {
    out.push_back(static_cast<int>(std::max_element(s.begin(), s.end()) - s.begin()));
  }
  return out;
}

}  // namespace libexpert
